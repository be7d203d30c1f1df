use crate::error::{Error, Result};

/// Area under the ROC curve as the Mann-Whitney statistic
/// `(concordant + ties / 2) / (P * N)`.
pub fn roc_auc(scores: &[f64], truth: &[bool]) -> Result<f64> {
    check(scores, truth)?;
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let pos = truth.iter().filter(|&&t| t).count();
    let neg = truth.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::Undefined("ROC AUC needs both positives and negatives".into()));
    }
    // walk tie blocks in ascending score order
    let (mut below_neg, mut num) = (0.0f64, 0.0f64);
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let (mut p, mut n) = (0.0, 0.0);
        for &k in &idx[i..=j] {
            if truth[k] {
                p += 1.0;
            } else {
                n += 1.0;
            }
        }
        num += p * below_neg + 0.5 * p * n;
        below_neg += n;
        i = j + 1;
    }
    Ok(num / (pos as f64 * neg as f64))
}

/// Average precision `sum_k (R_k - R_{k-1}) P_k` over descending score
/// thresholds, each tie block taken as one threshold.
pub fn prc_auc(scores: &[f64], truth: &[bool]) -> Result<f64> {
    check(scores, truth)?;
    let pos = truth.iter().filter(|&&t| t).count();
    if pos == 0 {
        return Err(Error::Undefined("PRC AUC needs at least one positive".into()));
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let (mut tp, mut seen, mut ap) = (0usize, 0usize, 0.0f64);
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let block_tp = idx[i..=j].iter().filter(|&&k| truth[k]).count();
        tp += block_tp;
        seen += j - i + 1;
        if block_tp > 0 {
            ap += (block_tp as f64 / pos as f64) * (tp as f64 / seen as f64);
        }
        i = j + 1;
    }
    Ok(ap)
}

fn check(scores: &[f64], truth: &[bool]) -> Result<()> {
    if scores.len() != truth.len() {
        return Err(Error::InvalidArgument(format!(
            "{} scores but {} labels",
            scores.len(),
            truth.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument("NaN score".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curve {
    Roc,
    Prc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MulticlassAuc {
    /// One-vs-rest value per category; `None` when the category is absent
    /// from the truth (or present in every case, for ROC).
    pub per_class: Vec<Option<f64>>,
    pub micro: Option<f64>,
    /// Mean over defined categories.
    pub macro_avg: Option<f64>,
    /// Support-weighted mean over defined categories.
    pub weighted: Option<f64>,
    /// Categories left out of the averages.
    pub undefined: Vec<usize>,
}

/// One-vs-rest areas from a probability matrix (`probs[case][category]`)
/// and true category indices.
pub fn multiclass_auc(probs: &[Vec<f64>], truth: &[usize], k: usize, curve: Curve) -> Result<MulticlassAuc> {
    if probs.len() != truth.len() {
        return Err(Error::InvalidArgument("probability rows and labels differ in length".into()));
    }
    for row in probs {
        if row.len() != k {
            return Err(Error::InvalidArgument(format!("probability row has {} entries, expected {k}", row.len())));
        }
        if (row.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("probability rows must sum to 1".into()));
        }
    }
    if let Some(&bad) = truth.iter().find(|&&t| t >= k) {
        return Err(Error::UnknownLabel(format!("category index {bad}")));
    }
    let area = |s: &[f64], t: &[bool]| match curve {
        Curve::Roc => roc_auc(s, t),
        Curve::Prc => prc_auc(s, t),
    };
    let mut per_class = Vec::with_capacity(k);
    let mut undefined = Vec::new();
    let (mut sum, mut wsum, mut wtot, mut defined) = (0.0, 0.0, 0.0, 0usize);
    for c in 0..k {
        let s: Vec<f64> = probs.iter().map(|r| r[c]).collect();
        let t: Vec<bool> = truth.iter().map(|&y| y == c).collect();
        let support = t.iter().filter(|&&b| b).count() as f64;
        match area(&s, &t) {
            Ok(v) if support > 0.0 => {
                sum += v;
                wsum += v * support;
                wtot += support;
                defined += 1;
                per_class.push(Some(v));
            }
            Ok(_) | Err(Error::Undefined(_)) => {
                undefined.push(c);
                per_class.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    let flat_s: Vec<f64> = probs.iter().flatten().copied().collect();
    let flat_t: Vec<bool> = truth.iter().flat_map(|&y| (0..k).map(move |c| c == y)).collect();
    let micro = match area(&flat_s, &flat_t) {
        Ok(v) => Some(v),
        Err(Error::Undefined(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(MulticlassAuc {
        per_class,
        micro,
        macro_avg: (defined > 0).then(|| sum / defined as f64),
        weighted: (wtot > 0.0).then(|| wsum / wtot),
        undefined,
    })
}
