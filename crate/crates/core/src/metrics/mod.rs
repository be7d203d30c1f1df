//! Classification metrics, ROC/PR areas and paired equivalence testing.

mod auc;
mod tdist;
mod tost;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use auc::{multiclass_auc, prc_auc, roc_auc, Curve, MulticlassAuc};
pub use tdist::{inc_beta, ln_gamma, student_t_cdf};
pub use tost::{tost_paired, TostResult};

/// Rows are true categories, columns predicted categories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub categories: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn k(&self) -> usize {
        self.categories.len()
    }
}

pub fn confusion(y_true: &[usize], y_pred: &[usize], categories: &[String]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::InvalidArgument(format!(
            "{} true labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    let k = categories.len();
    let mut counts = vec![vec![0u64; k]; k];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t >= k || p >= k {
            return Err(Error::UnknownLabel(format!("category index {}", t.max(p))));
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix {
        categories: categories.to_vec(),
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classwise {
    pub per_class: Vec<Prf>,
    pub support: Vec<u64>,
    pub micro: Prf,
    pub macro_avg: Prf,
    pub weighted: Prf,
    pub accuracy: f64,
    /// Human-readable notes on every 0/0 that was set to 0.
    pub flags: Vec<String>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// One-vs-rest precision, recall and F1 with micro, macro and
/// support-weighted averages. Undefined ratios are set to 0 and flagged.
pub fn classwise_and_averaged(cm: &ConfusionMatrix) -> Result<Classwise> {
    let k = cm.k();
    let total = cm.total();
    if total == 0 {
        return Err(Error::InvalidArgument("confusion matrix is empty".into()));
    }
    let mut flags = Vec::new();
    let mut per_class = Vec::with_capacity(k);
    let mut support = Vec::with_capacity(k);
    let (mut tp_all, mut fp_all, mut fn_all) = (0u64, 0u64, 0u64);
    for c in 0..k {
        let tp = cm.counts[c][c];
        let predicted: u64 = (0..k).map(|r| cm.counts[r][c]).sum();
        let actual: u64 = cm.counts[c].iter().sum();
        tp_all += tp;
        fp_all += predicted - tp;
        fn_all += actual - tp;
        let precision = ratio(tp, predicted).unwrap_or_else(|| {
            flags.push(format!("precision of {} undefined (never predicted), set to 0", cm.categories[c]));
            0.0
        });
        let recall = ratio(tp, actual).unwrap_or_else(|| {
            flags.push(format!("recall of {} undefined (no true cases), set to 0", cm.categories[c]));
            0.0
        });
        per_class.push(Prf { precision, recall, f1: f1(precision, recall) });
        support.push(actual);
    }
    let mp = ratio(tp_all, tp_all + fp_all).unwrap_or(0.0);
    let mr = ratio(tp_all, tp_all + fn_all).unwrap_or(0.0);
    let mean = |f: fn(&Prf) -> f64| per_class.iter().map(f).sum::<f64>() / k as f64;
    let wmean = |f: fn(&Prf) -> f64| {
        per_class
            .iter()
            .zip(&support)
            .map(|(m, &s)| f(m) * s as f64)
            .sum::<f64>()
            / total as f64
    };
    let trace: u64 = (0..k).map(|c| cm.counts[c][c]).sum();
    Ok(Classwise {
        micro: Prf { precision: mp, recall: mr, f1: f1(mp, mr) },
        macro_avg: Prf {
            precision: mean(|m| m.precision),
            recall: mean(|m| m.recall),
            f1: mean(|m| m.f1),
        },
        weighted: Prf {
            precision: wmean(|m| m.precision),
            recall: wmean(|m| m.recall),
            f1: wmean(|m| m.f1),
        },
        per_class,
        support,
        accuracy: trace as f64 / total as f64,
        flags,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub roc_auc: Option<f64>,
    pub prc_auc: Option<f64>,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageEntry {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub roc_auc: Option<f64>,
    pub prc_auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub center_id: Option<u32>,
    pub n_cases: usize,
    pub per_class: IndexMap<String, ClassEntry>,
    pub averages: IndexMap<String, AverageEntry>,
    pub accuracy: f64,
    pub confusion: Vec<Vec<u64>>,
    pub flags: Vec<String>,
}

impl MetricsReport {
    /// Scores a probability matrix against true category indices; the
    /// predicted category is the row arg-max.
    pub fn compute(
        center_id: Option<u32>,
        truth: &[usize],
        probs: &[Vec<f64>],
        categories: &[String],
    ) -> Result<Self> {
        let k = categories.len();
        let pred: Vec<usize> = probs.iter().map(|p| crate::gbdt::argmax(p)).collect();
        let cm = confusion(truth, &pred, categories)?;
        let cw = classwise_and_averaged(&cm)?;
        let roc = multiclass_auc(probs, truth, k, Curve::Roc)?;
        let prc = multiclass_auc(probs, truth, k, Curve::Prc)?;
        let mut flags = cw.flags.clone();
        for &c in &roc.undefined {
            flags.push(format!("ROC AUC of {} undefined, excluded from averages", categories[c]));
        }
        for &c in &prc.undefined {
            flags.push(format!("PRC AUC of {} undefined, excluded from averages", categories[c]));
        }
        let per_class = (0..k)
            .map(|c| {
                (
                    categories[c].clone(),
                    ClassEntry {
                        precision: cw.per_class[c].precision,
                        recall: cw.per_class[c].recall,
                        f1: cw.per_class[c].f1,
                        roc_auc: roc.per_class[c],
                        prc_auc: prc.per_class[c],
                        support: cw.support[c],
                    },
                )
            })
            .collect();
        let avg = |m: &Prf, r: Option<f64>, p: Option<f64>| AverageEntry {
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            roc_auc: r,
            prc_auc: p,
        };
        let mut averages = IndexMap::new();
        averages.insert("micro".to_string(), avg(&cw.micro, roc.micro, prc.micro));
        averages.insert("macro".to_string(), avg(&cw.macro_avg, roc.macro_avg, prc.macro_avg));
        averages.insert("weighted".to_string(), avg(&cw.weighted, roc.weighted, prc.weighted));
        Ok(Self {
            center_id,
            n_cases: truth.len(),
            per_class,
            averages,
            accuracy: cw.accuracy,
            confusion: cm.counts,
            flags,
        })
    }

    /// Looks up `metric` (precision, recall, f1, roc_auc, prc_auc, accuracy)
    /// for `scope`, a category name or micro / macro / weighted.
    pub fn metric(&self, metric: &str, scope: &str) -> Result<Option<f64>> {
        if metric == "accuracy" {
            return Ok(Some(self.accuracy));
        }
        let pick = |p: f64, r: f64, f: f64, roc: Option<f64>, prc: Option<f64>| -> Result<Option<f64>> {
            match metric {
                "precision" => Ok(Some(p)),
                "recall" => Ok(Some(r)),
                "f1" => Ok(Some(f)),
                "roc_auc" => Ok(roc),
                "prc_auc" => Ok(prc),
                other => Err(Error::InvalidArgument(format!("unknown metric {other}"))),
            }
        };
        if let Some(e) = self.per_class.get(scope) {
            return pick(e.precision, e.recall, e.f1, e.roc_auc, e.prc_auc);
        }
        if let Some(e) = self.averages.get(scope) {
            return pick(e.precision, e.recall, e.f1, e.roc_auc, e.prc_auc);
        }
        Err(Error::InvalidArgument(format!("unknown class or average {scope}")))
    }
}
