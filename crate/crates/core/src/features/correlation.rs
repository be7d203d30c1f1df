use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureTable;

/// Average ranks (1-based); tied values share the mean of their positions.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    match (sxx > 0.0, syy > 0.0) {
        (true, true) => Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)),
        (false, false) => None,
        _ => Some(0.0),
    }
}

/// Spearman's rank correlation. One constant input gives 0; two constant
/// inputs are undefined.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "spearman_rho needs two equal-length inputs of at least 2 values, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    pearson(&average_ranks(x), &average_ranks(y))
        .ok_or_else(|| Error::Undefined("Spearman correlation of two constant inputs".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedFeature {
    pub name: String,
    /// The first earlier feature it correlated with.
    pub correlated_with: String,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterOutcome {
    pub kept: Vec<String>,
    pub dropped: Vec<DroppedFeature>,
}

/// Scan over column pairs `(i, j)`, `i < j` in table order: column `j` is
/// dropped when `|rho(i, j)| > threshold`, whether or not `i` survived. Two
/// constant columns count as fully correlated.
pub fn correlation_filter(table: &FeatureTable, threshold: f64) -> Result<FilterOutcome> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "correlation threshold must lie in (0, 1], got {threshold}"
        )));
    }
    let d = table.columns.len();
    let ranks: Vec<Vec<f64>> = (0..d)
        .into_par_iter()
        .map(|j| average_ranks(&table.column(j)))
        .collect();
    let rho: Vec<Vec<f64>> = (0..d)
        .into_par_iter()
        .map(|i| {
            (0..d)
                .map(|j| {
                    if j <= i || table.len() < 2 {
                        0.0
                    } else {
                        pearson(&ranks[i], &ranks[j]).unwrap_or(1.0)
                    }
                })
                .collect()
        })
        .collect();

    let mut dropped_flag = vec![false; d];
    let mut dropped = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            if !dropped_flag[j] && rho[i][j].abs() > threshold {
                dropped_flag[j] = true;
                dropped.push(DroppedFeature {
                    name: table.columns[j].clone(),
                    correlated_with: table.columns[i].clone(),
                    rho: rho[i][j],
                });
            }
        }
    }
    let kept = (0..d)
        .filter(|&j| !dropped_flag[j])
        .map(|j| table.columns[j].clone())
        .collect();
    Ok(FilterOutcome { kept, dropped })
}
