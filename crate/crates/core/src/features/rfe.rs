use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureTable;
use crate::gbdt::{train, GbdtHyperparams, GbdtModel};
use crate::label::Label;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfeOutcome {
    /// Survivors in input column order.
    pub selected: Vec<String>,
    /// Normalized total-gain importance of each survivor in the final model.
    pub importances: Vec<f64>,
    /// Columns in the order they were eliminated.
    pub eliminated: Vec<String>,
}

fn fit(table: &FeatureTable, cols: &[usize], hp: &GbdtHyperparams) -> Result<GbdtModel> {
    let x: Vec<Vec<f64>> = table
        .values
        .iter()
        .map(|r| cols.iter().map(|&j| r[j]).collect())
        .collect();
    let names: Vec<String> = cols.iter().map(|&j| table.columns[j].clone()).collect();
    train(&x, &table.label_indices(), &names, &Label::names(), hp)
}

/// Recursive feature elimination: refit on the surviving columns and drop
/// the one with the smallest total-gain importance (the later column on
/// ties) until `k` remain.
pub fn rfe_select(table: &FeatureTable, k: usize, hp: &GbdtHyperparams) -> Result<RfeOutcome> {
    let d = table.columns.len();
    if k < 1 || k > d {
        return Err(Error::InvalidArgument(format!(
            "cannot select {k} features out of {d}"
        )));
    }
    let mut alive: Vec<usize> = (0..d).collect();
    let mut eliminated = Vec::new();
    while alive.len() > k {
        let imp = fit(table, &alive, hp)?.feature_importance();
        let mut worst = 0;
        for (p, &g) in imp.iter().enumerate() {
            if g <= imp[worst] {
                worst = p;
            }
        }
        eliminated.push(table.columns[alive.remove(worst)].clone());
    }
    let importances = fit(table, &alive, hp)?.feature_importance_normalized();
    Ok(RfeOutcome {
        selected: alive.iter().map(|&j| table.columns[j].clone()).collect(),
        importances,
        eliminated,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionEntry {
    pub count: usize,
    pub mean_importance: f64,
}

/// How often each feature was selected across folds, with its mean
/// importance over the selecting folds. Ordered by descending count, then
/// descending mean importance, then name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub n_folds: usize,
    pub features: IndexMap<String, SelectionEntry>,
}

pub fn build_selection_report(per_fold: &[(Vec<String>, Vec<f64>)]) -> Result<SelectionReport> {
    if per_fold.is_empty() {
        return Err(Error::InvalidArgument("selection report needs at least one fold".into()));
    }
    let mut acc: IndexMap<String, (usize, f64)> = IndexMap::new();
    for (names, imps) in per_fold {
        if names.len() != imps.len() {
            return Err(Error::InvalidArgument("names and importances differ in length".into()));
        }
        for (n, &g) in names.iter().zip(imps) {
            let e = acc.entry(n.clone()).or_insert((0, 0.0));
            e.0 += 1;
            e.1 += g;
        }
    }
    let mut rows: Vec<(String, SelectionEntry)> = acc
        .into_iter()
        .map(|(n, (c, s))| {
            (
                n,
                SelectionEntry {
                    count: c,
                    mean_importance: s / c as f64,
                },
            )
        })
        .collect();
    rows.sort_by(|a, b| {
        b.1.count
            .cmp(&a.1.count)
            .then(b.1.mean_importance.total_cmp(&a.1.mean_importance))
            .then(a.0.cmp(&b.0))
    });
    Ok(SelectionReport {
        n_folds: per_fold.len(),
        features: rows.into_iter().collect(),
    })
}
