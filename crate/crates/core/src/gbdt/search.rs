use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gbdt::{argmax, train, GbdtHyperparams};
use crate::rng::keyed_rng;

/// Axes of the hyperparameter lattice. Lattice order nests the axes in
/// declaration order with `n_rounds` outermost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub n_rounds: Vec<usize>,
    pub max_depth: Vec<usize>,
    pub learning_rate: Vec<f64>,
    pub l2_reg: Vec<f64>,
    pub min_split_gain: Vec<f64>,
    pub min_child_weight: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_rounds: vec![50, 100, 200],
            max_depth: vec![2, 3, 4],
            learning_rate: vec![0.05, 0.1, 0.3],
            l2_reg: vec![1.0],
            min_split_gain: vec![0.0],
            min_child_weight: vec![1.0],
        }
    }
}

impl GridSpec {
    pub fn lattice(&self, seed: u64) -> Vec<GbdtHyperparams> {
        let mut out = Vec::new();
        for &n_rounds in &self.n_rounds {
            for &max_depth in &self.max_depth {
                for &learning_rate in &self.learning_rate {
                    for &l2_reg in &self.l2_reg {
                        for &min_split_gain in &self.min_split_gain {
                            for &min_child_weight in &self.min_child_weight {
                                out.push(GbdtHyperparams {
                                    n_rounds,
                                    max_depth,
                                    learning_rate,
                                    l2_reg,
                                    min_split_gain,
                                    min_child_weight,
                                    seed,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub best: GbdtHyperparams,
    pub best_index: usize,
    /// Mean cross-validated accuracy per lattice point, in lattice order.
    pub scores: Vec<f64>,
}

/// Fold index per sample. Each category is shuffled with its own keyed stream
/// and dealt round-robin, so every fold receives every category.
pub fn stratified_folds(y: &[usize], n_categories: usize, folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Fold(format!("need at least 2 folds, got {folds}")));
    }
    let mut assign = vec![0; y.len()];
    for c in 0..n_categories {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == c).collect();
        if idx.is_empty() {
            continue;
        }
        if idx.len() < folds {
            return Err(Error::Fold(format!(
                "category {c} has {} samples, fewer than {folds} folds",
                idx.len()
            )));
        }
        idx.shuffle(&mut keyed_rng(&[seed, 0x0005_F01D, c as u64]));
        for (r, i) in idx.into_iter().enumerate() {
            assign[i] = r % folds;
        }
    }
    Ok(assign)
}

/// Key of a lattice point with `n_rounds` removed: points sharing it are
/// prefixes of one boosting run.
fn run_key(hp: &GbdtHyperparams) -> [u64; 5] {
    [
        hp.max_depth as u64,
        hp.learning_rate.to_bits(),
        hp.l2_reg.to_bits(),
        hp.min_split_gain.to_bits(),
        hp.min_child_weight.to_bits(),
    ]
}

/// Picks the lattice point with the highest mean stratified k-fold accuracy;
/// the earliest point wins ties.
pub fn grid_search_cv(
    x: &[Vec<f64>],
    y: &[usize],
    feature_names: &[String],
    categories: &[String],
    lattice: &[GbdtHyperparams],
    folds: usize,
    seed: u64,
) -> Result<GridSearchResult> {
    if lattice.is_empty() {
        return Err(Error::InvalidArgument("empty hyperparameter lattice".into()));
    }
    for hp in lattice {
        hp.validate()?;
    }
    let assign = stratified_folds(y, categories.len(), folds, seed)?;

    let mut runs: Vec<[u64; 5]> = Vec::new();
    for hp in lattice {
        let key = run_key(hp);
        if !runs.contains(&key) {
            runs.push(key);
        }
    }
    let jobs: Vec<(usize, usize)> = (0..runs.len())
        .flat_map(|r| (0..folds).map(move |f| (r, f)))
        .collect();
    // correct-prediction counts per lattice point for each (run, fold) job
    let per_job: Vec<Result<Vec<(usize, usize)>>> = jobs
        .par_iter()
        .map(|&(r, f)| {
            let members: Vec<usize> = (0..lattice.len()).filter(|&i| run_key(&lattice[i]) == runs[r]).collect();
            let longest = members.iter().map(|&i| lattice[i].n_rounds).max().unwrap_or(0);
            let hp = GbdtHyperparams {
                n_rounds: longest,
                ..lattice[members[0]].clone()
            };
            let (mut tx, mut ty, mut vx, mut vy) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
            for i in 0..x.len() {
                if assign[i] == f {
                    vx.push(x[i].clone());
                    vy.push(y[i]);
                } else {
                    tx.push(x[i].clone());
                    ty.push(y[i]);
                }
            }
            let model = train(&tx, &ty, feature_names, categories, &hp)?;
            members
                .iter()
                .map(|&m| {
                    let rounds = lattice[m].n_rounds;
                    let mut correct = 0;
                    for (row, &truth) in vx.iter().zip(&vy) {
                        if argmax(&model.predict_proba_at(row, rounds)?) == truth {
                            correct += 1;
                        }
                    }
                    Ok((m, correct))
                })
                .collect()
        })
        .collect();

    let mut fold_acc = vec![vec![0.0; folds]; lattice.len()];
    let fold_sizes: Vec<usize> = (0..folds).map(|f| assign.iter().filter(|&&a| a == f).count()).collect();
    for (job, res) in jobs.iter().zip(per_job) {
        for (m, correct) in res? {
            fold_acc[m][job.1] = correct as f64 / fold_sizes[job.1] as f64;
        }
    }
    let scores: Vec<f64> = fold_acc.iter().map(|a| a.iter().sum::<f64>() / folds as f64).collect();
    let mut best_index = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best_index] {
            best_index = i;
        }
    }
    Ok(GridSearchResult {
        best: lattice[best_index].clone(),
        best_index,
        scores,
    })
}
