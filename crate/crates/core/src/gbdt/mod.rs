//! Multiclass gradient-boosted decision trees with a softmax objective.

mod search;
mod train;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use search::{grid_search_cv, stratified_folds, GridSearchResult, GridSpec};
pub use train::train;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbdtHyperparams {
    pub n_rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    /// L2 penalty on leaf weights (lambda).
    pub l2_reg: f64,
    /// Minimum loss reduction for a split (gamma).
    pub min_split_gain: f64,
    /// Minimum hessian sum on each side of a split.
    pub min_child_weight: f64,
    pub seed: u64,
}

impl Default for GbdtHyperparams {
    fn default() -> Self {
        Self {
            n_rounds: 50,
            max_depth: 3,
            learning_rate: 0.1,
            l2_reg: 1.0,
            min_split_gain: 0.0,
            min_child_weight: 1.0,
            seed: 0,
        }
    }
}

impl GbdtHyperparams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.max_depth < 1 {
            return bad("max_depth must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad("learning_rate must lie in (0, 1]");
        }
        if !(self.l2_reg >= 0.0) || !(self.min_split_gain >= 0.0) || !(self.min_child_weight >= 0.0) {
            return bad("l2_reg, min_split_gain and min_child_weight must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        weight: f64,
    },
    Split {
        feature: usize,
        /// Samples with `x[feature] < threshold` go left.
        threshold: f64,
        gain: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut n = self;
        loop {
            match n {
                Node::Leaf { weight } => return *weight,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => n = if x[*feature] < *threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn add_gains(&self, acc: &mut [f64]) {
        if let Node::Split {
            feature,
            gain,
            left,
            right,
            ..
        } = self
        {
            acc[*feature] += gain;
            left.add_gains(acc);
            right.add_gains(acc);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub feature_names: Vec<String>,
    pub categories: Vec<String>,
    pub base_score: f64,
    pub hyperparams: GbdtHyperparams,
    /// `trees[round][category]`.
    pub trees: Vec<Vec<Node>>,
}

pub(crate) fn softmax_in_place(z: &mut [f64]) {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for v in z.iter_mut() {
        *v = (*v - m).exp();
        s += *v;
    }
    for v in z.iter_mut() {
        *v /= s;
    }
}

impl GbdtModel {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_categories(&self) -> usize {
        self.categories.len()
    }

    pub fn n_rounds(&self) -> usize {
        self.trees.len()
    }

    /// Raw per-category scores after the first `rounds` boosting rounds.
    pub fn margins_at(&self, x: &[f64], rounds: usize) -> Result<Vec<f64>> {
        if x.len() != self.n_features() {
            return Err(Error::InvalidArgument(format!(
                "row has {} features, model expects {}",
                x.len(),
                self.n_features()
            )));
        }
        let mut z = vec![self.base_score; self.n_categories()];
        for round in self.trees.iter().take(rounds) {
            for (zk, tree) in z.iter_mut().zip(round) {
                *zk += tree.eval(x);
            }
        }
        Ok(z)
    }

    pub fn predict_proba_at(&self, x: &[f64], rounds: usize) -> Result<Vec<f64>> {
        let mut z = self.margins_at(x, rounds)?;
        softmax_in_place(&mut z);
        Ok(z)
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.predict_proba_at(x, self.n_rounds())
    }

    /// Arg-max category index; ties go to the lower index.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax(&self.predict_proba(x)?))
    }

    /// Total split gain per feature, in feature order.
    pub fn feature_importance(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.n_features()];
        for round in &self.trees {
            for tree in round {
                tree.add_gains(&mut acc);
            }
        }
        acc
    }

    /// Importances scaled to sum to one; all zeros when the model never splits.
    pub fn feature_importance_normalized(&self) -> Vec<f64> {
        let raw = self.feature_importance();
        let total: f64 = raw.iter().sum();
        if total > 0.0 {
            raw.iter().map(|g| g / total).collect()
        } else {
            raw
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in p.iter().enumerate() {
        if v > p[best] {
            best = i;
        }
    }
    best
}
