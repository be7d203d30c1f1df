//! Leave-one-center-out evaluation.

mod manifest;

use std::collections::HashMap;
use std::path::Path;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{
    build_selection_report, correlation_filter, rfe_select, table_zscore, FeatureTable, SelectionReport,
};
use crate::fsutil::{write_atomic, write_json_atomic};
use crate::gbdt::{grid_search_cv, train, GbdtHyperparams, GbdtModel, GridSpec};
use crate::grid::scin::{read_image, read_mask};
use crate::label::Label;
use crate::metrics::MetricsReport;
use crate::radiomics::{canonical_names, extract_all, preprocess_case, ExtractionConfig};
use crate::rng::derive_seed;

pub use manifest::{split_lococv, CaseEntry, DatasetManifest, Fold};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaskSource {
    Physician,
    Predicted,
}

/// Scenario 1 trains and tests on physician masks; scenario 2 trains on
/// physician masks and tests on predicted masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "1")]
    Physician,
    #[serde(rename = "2")]
    Predicted,
}

impl Scenario {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Scenario::Physician),
            2 => Ok(Scenario::Predicted),
            other => Err(Error::InvalidArgument(format!("scenario must be 1 or 2, got {other}"))),
        }
    }

    pub fn test_masks(self) -> MaskSource {
        match self {
            Scenario::Physician => MaskSource::Physician,
            Scenario::Predicted => MaskSource::Predicted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LococvConfig {
    pub seed: u64,
    pub extraction: ExtractionConfig,
    pub correlation_threshold: f64,
    pub n_features: usize,
    /// Model used inside recursive feature elimination.
    pub rfe: GbdtHyperparams,
    pub grid: GridSpec,
    pub cv_folds: usize,
}

impl Default for LococvConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            extraction: ExtractionConfig::default(),
            correlation_threshold: 0.95,
            n_features: 10,
            rfe: GbdtHyperparams::default(),
            grid: GridSpec::default(),
            cv_folds: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionFailure {
    pub case_id: String,
    pub reason: String,
}

/// Reads, preprocesses and extracts every case with the chosen masks.
/// Failed cases are reported separately instead of aborting the run.
pub fn extract_manifest(
    manifest: &DatasetManifest,
    source: MaskSource,
    cfg: &ExtractionConfig,
) -> Result<(FeatureTable, Vec<ExtractionFailure>)> {
    cfg.validate()?;
    let results: Vec<Result<std::result::Result<Vec<f64>, String>>> = manifest
        .cases
        .par_iter()
        .map(|c| {
            let mask_path = match source {
                MaskSource::Physician => &c.physician_mask,
                MaskSource::Predicted => c.predicted_mask.as_ref().ok_or_else(|| {
                    Error::InvalidArgument(format!("case {} has no predicted mask", c.case_id))
                })?,
            };
            let img = read_image::<f64>(&manifest.resolve(&c.image))?;
            let mask = read_mask(&manifest.resolve(mask_path))?;
            let (img, mask) = preprocess_case(&img, &mask)?;
            match extract_all(&c.case_id, &img, &mask, cfg) {
                Ok(fv) => Ok(Ok(fv.values)),
                Err(e) => Ok(Err(e.to_string())),
            }
        })
        .collect();
    let mut table = FeatureTable::new(canonical_names().to_vec());
    let mut failures = Vec::new();
    for (c, r) in manifest.cases.iter().zip(results) {
        match r? {
            Ok(values) => table.push(&c.case_id, c.center_id, c.label, values)?,
            Err(reason) => failures.push(ExtractionFailure {
                case_id: c.case_id.clone(),
                reason,
            }),
        }
    }
    Ok((table, failures))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CasePrediction {
    pub case_id: String,
    pub label: Label,
    pub predicted: Label,
    pub probabilities: IndexMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub held_out_center: u32,
    pub n_train: usize,
    pub n_test: usize,
    pub excluded: Vec<ExtractionFailure>,
    pub constant_features: Vec<String>,
    pub correlation_survivors: usize,
    pub selected_features: Vec<String>,
    pub feature_importances: Vec<f64>,
    pub hyperparams: GbdtHyperparams,
    pub cv_accuracy: f64,
    pub metrics: MetricsReport,
    pub predictions: Vec<CasePrediction>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub result: FoldResult,
    pub model: GbdtModel,
}

/// Seed of the fold holding out `center`; independent of the other centers.
pub fn fold_seed(seed: u64, center: u32) -> u64 {
    derive_seed(&[seed, center as u64])
}

/// Everything a fold does after extraction: standardize on train, filter
/// correlated features, eliminate down to `n_features`, grid-search the
/// booster, refit and score the held-out center.
pub fn run_fold_on_tables(
    center: u32,
    train_table: &FeatureTable,
    test_table: &FeatureTable,
    cfg: &LococvConfig,
) -> Result<FoldOutcome> {
    if test_table.is_empty() {
        return Err(Error::Fold(format!("center {center} has no scorable test case")));
    }
    let seed = fold_seed(cfg.seed, center);
    let (train_z, test_z, zp) = table_zscore(train_table, test_table)?;
    let filtered = correlation_filter(&train_z, cfg.correlation_threshold)?;
    let train_f = train_z.select_columns(&filtered.kept)?;
    let k = cfg.n_features.min(filtered.kept.len());
    let rfe_hp = GbdtHyperparams { seed, ..cfg.rfe.clone() };
    let rfe = rfe_select(&train_f, k, &rfe_hp)?;

    let train_s = train_z.select_columns(&rfe.selected)?;
    let test_s = test_z.select_columns(&rfe.selected)?;
    let categories = Label::names();
    let y = train_s.label_indices();
    let lattice = cfg.grid.lattice(seed);
    let search = grid_search_cv(&train_s.values, &y, &rfe.selected, &categories, &lattice, cfg.cv_folds, seed)?;
    let model = train(&train_s.values, &y, &rfe.selected, &categories, &search.best)?;

    let probs: Vec<Vec<f64>> = test_s
        .values
        .iter()
        .map(|r| model.predict_proba(r))
        .collect::<Result<_>>()?;
    let truth = test_s.label_indices();
    let metrics = MetricsReport::compute(Some(center), &truth, &probs, &categories)?;
    let predictions = test_s
        .case_ids
        .iter()
        .zip(&test_s.labels)
        .zip(&probs)
        .map(|((id, &label), p)| CasePrediction {
            case_id: id.clone(),
            label,
            predicted: Label::from_index(crate::gbdt::argmax(p)).expect("three categories"),
            probabilities: categories.iter().cloned().zip(p.iter().copied()).collect(),
        })
        .collect();
    Ok(FoldOutcome {
        result: FoldResult {
            held_out_center: center,
            n_train: train_table.len(),
            n_test: test_table.len(),
            excluded: Vec::new(),
            constant_features: zp.constant,
            correlation_survivors: filtered.kept.len(),
            selected_features: rfe.selected,
            feature_importances: model.feature_importance_normalized(),
            hyperparams: search.best,
            cv_accuracy: search.scores[search.best_index],
            metrics,
            predictions,
        },
        model,
    })
}

/// Runs every leave-one-center-out fold of a scenario from pre-extracted
/// tables: `train_source` supplies training rows and `test_source` the
/// held-out rows.
pub fn run_folds(
    manifest: &DatasetManifest,
    train_source: &(FeatureTable, Vec<ExtractionFailure>),
    test_source: &(FeatureTable, Vec<ExtractionFailure>),
    cfg: &LococvConfig,
) -> Result<Vec<FoldOutcome>> {
    let folds = split_lococv(manifest)?;
    let center_of: HashMap<&str, u32> = manifest
        .cases
        .iter()
        .map(|c| (c.case_id.as_str(), c.center_id))
        .collect();
    folds
        .par_iter()
        .map(|fold| {
            let c = fold.held_out_center;
            let in_test = |id: &str| center_of.get(id) == Some(&c);
            let train_t = train_source.0.filter_rows(|r| !in_test(&train_source.0.case_ids[r]));
            let test_t = test_source.0.filter_rows(|r| in_test(&test_source.0.case_ids[r]));
            let mut out = run_fold_on_tables(c, &train_t, &test_t, cfg)?;
            out.result.excluded = train_source
                .1
                .iter()
                .filter(|f| !in_test(&f.case_id))
                .chain(test_source.1.iter().filter(|f| in_test(&f.case_id)))
                .cloned()
                .collect();
            Ok(out)
        })
        .collect()
}

/// Extracts features and runs all folds of `scenario`.
pub fn run_scenario(manifest: &DatasetManifest, scenario: Scenario, cfg: &LococvConfig) -> Result<Vec<FoldOutcome>> {
    let physician = extract_manifest(manifest, MaskSource::Physician, &cfg.extraction)?;
    match scenario.test_masks() {
        MaskSource::Physician => run_folds(manifest, &physician, &physician, cfg),
        MaskSource::Predicted => {
            let predicted = extract_manifest(manifest, MaskSource::Predicted, &cfg.extraction)?;
            run_folds(manifest, &physician, &predicted, cfg)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
    /// Folds where the metric was defined.
    pub n: usize,
}

impl MeanSd {
    /// Sample standard deviation (divisor n - 1); a single value has sd 0.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, sd, n: values.len() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub center_id: u32,
    pub n_test: usize,
    pub excluded: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub macro_roc_auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_folds: usize,
    pub folds: Vec<FoldSummary>,
    /// `accuracy` plus `<scope>.<metric>` for every class and average.
    pub metrics: IndexMap<String, MeanSd>,
}

const METRIC_NAMES: [&str; 5] = ["precision", "recall", "f1", "roc_auc", "prc_auc"];

/// Mean and sample sd of every metric across folds, plus the feature
/// selection tally. Folds are ordered by center first, so the result does not
/// depend on the order of `results`.
pub fn aggregate(results: &[FoldResult]) -> Result<(Summary, SelectionReport)> {
    if results.is_empty() {
        return Err(Error::InvalidArgument("nothing to aggregate".into()));
    }
    let mut sorted: Vec<&FoldResult> = results.iter().collect();
    sorted.sort_by_key(|r| r.held_out_center);

    let mut keys = vec!["accuracy".to_string()];
    let scopes: Vec<String> = sorted[0]
        .metrics
        .per_class
        .keys()
        .chain(sorted[0].metrics.averages.keys())
        .cloned()
        .collect();
    for s in &scopes {
        for m in METRIC_NAMES {
            keys.push(format!("{s}.{m}"));
        }
    }
    let mut metrics = IndexMap::new();
    for key in keys {
        let (scope, metric) = key.split_once('.').unwrap_or(("", key.as_str()));
        let mut vals = Vec::new();
        for r in &sorted {
            if let Some(v) = r.metrics.metric(metric, scope)? {
                vals.push(v);
            }
        }
        if let Some(ms) = MeanSd::of(&vals) {
            metrics.insert(key.clone(), ms);
        }
    }
    let folds = sorted
        .iter()
        .map(|r| FoldSummary {
            center_id: r.held_out_center,
            n_test: r.n_test,
            excluded: r.excluded.len(),
            accuracy: r.metrics.accuracy,
            macro_f1: r.metrics.averages["macro"].f1,
            macro_roc_auc: r.metrics.averages["macro"].roc_auc,
        })
        .collect();
    let selections: Vec<(Vec<String>, Vec<f64>)> = sorted
        .iter()
        .map(|r| (r.selected_features.clone(), r.feature_importances.clone()))
        .collect();
    Ok((
        Summary {
            n_folds: sorted.len(),
            folds,
            metrics,
        },
        build_selection_report(&selections)?,
    ))
}

/// Writes `fold_<center>.json`, `model_<center>.json`, `summary.json` and
/// `selection_report.json` into `dir`.
pub fn write_outputs(dir: &Path, outcomes: &[FoldOutcome]) -> Result<(Summary, SelectionReport)> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for o in outcomes {
        let c = o.result.held_out_center;
        write_json_atomic(&dir.join(format!("fold_{c:02}.json")), &o.result)?;
        let mut model = o.model.to_json()?;
        model.push('\n');
        write_atomic(&dir.join(format!("model_{c:02}.json")), model.as_bytes())?;
    }
    let results: Vec<FoldResult> = outcomes.iter().map(|o| o.result.clone()).collect();
    let (summary, selection) = aggregate(&results)?;
    write_json_atomic(&dir.join("summary.json"), &summary)?;
    write_json_atomic(&dir.join("selection_report.json"), &selection)?;
    Ok((summary, selection))
}
