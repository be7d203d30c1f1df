mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use thyroidiomics::augment::{random_affine, sample_patch, AugmentConfig};
use thyroidiomics::features::{correlation_filter, rfe_select, table_zscore, DroppedFeature, FeatureTable};
use thyroidiomics::fsutil::{read_json, write_atomic, write_json_atomic};
use thyroidiomics::gbdt::{grid_search_cv, train, GbdtHyperparams, GbdtModel, GridSpec};
use thyroidiomics::grid::scin::{read_image, read_mask, write_image_f32, write_mask};
use thyroidiomics::label::Label;
use thyroidiomics::lococv::{
    extract_manifest, run_scenario, write_outputs, CasePrediction, DatasetManifest, FoldResult, LococvConfig,
    MaskSource, Scenario,
};
use thyroidiomics::metrics::{tost_paired, MetricsReport};
use thyroidiomics::phantom::{generate_dataset, PhantomSpec};
use thyroidiomics::radiomics::ExtractionConfig;
use thyroidiomics::seg_eval::{dsc, roi_counts};
use thyroidiomics::Error;

use config::{apply_overrides, record_path, write_run_record};

#[derive(Parser)]
#[command(name = "thyroidiomics", version, about = "Thyroid scintigraphy radiomics pipeline")]
struct Cli {
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// JSON file whose keys override the flag values of the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Progress messages on stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SeedArg {
    /// Falls back to THYROIDIOMICS_SEED, then to the subcommand default.
    #[arg(long, env = "THYROIDIOMICS_SEED")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic multi-center phantom dataset.
    Phantom {
        #[arg(long, default_value_t = 9)]
        centers: u32,
        /// Cases per center for MNG,TH,DG.
        #[arg(long, default_value = "20,20,20", value_parser = parse_per_center)]
        per_center: [usize; 3],
        #[arg(long, default_value_t = 128)]
        image_size: usize,
        /// Center imaged at double resolution; 0 disables it.
        #[arg(long, default_value_t = 5)]
        large_center: u32,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract the 93 radiomics features of every manifest case into a CSV.
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_enum, default_value = "physician")]
        mask_source: SourceArg,
        #[arg(long, default_value_t = 0.3)]
        bin_width: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Correlation filter followed by recursive feature elimination.
    Select {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value_t = 0.95)]
        threshold: f64,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a boosted-tree classifier on a feature CSV.
    Train {
        #[arg(long)]
        features: PathBuf,
        /// selection.json from `select`; restricts training to its features.
        #[arg(long)]
        selection: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        n_rounds: usize,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
        #[arg(long, default_value_t = 0.1)]
        learning_rate: f64,
        #[arg(long, default_value_t = 1.0)]
        l2_reg: f64,
        /// Pick hyperparameters by stratified cross-validated grid search.
        #[arg(long)]
        grid_search: bool,
        #[arg(long, default_value_t = 5)]
        cv_folds: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply a trained model to a feature CSV.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        /// Also write a metrics report against the CSV labels.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        center: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Leave-one-center-out evaluation of the full pipeline.
    Lococv {
        #[arg(long)]
        manifest: PathBuf,
        /// 1 = physician masks for testing, 2 = predicted masks for testing.
        #[arg(long, default_value_t = 1)]
        scenario: u8,
        #[arg(long, default_value_t = 0.95)]
        threshold: f64,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 5)]
        cv_folds: usize,
        #[arg(long, default_value_t = 0.3)]
        bin_width: f64,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dice similarity coefficient of two masks.
    Dsc {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
    },
    /// Total counts inside each case's mask, as CSV.
    RoiCounts {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_enum, default_value = "physician")]
        mask_source: SourceArg,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Paired two one-sided tests between two lists of per-fold reports.
    Tost {
        /// Report files, or result directories holding fold_*.json.
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        a: Vec<PathBuf>,
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        b: Vec<PathBuf>,
        #[arg(long, default_value = "f1")]
        metric: String,
        /// MNG, TH, DG, micro, macro or weighted.
        #[arg(long = "class", default_value = "macro")]
        scope: String,
        #[arg(long, default_value_t = 0.05)]
        margin: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write augmented training patches for visual inspection.
    AugmentPreview {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        #[arg(long, default_value_t = 4)]
        n: u64,
        #[arg(long, default_value_t = 64)]
        patch_size: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SourceArg {
    Physician,
    Predicted,
}

impl From<SourceArg> for MaskSource {
    fn from(s: SourceArg) -> Self {
        match s {
            SourceArg::Physician => MaskSource::Physician,
            SourceArg::Predicted => MaskSource::Predicted,
        }
    }
}

fn parse_per_center(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected three comma-separated counts (MNG,TH,DG)".into());
    }
    let mut out = [0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.trim().parse().map_err(|e| format!("{p:?}: {e}"))?;
    }
    Ok(out)
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

/// Parameter checks run before anything touches the disk; a failure there is
/// reported as a usage error.
fn check(r: Result<(), Error>) -> Result<(), Failure> {
    r.map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("usage error: --workers must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    }
    let ctx = Ctx {
        config: cli.config,
        verbose: cli.verbose,
    };
    match run(&ctx, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

struct Ctx {
    config: Option<PathBuf>,
    verbose: u8,
}

impl Ctx {
    fn resolve<C: Serialize + serde::de::DeserializeOwned>(&self, base: C) -> Result<C, Error> {
        apply_overrides(base, self.config.as_deref())
    }

    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose > 0 {
            eprintln!("{}", msg.as_ref());
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ExtractRun {
    mask_source: MaskSource,
    extraction: ExtractionConfig,
}

#[derive(Serialize, Deserialize)]
struct SelectRun {
    threshold: f64,
    k: usize,
    rfe: GbdtHyperparams,
}

#[derive(Serialize, Deserialize)]
struct Selection {
    kept: Vec<String>,
    dropped: Vec<DroppedFeature>,
    selected: Vec<String>,
    importances: Vec<f64>,
    eliminated: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct TrainRun {
    hyperparams: GbdtHyperparams,
    grid_search: bool,
    grid: GridSpec,
    cv_folds: usize,
}

#[derive(Serialize, Deserialize)]
struct LococvRun {
    scenario: u8,
    lococv: LococvConfig,
}

#[derive(Serialize, Deserialize)]
struct TostRun {
    metric: String,
    scope: String,
    margin: f64,
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
struct AugmentRun {
    n: u64,
    augment: AugmentConfig,
}

#[derive(Serialize)]
struct Predictions {
    predictions: Vec<CasePrediction>,
}

fn run(ctx: &Ctx, command: Command) -> Result<(), Failure> {
    match command {
        Command::Phantom {
            centers,
            per_center,
            image_size,
            large_center,
            seed,
            out,
        } => {
            let spec = ctx.resolve(PhantomSpec {
                centers,
                per_center,
                image_size,
                large_center: (large_center > 0).then_some(large_center),
                seed: seed.seed.unwrap_or(7),
                ..PhantomSpec::default()
            })?;
            check(spec.validate())?;
            let m = generate_dataset(&spec, &out)?;
            write_run_record(&record_path(&out, true), "phantom", Some(spec.seed), &spec, vec![])?;
            ctx.log(format!("wrote {} cases to {}", m.cases.len(), out.display()));
        }
        Command::Extract {
            manifest,
            mask_source,
            bin_width,
            out,
        } => {
            let cfg = ctx.resolve(ExtractRun {
                mask_source: mask_source.into(),
                extraction: ExtractionConfig {
                    bin_width,
                    ..ExtractionConfig::default()
                },
            })?;
            check(cfg.extraction.validate())?;
            let m = DatasetManifest::load(&manifest)?;
            let (table, failures) = extract_manifest(&m, cfg.mask_source, &cfg.extraction)?;
            for f in &failures {
                eprintln!("warning: excluded {}: {}", f.case_id, f.reason);
            }
            table.write_csv(&out)?;
            let excluded = failures.into_iter().map(|f| f.case_id).collect();
            write_run_record(&record_path(&out, false), "extract", None, &cfg, excluded)?;
            ctx.log(format!("extracted {} cases", table.len()));
        }
        Command::Select {
            features,
            threshold,
            k,
            seed,
            out,
        } => {
            let cfg = ctx.resolve(SelectRun {
                threshold,
                k,
                rfe: GbdtHyperparams {
                    seed: seed.seed.unwrap_or(0),
                    ..GbdtHyperparams::default()
                },
            })?;
            check(validate_select(&cfg))?;
            let table = FeatureTable::read_csv(&features)?;
            let (z, _, _) = table_zscore(&table, &table)?;
            let filtered = correlation_filter(&z, cfg.threshold)?;
            let z = z.select_columns(&filtered.kept)?;
            let rfe = rfe_select(&z, cfg.k.min(filtered.kept.len()), &cfg.rfe)?;
            let sel = Selection {
                kept: filtered.kept,
                dropped: filtered.dropped,
                selected: rfe.selected,
                importances: rfe.importances,
                eliminated: rfe.eliminated,
            };
            write_json_atomic(&out, &sel)?;
            write_run_record(&record_path(&out, false), "select", Some(cfg.rfe.seed), &cfg, vec![])?;
            ctx.log(format!("selected {} of {} features", sel.selected.len(), table.columns.len()));
        }
        Command::Train {
            features,
            selection,
            n_rounds,
            max_depth,
            learning_rate,
            l2_reg,
            grid_search,
            cv_folds,
            seed,
            out,
        } => {
            let seed = seed.seed.unwrap_or(0);
            let cfg = ctx.resolve(TrainRun {
                hyperparams: GbdtHyperparams {
                    n_rounds,
                    max_depth,
                    learning_rate,
                    l2_reg,
                    seed,
                    ..GbdtHyperparams::default()
                },
                grid_search,
                grid: GridSpec::default(),
                cv_folds,
            })?;
            check(cfg.hyperparams.validate())?;
            if cfg.cv_folds < 2 {
                return Err(Failure::Usage("cv_folds must be at least 2".into()));
            }
            let mut table = FeatureTable::read_csv(&features)?;
            if let Some(p) = &selection {
                let sel: Selection = read_json(p)?;
                table = table.select_columns(&sel.selected)?;
            }
            let y = table.label_indices();
            let cats = Label::names();
            let hp = if cfg.grid_search {
                let lattice = cfg.grid.lattice(cfg.hyperparams.seed);
                grid_search_cv(&table.values, &y, &table.columns, &cats, &lattice, cfg.cv_folds, cfg.hyperparams.seed)?
                    .best
            } else {
                cfg.hyperparams.clone()
            };
            let model = train(&table.values, &y, &table.columns, &cats, &hp)?;
            let mut json = model.to_json()?;
            json.push('\n');
            write_atomic(&out, json.as_bytes())?;
            write_run_record(&record_path(&out, false), "train", Some(cfg.hyperparams.seed), &cfg, vec![])?;
            ctx.log(format!("trained {} rounds on {} cases", hp.n_rounds, table.len()));
        }
        Command::Predict {
            model,
            features,
            report,
            center,
            out,
        } => {
            let text = std::fs::read_to_string(&model).map_err(|e| Error::Io {
                path: model.clone(),
                source: e,
            })?;
            let model = GbdtModel::from_json(&text).map_err(|e| Error::Schema {
                path: model.clone(),
                reason: e.to_string(),
            })?;
            let table = FeatureTable::read_csv(&features)?.select_columns(&model.feature_names)?;
            let probs: Vec<Vec<f64>> = table
                .values
                .iter()
                .map(|r| model.predict_proba(r))
                .collect::<Result<_, _>>()?;
            let predictions = table
                .case_ids
                .iter()
                .zip(&table.labels)
                .zip(&probs)
                .map(|((id, &label), p)| CasePrediction {
                    case_id: id.clone(),
                    label,
                    predicted: Label::from_index(thyroidiomics::gbdt::argmax(p)).expect("three categories"),
                    probabilities: model.categories.iter().cloned().zip(p.iter().copied()).collect(),
                })
                .collect();
            write_json_atomic(&out, &Predictions { predictions })?;
            if let Some(rp) = report {
                let r = MetricsReport::compute(center, &table.label_indices(), &probs, &model.categories)?;
                write_json_atomic(&rp, &r)?;
            }
        }
        Command::Lococv {
            manifest,
            scenario,
            threshold,
            k,
            cv_folds,
            bin_width,
            seed,
            out,
        } => {
            let cfg = ctx.resolve(LococvRun {
                scenario,
                lococv: LococvConfig {
                    seed: seed.seed.unwrap_or(0),
                    extraction: ExtractionConfig {
                        bin_width,
                        ..ExtractionConfig::default()
                    },
                    correlation_threshold: threshold,
                    n_features: k,
                    cv_folds,
                    ..LococvConfig::default()
                },
            })?;
            let sc = Scenario::from_number(cfg.scenario).map_err(|e| Failure::Usage(e.to_string()))?;
            check(validate_lococv(&cfg.lococv))?;
            let m = DatasetManifest::load(&manifest)?;
            ctx.log(format!("scenario {}: {} cases, {} centers", cfg.scenario, m.cases.len(), m.centers().len()));
            let outcomes = run_scenario(&m, sc, &cfg.lococv)?;
            let (summary, _) = write_outputs(&out, &outcomes)?;
            let mut excluded: Vec<String> = outcomes
                .iter()
                .flat_map(|o| o.result.excluded.iter().map(|f| f.case_id.clone()))
                .collect();
            excluded.sort();
            excluded.dedup();
            write_run_record(&record_path(&out, true), "lococv", Some(cfg.lococv.seed), &cfg, excluded)?;
            for f in &summary.folds {
                ctx.log(format!(
                    "center {:>2}: accuracy {:.3}  macro F1 {:.3}",
                    f.center_id, f.accuracy, f.macro_f1
                ));
            }
        }
        Command::Dsc { pred, gt } => {
            let d = dsc(&read_mask(&pred)?, &read_mask(&gt)?)?;
            println!("{d}");
        }
        Command::RoiCounts {
            manifest,
            mask_source,
            out,
        } => {
            let source: MaskSource = ctx.resolve(MaskSource::from(mask_source))?;
            let m = DatasetManifest::load(&manifest)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["case_id", "pathology", "counts"]).map_err(Error::from)?;
            for c in &m.cases {
                let mask_path = match source {
                    MaskSource::Physician => &c.physician_mask,
                    MaskSource::Predicted => c.predicted_mask.as_ref().ok_or_else(|| {
                        Error::InvalidArgument(format!("case {} has no predicted mask", c.case_id))
                    })?,
                };
                let img = read_image::<f64>(&m.resolve(&c.image))?;
                let mask = read_mask(&m.resolve(mask_path))?;
                let n = roi_counts(&img, &mask)?;
                w.write_record([c.case_id.as_str(), c.label.as_str(), &n.to_string()])
                    .map_err(Error::from)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
            match out {
                Some(p) => {
                    write_atomic(&p, &bytes)?;
                    write_run_record(&record_path(&p, false), "roi-counts", None, &source, vec![])?;
                }
                None => print!("{}", String::from_utf8_lossy(&bytes)),
            }
        }
        Command::Tost {
            a,
            b,
            metric,
            scope,
            margin,
            alpha,
            out,
        } => {
            let cfg = ctx.resolve(TostRun {
                metric,
                scope,
                margin,
                alpha,
            })?;
            if !(cfg.margin > 0.0) || !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
                return Err(Failure::Usage("margin must be positive and alpha in (0, 1)".into()));
            }
            let ra = load_reports(&a)?;
            let rb = load_reports(&b)?;
            let (va, vb) = paired_metric(&ra, &rb, &cfg.metric, &cfg.scope)?;
            let res = tost_paired(&va, &vb, cfg.margin, cfg.alpha)?;
            let text = serde_json::to_string_pretty(&res).map_err(Error::from)?;
            println!("{text}");
            if let Some(p) = out {
                write_json_atomic(&p, &res)?;
                write_run_record(&record_path(&p, false), "tost", None, &cfg, vec![])?;
            }
        }
        Command::AugmentPreview {
            image,
            mask,
            n,
            patch_size,
            seed,
            out,
        } => {
            let cfg = ctx.resolve(AugmentRun {
                n,
                augment: AugmentConfig {
                    patch_size,
                    seed: seed.seed.unwrap_or(0),
                    ..AugmentConfig::default()
                },
            })?;
            check(cfg.augment.validate())?;
            let img = read_image::<f64>(&image)?;
            let msk = read_mask(&mask)?;
            for i in 0..cfg.n {
                let (pi, pm) = sample_patch(&img, &msk, &cfg.augment, i)?;
                let (ai, am) = random_affine(&pi, &pm, &cfg.augment, i)?;
                write_image_f32(&out.join(format!("patch_{i:03}.json")), &ai)?;
                write_mask(&out.join(format!("patch_{i:03}_mask.json")), &am)?;
            }
            write_run_record(&record_path(&out, true), "augment-preview", Some(cfg.augment.seed), &cfg, vec![])?;
        }
    }
    Ok(())
}

fn validate_select(cfg: &SelectRun) -> Result<(), Error> {
    if !(cfg.threshold > 0.0 && cfg.threshold <= 1.0) {
        return Err(Error::InvalidArgument(format!("threshold must lie in (0, 1], got {}", cfg.threshold)));
    }
    if cfg.k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    cfg.rfe.validate()
}

fn validate_lococv(cfg: &LococvConfig) -> Result<(), Error> {
    validate_select(&SelectRun {
        threshold: cfg.correlation_threshold,
        k: cfg.n_features,
        rfe: cfg.rfe.clone(),
    })?;
    if cfg.cv_folds < 2 {
        return Err(Error::InvalidArgument("cv_folds must be at least 2".into()));
    }
    cfg.extraction.validate()
}

/// Reads metrics reports from files, accepting bare reports and fold results;
/// a directory contributes its `fold_*.json` files in name order.
fn load_reports(paths: &[PathBuf]) -> Result<Vec<MetricsReport>, Error> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| Error::Io {
                    path: p.clone(),
                    source: e,
                })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| is_fold_file(f))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    files
        .iter()
        .map(|f| {
            let v: serde_json::Value = read_json(f)?;
            let parsed = if v.get("metrics").is_some() {
                serde_json::from_value::<FoldResult>(v).map(|r| r.metrics)
            } else {
                serde_json::from_value::<MetricsReport>(v)
            };
            parsed.map_err(|e| Error::Schema {
                path: f.clone(),
                reason: e.to_string(),
            })
        })
        .collect()
}

fn is_fold_file(p: &Path) -> bool {
    p.file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n.starts_with("fold_") && n.ends_with(".json"))
}

/// Pairs reports by center when every report names one, otherwise by position.
fn paired_metric(
    a: &[MetricsReport],
    b: &[MetricsReport],
    metric: &str,
    scope: &str,
) -> Result<(Vec<f64>, Vec<f64>), Error> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!("{} reports against {}", a.len(), b.len())));
    }
    let mut pairs: Vec<(&MetricsReport, &MetricsReport)> = Vec::with_capacity(a.len());
    if a.iter().chain(b).all(|r| r.center_id.is_some()) {
        for ra in a {
            let rb = b
                .iter()
                .find(|r| r.center_id == ra.center_id)
                .ok_or_else(|| Error::InvalidArgument(format!("center {:?} missing from --b", ra.center_id)))?;
            pairs.push((ra, rb));
        }
    } else {
        pairs.extend(a.iter().zip(b));
    }
    let mut va = Vec::new();
    let mut vb = Vec::new();
    for (ra, rb) in pairs {
        // Folds where the metric is undefined on either side are skipped.
        if let (Some(x), Some(y)) = (ra.metric(metric, scope)?, rb.metric(metric, scope)?) {
            va.push(x);
            vb.push(y);
        }
    }
    Ok((va, vb))
}
