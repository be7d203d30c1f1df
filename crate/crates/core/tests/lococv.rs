mod support;

use std::path::Path;

use thyroidiomics::gbdt::GridSpec;
use thyroidiomics::label::Label;
use thyroidiomics::lococv::{
    aggregate, extract_manifest, run_fold_on_tables, run_folds, run_scenario, split_lococv, write_outputs,
    CaseEntry, DatasetManifest, LococvConfig, MaskSource, MeanSd, Scenario,
};
use thyroidiomics::phantom::{generate_dataset, PhantomSpec};
use thyroidiomics::Error;

use support::tree::{assert_same_tree, read_tree};

fn small_dataset(dir: &Path) -> DatasetManifest {
    let spec = PhantomSpec {
        centers: 3,
        per_center: [6, 6, 6],
        large_center: Some(2),
        ..PhantomSpec::default()
    };
    generate_dataset(&spec, dir).unwrap()
}

fn quick_config() -> LococvConfig {
    LococvConfig {
        seed: 11,
        grid: GridSpec {
            n_rounds: vec![10, 20],
            max_depth: vec![2],
            learning_rate: vec![0.3],
            ..GridSpec::default()
        },
        ..LococvConfig::default()
    }
}

fn entry(id: &str, center: u32) -> CaseEntry {
    CaseEntry {
        case_id: id.into(),
        center_id: center,
        label: Label::Th,
        image: "i.json".into(),
        physician_mask: "m.json".into(),
        predicted_mask: None,
    }
}

#[test]
fn split_partitions_by_center() {
    let m = DatasetManifest::new(
        vec![entry("a", 3), entry("b", 1), entry("c", 3), entry("d", 2)],
        "",
    );
    let folds = split_lococv(&m).unwrap();
    assert_eq!(folds.iter().map(|f| f.held_out_center).collect::<Vec<_>>(), vec![1, 2, 3]);
    for f in &folds {
        assert_eq!(f.train.len() + f.test.len(), 4);
        assert!(f.train.iter().all(|id| !f.test.contains(id)));
    }
    assert_eq!(folds[2].test, vec!["a", "c"]);

    let one = DatasetManifest::new(vec![entry("a", 1), entry("b", 1)], "");
    assert!(matches!(split_lococv(&one), Err(Error::Fold(_))));
}

#[test]
fn manifest_validation() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("i.json"), "{}").unwrap();
    std::fs::write(dir.path().join("m.json"), "{}").unwrap();
    let path = dir.path().join("manifest.json");

    DatasetManifest::new(vec![entry("a", 1), entry("b", 2)], dir.path()).save(&path).unwrap();
    let loaded = DatasetManifest::load(&path).unwrap();
    assert_eq!(loaded.cases.len(), 2);
    assert_eq!(loaded.root, dir.path());

    DatasetManifest::new(vec![entry("a", 1), entry("a", 2)], dir.path()).save(&path).unwrap();
    assert!(matches!(DatasetManifest::load(&path), Err(Error::Schema { .. })));

    DatasetManifest::new(vec![entry("a", 0)], dir.path()).save(&path).unwrap();
    assert!(matches!(DatasetManifest::load(&path), Err(Error::Schema { .. })));

    let mut e = entry("a", 1);
    e.predicted_mask = Some("missing.json".into());
    DatasetManifest::new(vec![e], dir.path()).save(&path).unwrap();
    assert!(matches!(DatasetManifest::load(&path), Err(Error::Io { .. })));
}

#[test]
fn mean_sd_uses_sample_divisor() {
    let ms = MeanSd::of(&[1.0, 2.0, 3.0, 4.0]).unwrap();
    assert_eq!(ms.mean, 2.5);
    assert!((ms.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    assert_eq!(MeanSd::of(&[0.7]).unwrap().sd, 0.0);
    assert!(MeanSd::of(&[]).is_none());
}

#[test]
fn pipeline_end_to_end_on_small_phantom() {
    let dir = tempfile::tempdir().unwrap();
    let m = small_dataset(dir.path());
    let cfg = quick_config();
    let outcomes = run_scenario(&m, Scenario::Physician, &cfg).unwrap();
    assert_eq!(outcomes.len(), 3);
    for o in &outcomes {
        let r = &o.result;
        assert_eq!(r.n_test, 18);
        assert_eq!(r.n_train, 36);
        assert_eq!(r.selected_features.len(), 10);
        assert_eq!(r.predictions.len(), 18);
        assert!(r.predictions.iter().all(|p| p.case_id.starts_with(&format!("c{:02}", r.held_out_center))));
        let s: f64 = r.predictions[0].probabilities.values().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(o.model.feature_names, r.selected_features);
    }

    // Aggregation does not depend on fold order.
    let results: Vec<_> = outcomes.iter().map(|o| o.result.clone()).collect();
    let mut reversed = results.clone();
    reversed.reverse();
    let (s1, r1) = aggregate(&results).unwrap();
    let (s2, r2) = aggregate(&reversed).unwrap();
    assert_eq!(serde_json::to_string(&s1).unwrap(), serde_json::to_string(&s2).unwrap());
    assert_eq!(r1, r2);
    assert_eq!(s1.n_folds, 3);
    assert_eq!(r1.n_folds, 3);
    assert!(s1.metrics.contains_key("accuracy"));
    assert!(s1.metrics.contains_key("macro.roc_auc"));
    assert!(s1.metrics.contains_key("DG.f1"));

    let out = dir.path().join("results");
    write_outputs(&out, &outcomes).unwrap();
    for f in ["summary.json", "selection_report.json", "fold_01.json", "model_03.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
}

#[test]
fn test_center_values_do_not_reach_training() {
    let dir = tempfile::tempdir().unwrap();
    let m = small_dataset(dir.path());
    let cfg = quick_config();
    let (table, failures) = extract_manifest(&m, MaskSource::Physician, &cfg.extraction).unwrap();
    assert!(failures.is_empty());
    let train = table.filter_rows(|r| table.centers[r] != 2);
    let test = table.filter_rows(|r| table.centers[r] == 2);
    let a = run_fold_on_tables(2, &train, &test, &cfg).unwrap();

    let mut scrambled = test.clone();
    for (i, row) in scrambled.values.iter_mut().enumerate() {
        for v in row.iter_mut() {
            *v = *v * -3.0 + i as f64;
        }
    }
    let b = run_fold_on_tables(2, &train, &scrambled, &cfg).unwrap();
    assert_eq!(a.model.to_json().unwrap(), b.model.to_json().unwrap());
    assert_eq!(a.result.selected_features, b.result.selected_features);
    assert_eq!(a.result.hyperparams, b.result.hyperparams);
    assert_eq!(a.result.constant_features, b.result.constant_features);
    assert_eq!(a.result.cv_accuracy, b.result.cv_accuracy);
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let m = small_dataset(dir.path());
    let cfg = quick_config();
    let run = |threads: usize, out: &Path| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let t = extract_manifest(&m, MaskSource::Physician, &cfg.extraction).unwrap();
            let o = run_folds(&m, &t, &t, &cfg).unwrap();
            write_outputs(out, &o).unwrap();
        });
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run(1, &a);
    run(3, &b);
    assert_same_tree(&read_tree(&a), &read_tree(&b));
}

#[test]
fn predicted_scenario_needs_predicted_masks() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = small_dataset(dir.path());
    m.cases[0].predicted_mask = None;
    let err = run_scenario(&m, Scenario::Predicted, &quick_config()).unwrap_err();
    assert!(err.to_string().contains(&m.cases[0].case_id), "{err}");
    assert!(Scenario::from_number(3).is_err());
}
