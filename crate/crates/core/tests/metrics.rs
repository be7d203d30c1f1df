use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thyroidiomics::metrics::{
    classwise_and_averaged, confusion, multiclass_auc, prc_auc, roc_auc, student_t_cdf, tost_paired, Curve,
    MetricsReport,
};

fn ab() -> Vec<String> {
    vec!["A".into(), "B".into()]
}

/// Pairwise concordance, straight from the definition.
fn roc_oracle(s: &[f64], t: &[bool]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..s.len() {
        for j in 0..s.len() {
            if t[i] && !t[j] {
                den += 1.0;
                if s[i] > s[j] {
                    num += 1.0;
                } else if s[i] == s[j] {
                    num += 0.5;
                }
            }
        }
    }
    num / den
}

#[test]
fn confusion_examples() {
    let cm = confusion(&[0, 0, 1], &[0, 1, 1], &ab()).unwrap();
    assert_eq!(cm.counts, vec![vec![1, 1], vec![0, 1]]);
    assert_eq!(confusion(&[], &[], &ab()).unwrap().counts, vec![vec![0, 0], vec![0, 0]]);
    assert_eq!(confusion(&[0, 1], &[0, 1], &ab()).unwrap().counts, vec![vec![1, 0], vec![0, 1]]);
    assert!(confusion(&[2], &[0], &ab()).is_err());
    let cw = classwise_and_averaged(&cm).unwrap();
    assert_eq!(cw.per_class[0].precision, 1.0);
    assert_eq!(cw.per_class[1].precision, 0.5);
    assert_eq!(cw.macro_avg.precision, 0.75);
}

#[test]
fn zero_division_is_flagged() {
    let cm = confusion(&[0, 0, 0], &[0, 0, 0], &ab()).unwrap();
    let cw = classwise_and_averaged(&cm).unwrap();
    assert_eq!(cw.per_class[1].precision, 0.0);
    assert_eq!(cw.per_class[1].recall, 0.0);
    assert_eq!(cw.flags.len(), 2);
}

#[test]
fn averaging_identities_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cats: Vec<String> = ["MNG", "TH", "DG"].iter().map(|s| s.to_string()).collect();
    for _ in 0..1000 {
        let n = rng.random_range(1..60);
        let t: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let p: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let cw = classwise_and_averaged(&confusion(&t, &p, &cats).unwrap()).unwrap();
        assert!((cw.micro.precision - cw.accuracy).abs() < 1e-12);
        assert!((cw.micro.recall - cw.accuracy).abs() < 1e-12);
        assert!((cw.weighted.recall - cw.accuracy).abs() < 1e-12);
    }
}

#[test]
fn roc_examples() {
    assert_eq!(roc_auc(&[0.9, 0.4, 0.6, 0.2], &[true, true, false, false]).unwrap(), 0.75);
    assert_eq!(roc_auc(&[0.9, 0.8, 0.1], &[true, true, false]).unwrap(), 1.0);
    assert_eq!(roc_auc(&[0.3; 4], &[true, false, true, false]).unwrap(), 0.5);
    assert!(roc_auc(&[0.1, 0.2], &[true, true]).is_err());
}

#[test]
fn roc_matches_concordance_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let n = rng.random_range(2..=50);
        let mut t: Vec<bool> = (0..n).map(|_| rng.random()).collect();
        t[0] = true;
        t[1] = false;
        // coarse grid forces ties
        let s: Vec<f64> = (0..n).map(|_| (rng.random_range(0..20) as f64) / 20.0).collect();
        let got = roc_auc(&s, &t).unwrap();
        assert!((got - roc_oracle(&s, &t)).abs() < 1e-12);
        let warped: Vec<f64> = s.iter().map(|v| v.exp() * 5.0).collect();
        assert!((roc_auc(&warped, &t).unwrap() - got).abs() < 1e-12);
        let distinct: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let neg_d: Vec<f64> = distinct.iter().map(|v| -v).collect();
        assert!((roc_auc(&distinct, &t).unwrap() + roc_auc(&neg_d, &t).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn prc_examples() {
    assert_eq!(prc_auc(&[0.9, 0.8, 0.1], &[true, true, false]).unwrap(), 1.0);
    assert!((prc_auc(&[0.5; 5], &[true, false, false, true, false]).unwrap() - 0.4).abs() < 1e-15);
    let v = prc_auc(&[0.9, 0.8, 0.7], &[true, false, true]).unwrap();
    assert!((v - (0.5 + 0.5 * 2.0 / 3.0)).abs() < 1e-15);
    assert!((v - 0.8333).abs() < 1e-4);
    assert!(prc_auc(&[0.1], &[false]).is_err());
}

#[test]
fn multiclass_reduces_to_one_vs_rest() {
    let probs = vec![vec![0.7, 0.2, 0.1], vec![0.2, 0.5, 0.3], vec![0.1, 0.3, 0.6]];
    let truth = [0, 2, 1];
    for curve in [Curve::Roc, Curve::Prc] {
        let m = multiclass_auc(&probs, &truth, 3, curve).unwrap();
        for c in 0..3 {
            let s: Vec<f64> = probs.iter().map(|r| r[c]).collect();
            let t: Vec<bool> = truth.iter().map(|&y| y == c).collect();
            let want = match curve {
                Curve::Roc => roc_auc(&s, &t).unwrap(),
                Curve::Prc => prc_auc(&s, &t).unwrap(),
            };
            assert_eq!(m.per_class[c], Some(want));
        }
    }
    let perfect = vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]];
    for curve in [Curve::Roc, Curve::Prc] {
        let m = multiclass_auc(&perfect, &truth, 3, curve).unwrap();
        assert_eq!(m.micro, Some(1.0));
        assert_eq!(m.macro_avg, Some(1.0));
        assert_eq!(m.weighted, Some(1.0));
    }
    let uniform = vec![vec![1.0 / 3.0; 3]; 3];
    let m = multiclass_auc(&uniform, &truth, 3, Curve::Roc).unwrap();
    assert!(m.per_class.iter().all(|v| *v == Some(0.5)));
    // an absent category is excluded and flagged
    let m = multiclass_auc(&probs[..2], &truth[..2], 3, Curve::Roc).unwrap();
    assert_eq!(m.undefined, vec![1]);
    assert!(m.macro_avg.is_some());
}

#[test]
fn report_shape() {
    let cats: Vec<String> = ["MNG", "TH", "DG"].iter().map(|s| s.to_string()).collect();
    let probs = vec![vec![0.7, 0.2, 0.1], vec![0.2, 0.5, 0.3], vec![0.1, 0.3, 0.6], vec![0.5, 0.4, 0.1]];
    let r = MetricsReport::compute(Some(4), &[0, 1, 2, 1], &probs, &cats).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let at = |k: &str| json.find(&format!("\"{k}\":{{")).unwrap();
    assert!(at("MNG") < at("TH") && at("TH") < at("DG"));
    assert_eq!(r.accuracy, 0.75);
    assert_eq!(r.metric("f1", "macro").unwrap(), Some(r.averages["macro"].f1));
    assert_eq!(r.metric("recall", "TH").unwrap(), Some(0.5));
    assert!(r.metric("f1", "XX").is_err());
}

fn tost_oracle(d: &[f64], margin: f64) -> f64 {
    let n = d.len() as f64;
    let m = d.iter().sum::<f64>() / n;
    let sd = (d.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let se = sd / n.sqrt();
    let t = StudentsT::new(0.0, 1.0, n - 1.0).unwrap();
    let p_lower = t.sf((m + margin) / se);
    let p_upper = t.cdf((m - margin) / se);
    p_lower.max(p_upper)
}

#[test]
fn tost_examples() {
    let a = [0.8, 0.7, 0.9];
    let r = tost_paired(&a, &a, 0.05, 0.05).unwrap();
    assert_eq!(r.p_tost, 0.0);
    assert!(r.equivalent);
    let b: Vec<f64> = a.iter().map(|v| v - 0.1).collect();
    let r = tost_paired(&a, &b, 0.05, 0.05).unwrap();
    assert_eq!(r.p_tost, 1.0);
    assert!(!r.equivalent);
    assert!(tost_paired(&[1.0], &[1.0], 0.05, 0.05).is_err());
    assert!(tost_paired(&a, &a, 0.0, 0.05).is_err());

    let d = [0.01, 0.03, -0.01, 0.02, 0.00, 0.02, 0.01, -0.02, 0.03];
    let zeros = [0.0; 9];
    let r = tost_paired(&d, &zeros, 0.05, 0.05).unwrap();
    assert!((r.p_tost - tost_oracle(&d, 0.05)).abs() < 1e-6);
}

#[test]
fn tost_matches_reference_cdf() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let n = rng.random_range(2..=30);
        let shift = rng.random_range(-0.1..0.1);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.0)).collect();
        let b: Vec<f64> = a.iter().map(|v| v + shift + rng.random_range(-0.05..0.05)).collect();
        let margin = rng.random_range(0.01..0.2);
        let r = tost_paired(&a, &b, margin, 0.05).unwrap();
        let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        assert!((r.p_tost - tost_oracle(&d, margin)).abs() < 1e-6);
        assert!((0.0..=1.0).contains(&r.p_lower) && (0.0..=1.0).contains(&r.p_upper));
    }
}

#[test]
fn t_cdf_is_accurate() {
    for nu in [1.0, 2.0, 3.5, 8.0, 30.0, 200.0] {
        let t = StudentsT::new(0.0, 1.0, nu).unwrap();
        for k in -40..=40 {
            let x = k as f64 * 0.25;
            assert!((student_t_cdf(x, nu) - t.cdf(x)).abs() < 1e-10, "nu {nu} x {x}");
        }
    }
}
