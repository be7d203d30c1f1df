use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::tdist::student_t_cdf;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TostResult {
    pub n: usize,
    pub mean_diff: f64,
    pub sd_diff: f64,
    pub margin: f64,
    pub alpha: f64,
    pub p_lower: f64,
    pub p_upper: f64,
    pub p_tost: f64,
    pub equivalent: bool,
}

/// Two one-sided paired t-tests of `|mean(a - b)| < margin`.
pub fn tost_paired(a: &[f64], b: &[f64], margin: f64, alpha: f64) -> Result<TostResult> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidArgument("TOST needs at least two pairs".into()));
    }
    if !(margin > 0.0) {
        return Err(Error::InvalidArgument(format!("margin must be positive, got {margin}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("paired values must be finite".into()));
    }
    let nf = n as f64;
    let mean = d.iter().sum::<f64>() / nf;
    let sd = (d.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0)).sqrt();
    let (p_lower, p_upper) = if sd == 0.0 {
        let p = if mean.abs() < margin { 0.0 } else { 1.0 };
        (p, p)
    } else {
        let se = sd / nf.sqrt();
        let nu = nf - 1.0;
        let t_lower = (mean + margin) / se;
        let t_upper = (mean - margin) / se;
        (student_t_cdf(-t_lower, nu), student_t_cdf(t_upper, nu))
    };
    let p_tost = p_lower.max(p_upper);
    Ok(TostResult {
        n,
        mean_diff: mean,
        sd_diff: sd,
        margin,
        alpha,
        p_lower,
        p_upper,
        p_tost,
        equivalent: p_tost < alpha,
    })
}
