use crate::error::{Error, Result};
use crate::grid::{discretize_roi, BinaryMask, ImageGrid};
use crate::radiomics::names::FIRST_ORDER;
use crate::radiomics::{ExtractionConfig, Named};
use crate::scalar::Scalar;

/// Linear interpolation between order statistics at position `(n - 1) q`.
fn percentile<T: Scalar>(sorted: &[T], q: f64) -> T {
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * T::lit(pos - lo as f64)
}

/// The 18 histogram statistics of the ROI intensities. Entropy and uniformity
/// use the fixed-bin-width histogram; everything else the raw values.
pub fn first_order_features<T: Scalar>(
    img: &ImageGrid<T>,
    mask: &BinaryMask,
    cfg: &ExtractionConfig,
) -> Result<Named<T>> {
    let droi = discretize_roi(img, mask, cfg.bin_width)?;
    let values: Vec<T> = img
        .pixels()
        .iter()
        .zip(mask.values())
        .filter(|(_, &m)| m != 0)
        .map(|(&v, _)| v)
        .collect();
    let n = T::from_count(values.len());
    let mut sorted = values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite pixels"));

    let mean = values.iter().copied().sum::<T>() / n;
    let (mut m2, mut m3, mut m4, mut mad) = (T::zero(), T::zero(), T::zero(), T::zero());
    let mut energy = T::zero();
    for &v in &values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
        mad += d.abs();
        energy += v * v;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    mad /= n;
    if !(m2 > T::zero()) {
        return Err(Error::Undefined(
            "skewness and kurtosis need a non-constant ROI".into(),
        ));
    }

    let p10 = percentile(&sorted, 0.10);
    let p90 = percentile(&sorted, 0.90);
    let robust: Vec<T> = values.iter().copied().filter(|&v| v >= p10 && v <= p90).collect();
    let rn = T::from_count(robust.len());
    let rmean = robust.iter().copied().sum::<T>() / rn;
    let rmad = robust.iter().map(|&v| (v - rmean).abs()).sum::<T>() / rn;

    let hist = droi.histogram();
    let (mut entropy, mut uniformity) = (T::zero(), T::zero());
    for &c in hist.iter().filter(|&&c| c > 0) {
        let p = T::from_count(c) / n;
        entropy -= p * p.log2();
        uniformity += p * p;
    }

    let min = sorted[0];
    let max = sorted[sorted.len() - 1];
    let area = T::lit(img.spacing().area());
    let out = FIRST_ORDER
        .iter()
        .map(|&name| {
            let v = match name {
                "10Percentile" => p10,
                "90Percentile" => p90,
                "Energy" => energy,
                "Entropy" => entropy,
                "InterquartileRange" => percentile(&sorted, 0.75) - percentile(&sorted, 0.25),
                "Kurtosis" => m4 / (m2 * m2),
                "Maximum" => max,
                "Mean" => mean,
                "MeanAbsoluteDeviation" => mad,
                "Median" => percentile(&sorted, 0.5),
                "Minimum" => min,
                "Range" => max - min,
                "RobustMeanAbsoluteDeviation" => rmad,
                "RootMeanSquared" => (energy / n).sqrt(),
                "Skewness" => m3 / (m2 * m2.sqrt()),
                "TotalEnergy" => area * energy,
                "Uniformity" => uniformity,
                "Variance" => m2,
                other => unreachable!("unknown first-order feature {other}"),
            };
            (name, v)
        })
        .collect();
    Ok(out)
}
