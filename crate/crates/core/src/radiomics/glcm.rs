//! Gray-level co-occurrence matrices and their 24 features.

use crate::error::{Error, Result};
use crate::grid::DiscretizedRoi;
use crate::radiomics::matrix::{MatrixKind, TextureMatrix};
use crate::radiomics::names::GLCM;
use crate::radiomics::{ExtractionConfig, Named};
use crate::scalar::Scalar;

/// One symmetric, normalized co-occurrence matrix per direction that has at
/// least one in-ROI pixel pair. Directions without pairs are omitted.
pub fn compute_glcm<T: Scalar>(
    droi: &DiscretizedRoi,
    cfg: &ExtractionConfig,
) -> Result<Vec<TextureMatrix<T>>> {
    let ng = droi.num_levels();
    let dist = cfg.glcm_distance as isize;
    let mut out = Vec::with_capacity(cfg.directions.len());
    for &(dx, dy) in &cfg.directions {
        let mut counts = vec![0usize; ng * ng];
        let mut total = 0usize;
        for e in droi.entries() {
            let qx = e.x as isize + dx as isize * dist;
            let qy = e.y as isize + dy as isize * dist;
            if let Some(l) = droi.level_at(qx, qy) {
                counts[(e.level - 1) * ng + (l - 1)] += 1;
                counts[(l - 1) * ng + (e.level - 1)] += 1;
                total += 2;
            }
        }
        if total == 0 {
            continue;
        }
        let t = T::from_count(total);
        out.push(TextureMatrix {
            kind: MatrixKind::Glcm,
            rows: ng,
            cols: ng,
            direction: Some((dx, dy)),
            data: counts.into_iter().map(|c| T::from_count(c) / t).collect(),
        });
    }
    if out.is_empty() {
        return Err(Error::DegenerateMatrix {
            family: "GLCM",
            reason: "no in-ROI pixel pair in any direction".into(),
        });
    }
    Ok(out)
}

/// Eigenvalues of a symmetric `n x n` matrix by cyclic Jacobi rotations.
pub(crate) fn symmetric_eigenvalues<T: Scalar>(mut a: Vec<T>, n: usize) -> Vec<T> {
    let two = T::lit(2.0);
    for _sweep in 0..100 {
        let mut off = T::zero();
        let mut diag = T::zero();
        for i in 0..n {
            diag += a[i * n + i] * a[i * n + i];
            for j in 0..n {
                if i != j {
                    off += a[i * n + j] * a[i * n + j];
                }
            }
        }
        if off <= T::epsilon() * T::epsilon() * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// Maximal correlation coefficient: square root of the second largest
/// eigenvalue of `Q(i, j) = sum_k p(i,k) p(j,k) / (px(i) py(k))`, computed on
/// the similar symmetric matrix restricted to occupied levels.
fn maximal_correlation<T: Scalar>(p: &TextureMatrix<T>, px: &[T]) -> T {
    let ng = p.rows;
    let occupied: Vec<usize> = (0..ng).filter(|&i| px[i] > T::zero()).collect();
    let m = occupied.len();
    if m < 2 {
        return T::one();
    }
    let mut s = vec![T::zero(); m * m];
    for (a, &i) in occupied.iter().enumerate() {
        for (b, &j) in occupied.iter().enumerate().skip(a) {
            let mut acc = T::zero();
            for &k in &occupied {
                acc += p.at(i, k) * p.at(j, k) / px[k];
            }
            let v = acc / (px[i] * px[j]).sqrt();
            s[a * m + b] = v;
            s[b * m + a] = v;
        }
    }
    let mut ev = symmetric_eigenvalues(s, m);
    ev.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    ev[1].max(T::zero()).sqrt()
}

struct GlcmStats<T> {
    values: [T; 24],
}

fn features_of<T: Scalar>(p: &TextureMatrix<T>) -> GlcmStats<T> {
    let ng = p.rows;
    let ngf = T::from_count(ng);
    let level = |i: usize| T::from_count(i + 1);
    let zero = T::zero();
    let one = T::one();

    let mut px = vec![zero; ng];
    for i in 0..ng {
        for j in 0..ng {
            px[i] += p.at(i, j);
        }
    }
    // symmetric matrix: the column marginal equals the row marginal
    let py = &px;
    let mu = (0..ng).map(|i| level(i) * px[i]).sum::<T>();
    let var = (0..ng)
        .map(|i| (level(i) - mu) * (level(i) - mu) * px[i])
        .sum::<T>();

    let mut p_sum = vec![zero; 2 * ng + 1];
    let mut p_diff = vec![zero; ng];
    let (mut autocorr, mut prominence, mut shade, mut tendency) = (zero, zero, zero, zero);
    let (mut contrast, mut energy, mut joint_entropy, mut hxy1, mut hxy2) = (zero, zero, zero, zero, zero);
    let (mut idm, mut idmn, mut id, mut idn, mut max_p) = (zero, zero, zero, zero, zero);
    for i in 0..ng {
        let fi = level(i);
        for j in 0..ng {
            let v = p.at(i, j);
            let pp = px[i] * py[j];
            if pp > zero {
                hxy2 -= pp * pp.log2();
            }
            if v == zero {
                continue;
            }
            let fj = level(j);
            let d = fi - fj;
            let d2 = d * d;
            let c = fi + fj - mu - mu;
            let c2 = c * c;
            p_sum[i + j + 2] += v;
            p_diff[i.abs_diff(j)] += v;
            autocorr += v * fi * fj;
            tendency += v * c2;
            shade += v * c2 * c;
            prominence += v * c2 * c2;
            contrast += v * d2;
            energy += v * v;
            joint_entropy -= v * v.log2();
            hxy1 -= v * pp.log2();
            idm += v / (one + d2);
            idmn += v / (one + d2 / (ngf * ngf));
            id += v / (one + d.abs());
            idn += v / (one + d.abs() / ngf);
            max_p = max_p.max(v);
        }
    }
    let correlation = if var == zero {
        one
    } else {
        (autocorr - mu * mu) / var
    };
    let diff_avg = p_diff
        .iter()
        .enumerate()
        .map(|(k, &v)| T::from_count(k) * v)
        .sum::<T>();
    let diff_var = p_diff
        .iter()
        .enumerate()
        .map(|(k, &v)| (T::from_count(k) - diff_avg) * (T::from_count(k) - diff_avg) * v)
        .sum::<T>();
    let entropy_of = |xs: &[T]| -> T {
        -xs.iter()
            .filter(|&&v| v > zero)
            .map(|&v| v * v.log2())
            .sum::<T>()
    };
    let diff_entropy = entropy_of(&p_diff);
    let sum_entropy = entropy_of(&p_sum);
    let inverse_variance = p_diff
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &v)| v / T::from_count(k * k))
        .sum::<T>();
    let sum_avg = p_sum
        .iter()
        .enumerate()
        .map(|(k, &v)| T::from_count(k) * v)
        .sum::<T>();
    let hx = entropy_of(&px);
    let imc1 = if hx == zero {
        zero
    } else {
        (joint_entropy - hxy1) / hx
    };
    let imc2 = if joint_entropy > hxy2 {
        zero
    } else {
        (one - (T::lit(-2.0) * (hxy2 - joint_entropy)).exp()).sqrt()
    };
    let mcc = maximal_correlation(p, &px);

    let values = std::array::from_fn(|k| match GLCM[k] {
        "Autocorrelation" => autocorr,
        "ClusterProminence" => prominence,
        "ClusterShade" => shade,
        "ClusterTendency" => tendency,
        "Contrast" => contrast,
        "Correlation" => correlation,
        "DifferenceAverage" => diff_avg,
        "DifferenceEntropy" => diff_entropy,
        "DifferenceVariance" => diff_var,
        "Id" => id,
        "Idm" => idm,
        "Idmn" => idmn,
        "Idn" => idn,
        "Imc1" => imc1,
        "Imc2" => imc2,
        "InverseVariance" => inverse_variance,
        "JointAverage" => mu,
        "JointEnergy" => energy,
        "JointEntropy" => joint_entropy,
        "MCC" => mcc,
        "MaximumProbability" => max_p,
        "SumAverage" => sum_avg,
        "SumEntropy" => sum_entropy,
        "SumSquares" => var,
        other => unreachable!("unknown GLCM feature {other}"),
    });
    GlcmStats { values }
}

/// Features per direction, then the unweighted mean across directions.
pub fn glcm_features<T: Scalar>(matrices: &[TextureMatrix<T>]) -> Result<Named<T>> {
    if matrices.is_empty() {
        return Err(Error::DegenerateMatrix {
            family: "GLCM",
            reason: "no co-occurrence matrix to summarize".into(),
        });
    }
    let k = T::from_count(matrices.len());
    let mut acc = [T::zero(); 24];
    for m in matrices {
        let f = features_of(m);
        for (a, v) in acc.iter_mut().zip(f.values) {
            *a += v;
        }
    }
    Ok(GLCM.iter().zip(acc).map(|(&n, v)| (n, v / k)).collect())
}
