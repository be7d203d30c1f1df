//! Neighbouring gray-tone difference matrix.

use crate::error::{Error, Result};
use crate::grid::DiscretizedRoi;
use crate::radiomics::gldm::NEIGHBOURS;
use crate::radiomics::matrix::{MatrixKind, TextureMatrix};
use crate::radiomics::names::NGTDM;
use crate::radiomics::{ExtractionConfig, Named};
use crate::scalar::Scalar;

/// Rows are gray levels, columns `(n_i, p_i, s_i)`. Pixels with no in-ROI
/// neighbour are left out of every column.
pub fn compute_ngtdm<T: Scalar>(droi: &DiscretizedRoi) -> Result<TextureMatrix<T>> {
    let ng = droi.num_levels();
    let mut m = TextureMatrix::zeros(MatrixKind::Ngtdm, ng, 3, None);
    let mut valid = 0usize;
    for e in droi.entries() {
        let (mut sum, mut k) = (0usize, 0usize);
        for (dx, dy) in NEIGHBOURS {
            if let Some(l) = droi.level_at(e.x as isize + dx, e.y as isize + dy) {
                sum += l;
                k += 1;
            }
        }
        if k == 0 {
            continue;
        }
        let avg = T::from_count(sum) / T::from_count(k);
        valid += 1;
        m.add(e.level - 1, 0, T::one());
        m.add(e.level - 1, 2, (T::from_count(e.level) - avg).abs());
    }
    if valid == 0 {
        return Err(Error::DegenerateMatrix {
            family: "NGTDM",
            reason: "no ROI pixel has an in-ROI neighbour".into(),
        });
    }
    let nv = T::from_count(valid);
    for r in 0..ng {
        let n = m.at(r, 0);
        m.add(r, 1, n / nv);
    }
    Ok(m)
}

pub fn ngtdm_features<T: Scalar>(m: &TextureMatrix<T>, cfg: &ExtractionConfig) -> Result<Named<T>> {
    let zero = T::zero();
    let cap = T::lit(cfg.coarseness_cap);
    let levels: Vec<usize> = (0..m.rows).filter(|&r| m.at(r, 1) > zero).collect();
    let nvp = levels.iter().map(|&r| m.at(r, 0)).sum::<T>();
    let ngp = T::from_count(levels.len());
    let p = |r: usize| m.at(r, 1);
    let s = |r: usize| m.at(r, 2);
    let level = |r: usize| T::from_count(r + 1);

    let ps = levels.iter().map(|&r| p(r) * s(r)).sum::<T>();
    let s_total = levels.iter().map(|&r| s(r)).sum::<T>();
    let (mut contrast, mut busy_den, mut complexity, mut strength) = (zero, zero, zero, zero);
    for &i in &levels {
        for &j in &levels {
            let d = level(i) - level(j);
            contrast += p(i) * p(j) * d * d;
            busy_den += (level(i) * p(i) - level(j) * p(j)).abs();
            complexity += d.abs() * (p(i) * s(i) + p(j) * s(j)) / (p(i) + p(j));
            strength += (p(i) + p(j)) * d * d;
        }
    }
    let few_levels = levels.len() <= 1;
    let coarseness = if ps == zero { cap } else { (T::one() / ps).min(cap) };
    let contrast = if few_levels {
        zero
    } else {
        contrast / (ngp * (ngp - T::one())) * s_total / nvp
    };
    let busyness = if busy_den == zero { zero } else { ps / busy_den };
    let complexity = if few_levels { zero } else { complexity / nvp };
    let strength = if s_total == zero { zero } else { strength / s_total };

    Ok(NGTDM
        .iter()
        .map(|&n| {
            let v = match n {
                "Busyness" => busyness,
                "Coarseness" => coarseness,
                "Complexity" => complexity,
                "Contrast" => contrast,
                "Strength" => strength,
                other => unreachable!("unknown NGTDM feature {other}"),
            };
            (n, v)
        })
        .collect())
}
