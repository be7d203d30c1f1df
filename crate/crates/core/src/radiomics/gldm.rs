//! Gray-level dependence matrix with a zero cutoff over the 8-neighbourhood.

use crate::error::Result;
use crate::grid::DiscretizedRoi;
use crate::radiomics::matrix::{EmphasisStats, MatrixKind, TextureMatrix};
use crate::radiomics::names::GLDM;
use crate::radiomics::Named;
use crate::scalar::Scalar;

pub(crate) const NEIGHBOURS: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Column `c` counts pixels with exactly `c` equal-level neighbours.
pub fn compute_gldm<T: Scalar>(droi: &DiscretizedRoi) -> Result<TextureMatrix<T>> {
    let mut m = TextureMatrix::zeros(MatrixKind::Gldm, droi.num_levels(), NEIGHBOURS.len() + 1, None);
    for e in droi.entries() {
        let dep = NEIGHBOURS
            .iter()
            .filter(|(dx, dy)| droi.level_at(e.x as isize + dx, e.y as isize + dy) == Some(e.level))
            .count();
        m.add(e.level - 1, dep, T::one());
    }
    Ok(m)
}

pub fn gldm_features<T: Scalar>(m: &TextureMatrix<T>, n_pixels: usize) -> Result<Named<T>> {
    let s = EmphasisStats::from_counts(m, n_pixels);
    Ok(GLDM
        .iter()
        .map(|&n| {
            let v = match n {
                "DependenceEntropy" => s.entropy,
                "DependenceNonUniformity" => s.j_nonuniformity,
                "DependenceNonUniformityNormalized" => s.j_nonuniformity_norm,
                "DependenceVariance" => s.j_variance,
                "GrayLevelNonUniformity" => s.gray_nonuniformity,
                "GrayLevelVariance" => s.gray_variance,
                "HighGrayLevelEmphasis" => s.high_gray,
                "LargeDependenceEmphasis" => s.large_j,
                "LargeDependenceHighGrayLevelEmphasis" => s.large_j_high_gray,
                "LargeDependenceLowGrayLevelEmphasis" => s.large_j_low_gray,
                "LowGrayLevelEmphasis" => s.low_gray,
                "SmallDependenceEmphasis" => s.small_j,
                "SmallDependenceHighGrayLevelEmphasis" => s.small_j_high_gray,
                "SmallDependenceLowGrayLevelEmphasis" => s.small_j_low_gray,
                other => unreachable!("unknown GLDM feature {other}"),
            };
            (n, v)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Geometry, Spacing};

    #[test]
    fn full_block_dependences() {
        let d = DiscretizedRoi::from_levels(
            Geometry { width: 3, height: 3, spacing: Spacing::default() },
            vec![1; 9],
            0.3,
        )
        .unwrap();
        let m = compute_gldm::<f64>(&d).unwrap();
        // 4 corners see 3, 4 edges see 5, the centre sees 8
        assert_eq!(m.at(0, 3), 4.0);
        assert_eq!(m.at(0, 5), 4.0);
        assert_eq!(m.at(0, 8), 1.0);
    }
}
