//! Gray-level size-zone matrix over 8-connected equal-level components.

use crate::error::Result;
use crate::grid::DiscretizedRoi;
use crate::radiomics::glrlm::shrink_cols;
use crate::radiomics::matrix::{EmphasisStats, MatrixKind, TextureMatrix};
use crate::radiomics::names::GLSZM;
use crate::radiomics::Named;
use crate::scalar::Scalar;

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Zone counts: row `level - 1`, column `size - 1`.
pub fn compute_glszm<T: Scalar>(droi: &DiscretizedRoi) -> Result<TextureMatrix<T>> {
    let g = droi.geometry();
    let entries = droi.entries();
    let mut index = vec![usize::MAX; g.width * g.height];
    for (k, e) in entries.iter().enumerate() {
        index[e.y * g.width + e.x] = k;
    }
    let mut parent: Vec<usize> = (0..entries.len()).collect();
    // forward half of the 8-neighbourhood is enough to link every pair once
    const FORWARD: [(isize, isize); 4] = [(1, 0), (-1, 1), (0, 1), (1, 1)];
    for (k, e) in entries.iter().enumerate() {
        for (dx, dy) in FORWARD {
            let (x, y) = (e.x as isize + dx, e.y as isize + dy);
            if droi.level_at(x, y) != Some(e.level) {
                continue;
            }
            let other = index[y as usize * g.width + x as usize];
            let (a, b) = (find(&mut parent, k), find(&mut parent, other));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut size = vec![0usize; entries.len()];
    for k in 0..entries.len() {
        let r = find(&mut parent, k);
        size[r] += 1;
    }
    let largest = size.iter().copied().max().unwrap_or(0);
    let mut m = TextureMatrix::zeros(MatrixKind::Glszm, droi.num_levels(), largest.max(1), None);
    for (k, e) in entries.iter().enumerate() {
        if size[k] > 0 && parent[k] == k {
            m.add(e.level - 1, size[k] - 1, T::one());
        }
    }
    Ok(shrink_cols(m, largest.max(1)))
}

pub fn glszm_features<T: Scalar>(m: &TextureMatrix<T>, n_pixels: usize) -> Result<Named<T>> {
    let s = EmphasisStats::from_counts(m, n_pixels);
    Ok(GLSZM
        .iter()
        .map(|&n| {
            let v = match n {
                "GrayLevelNonUniformity" => s.gray_nonuniformity,
                "GrayLevelNonUniformityNormalized" => s.gray_nonuniformity_norm,
                "GrayLevelVariance" => s.gray_variance,
                "HighGrayLevelZoneEmphasis" => s.high_gray,
                "LargeAreaEmphasis" => s.large_j,
                "LargeAreaHighGrayLevelEmphasis" => s.large_j_high_gray,
                "LargeAreaLowGrayLevelEmphasis" => s.large_j_low_gray,
                "LowGrayLevelZoneEmphasis" => s.low_gray,
                "SizeZoneNonUniformity" => s.j_nonuniformity,
                "SizeZoneNonUniformityNormalized" => s.j_nonuniformity_norm,
                "SmallAreaEmphasis" => s.small_j,
                "SmallAreaHighGrayLevelEmphasis" => s.small_j_high_gray,
                "SmallAreaLowGrayLevelEmphasis" => s.small_j_low_gray,
                "ZoneEntropy" => s.entropy,
                "ZonePercentage" => s.percentage,
                "ZoneVariance" => s.j_variance,
                other => unreachable!("unknown GLSZM feature {other}"),
            };
            (n, v)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Geometry, Spacing};

    fn roi(w: usize, h: usize, levels: Vec<usize>) -> DiscretizedRoi {
        DiscretizedRoi::from_levels(
            Geometry { width: w, height: h, spacing: Spacing::default() },
            levels,
            0.3,
        )
        .unwrap()
    }

    #[test]
    fn two_zones_of_two() {
        let m = compute_glszm::<f64>(&roi(2, 2, vec![1, 1, 2, 2])).unwrap();
        assert_eq!(m.cols, 2);
        assert_eq!(m.data, vec![0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn diagonal_touch_joins_zones() {
        // anti-diagonal link exercises the (-1, 1) neighbour
        let m = compute_glszm::<f64>(&roi(3, 3, vec![0, 0, 1, 0, 1, 0, 1, 0, 0])).unwrap();
        assert_eq!(m.data, vec![0.0, 0.0, 1.0]);
    }
}
