//! Gray-level run-length matrices.

use crate::error::Result;
use crate::grid::DiscretizedRoi;
use crate::radiomics::matrix::{EmphasisStats, MatrixKind, TextureMatrix};
use crate::radiomics::names::GLRLM;
use crate::radiomics::{ExtractionConfig, Named};
use crate::scalar::Scalar;

/// One run-length count matrix per direction. Column `c` counts runs of
/// length `c + 1`.
pub fn compute_glrlm<T: Scalar>(
    droi: &DiscretizedRoi,
    cfg: &ExtractionConfig,
) -> Result<Vec<TextureMatrix<T>>> {
    let ng = droi.num_levels();
    let g = droi.geometry();
    let max_run = g.width.max(g.height);
    let mut out = Vec::with_capacity(cfg.directions.len());
    for &(dx, dy) in &cfg.directions {
        let (dx, dy) = (dx as isize, dy as isize);
        let mut m = TextureMatrix::zeros(MatrixKind::Glrlm, ng, max_run, Some((dx as i32, dy as i32)));
        let mut longest = 0;
        for e in droi.entries() {
            let (x, y) = (e.x as isize, e.y as isize);
            if droi.level_at(x - dx, y - dy) == Some(e.level) {
                continue;
            }
            let mut len = 1;
            while droi.level_at(x + dx * len as isize, y + dy * len as isize) == Some(e.level) {
                len += 1;
            }
            longest = longest.max(len);
            m.add(e.level - 1, len - 1, T::one());
        }
        out.push(shrink_cols(m, longest));
    }
    Ok(out)
}

/// Drop trailing all-zero columns beyond `cols`.
pub(crate) fn shrink_cols<T: Scalar>(m: TextureMatrix<T>, cols: usize) -> TextureMatrix<T> {
    if cols == m.cols {
        return m;
    }
    let mut data = Vec::with_capacity(m.rows * cols);
    for r in 0..m.rows {
        data.extend_from_slice(&m.data[r * m.cols..r * m.cols + cols]);
    }
    TextureMatrix { cols, data, ..m }
}

pub fn glrlm_features<T: Scalar>(matrices: &[TextureMatrix<T>], n_pixels: usize) -> Result<Named<T>> {
    let per_dir: Vec<EmphasisStats<T>> = matrices
        .iter()
        .map(|m| EmphasisStats::from_counts(m, n_pixels))
        .collect();
    let s = EmphasisStats::mean_of(&per_dir);
    Ok(GLRLM
        .iter()
        .map(|&n| {
            let v = match n {
                "GrayLevelNonUniformity" => s.gray_nonuniformity,
                "GrayLevelNonUniformityNormalized" => s.gray_nonuniformity_norm,
                "GrayLevelVariance" => s.gray_variance,
                "HighGrayLevelRunEmphasis" => s.high_gray,
                "LongRunEmphasis" => s.large_j,
                "LongRunHighGrayLevelEmphasis" => s.large_j_high_gray,
                "LongRunLowGrayLevelEmphasis" => s.large_j_low_gray,
                "LowGrayLevelRunEmphasis" => s.low_gray,
                "RunEntropy" => s.entropy,
                "RunLengthNonUniformity" => s.j_nonuniformity,
                "RunLengthNonUniformityNormalized" => s.j_nonuniformity_norm,
                "RunPercentage" => s.percentage,
                "RunVariance" => s.j_variance,
                "ShortRunEmphasis" => s.small_j,
                "ShortRunHighGrayLevelEmphasis" => s.small_j_high_gray,
                "ShortRunLowGrayLevelEmphasis" => s.small_j_low_gray,
                other => unreachable!("unknown GLRLM feature {other}"),
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
    fn runs_in_a_row() {
        let d = DiscretizedRoi::from_levels(
            Geometry { width: 5, height: 1, spacing: Spacing::default() },
            vec![1, 1, 2, 2, 2],
            0.3,
        )
        .unwrap();
        let cfg = ExtractionConfig { directions: vec![(1, 0), (0, 1)], ..Default::default() };
        let m = compute_glrlm::<f64>(&d, &cfg).unwrap();
        assert_eq!(m[0].cols, 3);
        assert_eq!(m[0].at(0, 1), 1.0);
        assert_eq!(m[0].at(1, 2), 1.0);
        assert_eq!(m[0].total(), 2.0);
        // vertical runs are all of length one
        assert_eq!(m[1].total(), 5.0);
        let f = glrlm_features(&m, 5).unwrap();
        let rp = f.iter().find(|(n, _)| *n == "RunPercentage").unwrap().1;
        assert!((rp - 0.7).abs() < 1e-15);
    }
}
