use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Glcm,
    Gldm,
    Glrlm,
    Glszm,
    Ngtdm,
}

/// Dense row-major texture matrix. Row `r` always corresponds to gray level `r + 1`.
///
/// GLCM matrices are joint probabilities; GLRLM, GLSZM and GLDM matrices hold
/// raw counts with column `c` meaning run length / zone size `c + 1` or
/// dependence count `c`; NGTDM rows hold `(n_i, p_i, s_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TextureMatrix<T> {
    pub kind: MatrixKind,
    pub rows: usize,
    pub cols: usize,
    pub direction: Option<(i32, i32)>,
    pub data: Vec<T>,
}

impl<T: Scalar> TextureMatrix<T> {
    pub fn zeros(kind: MatrixKind, rows: usize, cols: usize, direction: Option<(i32, i32)>) -> Self {
        Self {
            kind,
            rows,
            cols,
            direction,
            data: vec![T::zero(); rows * cols],
        }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub(crate) fn add(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] += v;
    }

    pub fn total(&self) -> T {
        self.data.iter().copied().sum()
    }
}

/// Statistics shared by the run-length, size-zone and dependence families.
/// `j` is the 1-based column value (run length, zone size, dependence + 1).
#[derive(Debug, Clone, Copy)]
pub(crate) struct EmphasisStats<T> {
    pub small_j: T,
    pub large_j: T,
    pub gray_nonuniformity: T,
    pub gray_nonuniformity_norm: T,
    pub j_nonuniformity: T,
    pub j_nonuniformity_norm: T,
    pub percentage: T,
    pub gray_variance: T,
    pub j_variance: T,
    pub entropy: T,
    pub low_gray: T,
    pub high_gray: T,
    pub small_j_low_gray: T,
    pub small_j_high_gray: T,
    pub large_j_low_gray: T,
    pub large_j_high_gray: T,
}

impl<T: Scalar> EmphasisStats<T> {
    /// `counts` is a count matrix; `n_pixels` the ROI pixel count.
    pub fn from_counts(counts: &TextureMatrix<T>, n_pixels: usize) -> Self {
        let n = counts.total();
        let mut row_sums = vec![T::zero(); counts.rows];
        let mut col_sums = vec![T::zero(); counts.cols];
        for r in 0..counts.rows {
            for c in 0..counts.cols {
                let v = counts.at(r, c);
                row_sums[r] += v;
                col_sums[c] += v;
            }
        }
        let level = |r: usize| T::from_count(r + 1);
        let mu_i = row_sums
            .iter()
            .enumerate()
            .map(|(r, &s)| level(r) * s)
            .sum::<T>()
            / n;
        let mu_j = col_sums
            .iter()
            .enumerate()
            .map(|(c, &s)| level(c) * s)
            .sum::<T>()
            / n;

        let zero = T::zero();
        let mut s = Self {
            small_j: zero,
            large_j: zero,
            gray_nonuniformity: zero,
            gray_nonuniformity_norm: zero,
            j_nonuniformity: zero,
            j_nonuniformity_norm: zero,
            percentage: n / T::from_count(n_pixels),
            gray_variance: zero,
            j_variance: zero,
            entropy: zero,
            low_gray: zero,
            high_gray: zero,
            small_j_low_gray: zero,
            small_j_high_gray: zero,
            large_j_low_gray: zero,
            large_j_high_gray: zero,
        };
        for r in 0..counts.rows {
            let i = level(r);
            let i2 = i * i;
            for c in 0..counts.cols {
                let v = counts.at(r, c);
                if v == zero {
                    continue;
                }
                let p = v / n;
                let j = level(c);
                let j2 = j * j;
                s.small_j += p / j2;
                s.large_j += p * j2;
                s.low_gray += p / i2;
                s.high_gray += p * i2;
                s.small_j_low_gray += p / (i2 * j2);
                s.small_j_high_gray += p * i2 / j2;
                s.large_j_low_gray += p * j2 / i2;
                s.large_j_high_gray += p * i2 * j2;
                s.gray_variance += p * (i - mu_i) * (i - mu_i);
                s.j_variance += p * (j - mu_j) * (j - mu_j);
                s.entropy -= p * p.log2();
            }
        }
        let gln = row_sums.iter().map(|&v| v * v).sum::<T>() / n;
        let jn = col_sums.iter().map(|&v| v * v).sum::<T>() / n;
        s.gray_nonuniformity = gln;
        s.gray_nonuniformity_norm = gln / n;
        s.j_nonuniformity = jn;
        s.j_nonuniformity_norm = jn / n;
        s
    }

    pub fn mean_of(all: &[Self]) -> Self {
        let k = T::from_count(all.len());
        let avg = |f: fn(&Self) -> T| all.iter().map(f).sum::<T>() / k;
        Self {
            small_j: avg(|s| s.small_j),
            large_j: avg(|s| s.large_j),
            gray_nonuniformity: avg(|s| s.gray_nonuniformity),
            gray_nonuniformity_norm: avg(|s| s.gray_nonuniformity_norm),
            j_nonuniformity: avg(|s| s.j_nonuniformity),
            j_nonuniformity_norm: avg(|s| s.j_nonuniformity_norm),
            percentage: avg(|s| s.percentage),
            gray_variance: avg(|s| s.gray_variance),
            j_variance: avg(|s| s.j_variance),
            entropy: avg(|s| s.entropy),
            low_gray: avg(|s| s.low_gray),
            high_gray: avg(|s| s.high_gray),
            small_j_low_gray: avg(|s| s.small_j_low_gray),
            small_j_high_gray: avg(|s| s.small_j_high_gray),
            large_j_low_gray: avg(|s| s.large_j_low_gray),
            large_j_high_gray: avg(|s| s.large_j_high_gray),
        }
    }
}
