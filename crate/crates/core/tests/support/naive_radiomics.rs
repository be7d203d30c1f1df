//! Brute-force reference for the 93 radiomics features.
//!
//! Written straight from the family definitions without sharing code with the
//! library: pair statistics come from all-pairs enumeration, runs from
//! explicit line scans, zones from breadth-first flood fill, and the maximal
//! correlation coefficient from a general (non-symmetric) eigen-solve.

#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};

pub struct NaiveInput<'a> {
    pub width: usize,
    pub height: usize,
    pub spacing: (f64, f64),
    pub values: &'a [f64],
    pub mask: &'a [u8],
    pub bin_width: f64,
}

const DIRS: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

struct Roi {
    w: usize,
    h: usize,
    /// (x, y, level)
    pix: Vec<(i64, i64, usize)>,
    ng: usize,
}

impl Roi {
    fn level(&self, x: i64, y: i64) -> Option<usize> {
        self.pix
            .iter()
            .find(|p| p.0 == x && p.1 == y)
            .map(|p| p.2)
    }
}

fn discretize(inp: &NaiveInput) -> Roi {
    let mut min = f64::MAX;
    for i in 0..inp.values.len() {
        if inp.mask[i] == 1 && inp.values[i] < min {
            min = inp.values[i];
        }
    }
    let mut pix = Vec::new();
    for y in 0..inp.height {
        for x in 0..inp.width {
            let i = y * inp.width + x;
            if inp.mask[i] == 1 {
                let l = ((inp.values[i] - min) / inp.bin_width).floor() as usize + 1;
                pix.push((x as i64, y as i64, l));
            }
        }
    }
    let ng = pix.iter().map(|p| p.2).max().unwrap();
    Roi {
        w: inp.width,
        h: inp.height,
        pix,
        ng,
    }
}

fn first_order(inp: &NaiveInput, roi: &Roi, out: &mut BTreeMap<String, f64>) {
    let xs: Vec<f64> = (0..inp.values.len())
        .filter(|&i| inp.mask[i] == 1)
        .map(|i| inp.values[i])
        .collect();
    let n = xs.len() as f64;
    let mut s = xs.clone();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mean = xs.iter().sum::<f64>() / n;
    let m = |k: i32| xs.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / n;
    let (m2, m3, m4) = (m(2), m(3), m(4));
    let energy: f64 = xs.iter().map(|x| x * x).sum();
    let p10 = percentile(&s, 0.10);
    let p90 = percentile(&s, 0.90);
    let robust: Vec<f64> = xs.iter().copied().filter(|&x| x >= p10 && x <= p90).collect();
    let rmean = robust.iter().sum::<f64>() / robust.len() as f64;
    let mut counts = vec![0.0; roi.ng + 1];
    for p in &roi.pix {
        counts[p.2] += 1.0;
    }
    let probs: Vec<f64> = counts.iter().map(|c| c / n).collect();
    let mut put = |k: &str, v: f64| {
        out.insert(format!("FO_{k}"), v);
    };
    put("Energy", energy);
    put("TotalEnergy", energy * inp.spacing.0 * inp.spacing.1);
    put("Entropy", -probs.iter().map(|&p| plogp(p)).sum::<f64>());
    put("Uniformity", probs.iter().map(|p| p * p).sum());
    put("Minimum", s[0]);
    put("Maximum", s[s.len() - 1]);
    put("10Percentile", p10);
    put("90Percentile", p90);
    put("Median", percentile(&s, 0.5));
    put("InterquartileRange", percentile(&s, 0.75) - percentile(&s, 0.25));
    put("Range", s[s.len() - 1] - s[0]);
    put("Mean", mean);
    put("MeanAbsoluteDeviation", xs.iter().map(|x| (x - mean).abs()).sum::<f64>() / n);
    put(
        "RobustMeanAbsoluteDeviation",
        robust.iter().map(|x| (x - rmean).abs()).sum::<f64>() / robust.len() as f64,
    );
    put("RootMeanSquared", (energy / n).sqrt());
    put("Variance", m2);
    put("Skewness", m3 / m2.powf(1.5));
    put("Kurtosis", m4 / (m2 * m2));
}

fn glcm_matrix(roi: &Roi, d: (i64, i64)) -> Option<Vec<Vec<f64>>> {
    let ng = roi.ng;
    let mut p = vec![vec![0.0; ng + 1]; ng + 1];
    let mut total = 0.0;
    for a in &roi.pix {
        for b in &roi.pix {
            if b.0 - a.0 == d.0 && b.1 - a.1 == d.1 {
                p[a.2][b.2] += 1.0;
                p[b.2][a.2] += 1.0;
                total += 2.0;
            }
        }
    }
    if total == 0.0 {
        return None;
    }
    for row in p.iter_mut() {
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    Some(p)
}

fn mcc(p: &[Vec<f64>], ng: usize) -> f64 {
    let px: Vec<f64> = (0..=ng).map(|i| p[i].iter().sum()).collect();
    let present = (1..=ng).filter(|&i| px[i] > 0.0).count();
    if present < 2 {
        return 1.0;
    }
    let q = nalgebra::DMatrix::from_fn(ng, ng, |r, c| {
        let (i, j) = (r + 1, c + 1);
        if px[i] == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for k in 1..=ng {
            if px[k] > 0.0 {
                acc += p[i][k] * p[j][k] / (px[i] * px[k]);
            }
        }
        acc
    });
    let mut ev: Vec<f64> = q
        .complex_eigenvalues()
        .iter()
        .map(|c| c.re)
        .collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev[1].max(0.0).sqrt()
}

fn glcm_single(p: &[Vec<f64>], ng: usize) -> BTreeMap<&'static str, f64> {
    let ngf = ng as f64;
    let mut px = vec![0.0; ng + 1];
    let mut py = vec![0.0; ng + 1];
    for i in 1..=ng {
        for j in 1..=ng {
            px[i] += p[i][j];
            py[j] += p[i][j];
        }
    }
    let mux: f64 = (1..=ng).map(|i| i as f64 * px[i]).sum();
    let muy: f64 = (1..=ng).map(|j| j as f64 * py[j]).sum();
    let sx = (1..=ng).map(|i| (i as f64 - mux).powi(2) * px[i]).sum::<f64>().sqrt();
    let sy = (1..=ng).map(|j| (j as f64 - muy).powi(2) * py[j]).sum::<f64>().sqrt();
    let mut psum = vec![0.0; 2 * ng + 1];
    let mut pdiff = vec![0.0; ng];
    let mut f = BTreeMap::new();
    let mut acc = |k: &'static str, v: f64| *f.entry(k).or_insert(0.0) += v;
    let (mut hxy, mut hxy1, mut hxy2) = (0.0, 0.0, 0.0);
    let mut maxp: f64 = 0.0;
    for i in 1..=ng {
        for j in 1..=ng {
            let v = p[i][j];
            let (fi, fj) = (i as f64, j as f64);
            psum[i + j] += v;
            pdiff[i.abs_diff(j)] += v;
            let c = fi + fj - mux - muy;
            acc("Autocorrelation", v * fi * fj);
            acc("ClusterProminence", v * c.powi(4));
            acc("ClusterShade", v * c.powi(3));
            acc("ClusterTendency", v * c.powi(2));
            acc("Contrast", v * (fi - fj).powi(2));
            acc("JointEnergy", v * v);
            acc("Idm", v / (1.0 + (fi - fj).powi(2)));
            acc("Idmn", v / (1.0 + (fi - fj).powi(2) / (ngf * ngf)));
            acc("Id", v / (1.0 + (fi - fj).abs()));
            acc("Idn", v / (1.0 + (fi - fj).abs() / ngf));
            acc("SumSquares", v * (fi - mux).powi(2));
            maxp = maxp.max(v);
            hxy -= plogp(v);
            let pp = px[i] * py[j];
            if v > 0.0 {
                hxy1 -= v * pp.log2();
            }
            hxy2 -= plogp(pp);
        }
    }
    let corr_num: f64 = f["Autocorrelation"] - mux * muy;
    f.insert(
        "Correlation",
        if sx * sy == 0.0 { 1.0 } else { corr_num / (sx * sy) },
    );
    f.insert("JointAverage", mux);
    f.insert("JointEntropy", hxy);
    f.insert("MaximumProbability", maxp);
    let da: f64 = (0..ng).map(|k| k as f64 * pdiff[k]).sum();
    f.insert("DifferenceAverage", da);
    f.insert("DifferenceEntropy", -pdiff.iter().map(|&v| plogp(v)).sum::<f64>());
    f.insert(
        "DifferenceVariance",
        (0..ng).map(|k| (k as f64 - da).powi(2) * pdiff[k]).sum(),
    );
    f.insert(
        "InverseVariance",
        (1..ng).map(|k| pdiff[k] / (k * k) as f64).sum(),
    );
    f.insert("SumAverage", (2..=2 * ng).map(|k| k as f64 * psum[k]).sum());
    f.insert("SumEntropy", -psum.iter().map(|&v| plogp(v)).sum::<f64>());
    let hx = -px.iter().map(|&v| plogp(v)).sum::<f64>();
    let hy = -py.iter().map(|&v| plogp(v)).sum::<f64>();
    let hmax = hx.max(hy);
    f.insert("Imc1", if hmax == 0.0 { 0.0 } else { (hxy - hxy1) / hmax });
    f.insert(
        "Imc2",
        if hxy > hxy2 {
            0.0
        } else {
            (1.0 - (-2.0 * (hxy2 - hxy)).exp()).sqrt()
        },
    );
    f.insert("MCC", mcc(p, ng));
    f
}

fn glcm(roi: &Roi, out: &mut BTreeMap<String, f64>) {
    let mut sum: BTreeMap<&str, f64> = BTreeMap::new();
    let mut count = 0.0;
    for d in DIRS {
        if let Some(p) = glcm_matrix(roi, d) {
            count += 1.0;
            for (k, v) in glcm_single(&p, roi.ng) {
                *sum.entry(k).or_insert(0.0) += v;
            }
        }
    }
    for (k, v) in sum {
        out.insert(format!("GLCM_{k}"), v / count);
    }
}

/// Emphasis-style statistics over a count matrix keyed by (level, j).
/// `np` is the ROI pixel count.
fn emphasis(counts: &BTreeMap<(usize, usize), f64>, np: f64) -> BTreeMap<&'static str, f64> {
    let n: f64 = counts.values().sum();
    let mut by_i: BTreeMap<usize, f64> = BTreeMap::new();
    let mut by_j: BTreeMap<usize, f64> = BTreeMap::new();
    for (&(i, j), &c) in counts {
        *by_i.entry(i).or_insert(0.0) += c;
        *by_j.entry(j).or_insert(0.0) += c;
    }
    let mu_i: f64 = counts.iter().map(|(&(i, _), &c)| i as f64 * c / n).sum();
    let mu_j: f64 = counts.iter().map(|(&(_, j), &c)| j as f64 * c / n).sum();
    let mut f = BTreeMap::new();
    let mut acc = |k: &'static str, v: f64| *f.entry(k).or_insert(0.0) += v;
    for (&(i, j), &c) in counts {
        let p = c / n;
        let (fi, fj) = (i as f64, j as f64);
        acc("SmallJ", p / (fj * fj));
        acc("LargeJ", p * fj * fj);
        acc("LowI", p / (fi * fi));
        acc("HighI", p * fi * fi);
        acc("SmallJLowI", p / (fi * fi * fj * fj));
        acc("SmallJHighI", p * fi * fi / (fj * fj));
        acc("LargeJLowI", p * fj * fj / (fi * fi));
        acc("LargeJHighI", p * fi * fi * fj * fj);
        acc("VarI", p * (fi - mu_i).powi(2));
        acc("VarJ", p * (fj - mu_j).powi(2));
        acc("Entropy", -plogp(p));
    }
    let gln: f64 = by_i.values().map(|v| v * v).sum::<f64>() / n;
    let jn: f64 = by_j.values().map(|v| v * v).sum::<f64>() / n;
    f.insert("GLN", gln);
    f.insert("GLNN", gln / n);
    f.insert("JN", jn);
    f.insert("JNN", jn / n);
    f.insert("Percentage", n / np);
    f
}

fn insert_run_like(
    out: &mut BTreeMap<String, f64>,
    family: &str,
    f: &BTreeMap<&'static str, f64>,
    names: [(&str, &str); 16],
) {
    for (name, key) in names {
        out.insert(format!("{family}_{name}"), f[key]);
    }
}

fn glrlm(roi: &Roi, out: &mut BTreeMap<String, f64>) {
    let np = roi.pix.len() as f64;
    let (w, h) = (roi.w as i64, roi.h as i64);
    let mut sum: BTreeMap<&'static str, f64> = BTreeMap::new();
    for d in DIRS {
        // every line in direction d starts at a cell whose predecessor is off-grid
        let mut counts: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for sy in 0..h {
            for sx in 0..w {
                let (px, py) = (sx - d.0, sy - d.1);
                if px >= 0 && px < w && py >= 0 && py < h {
                    continue;
                }
                let mut line = Vec::new();
                let (mut x, mut y) = (sx, sy);
                while x >= 0 && x < w && y >= 0 && y < h {
                    line.push(roi.level(x, y));
                    x += d.0;
                    y += d.1;
                }
                let mut k = 0;
                while k < line.len() {
                    match line[k] {
                        None => k += 1,
                        Some(l) => {
                            let mut len = 0;
                            while k < line.len() && line[k] == Some(l) {
                                len += 1;
                                k += 1;
                            }
                            *counts.entry((l, len)).or_insert(0.0) += 1.0;
                        }
                    }
                }
            }
        }
        for (k, v) in emphasis(&counts, np) {
            *sum.entry(k).or_insert(0.0) += v;
        }
    }
    let avg: BTreeMap<&'static str, f64> = sum.into_iter().map(|(k, v)| (k, v / 4.0)).collect();
    insert_run_like(
        out,
        "GLRLM",
        &avg,
        [
            ("ShortRunEmphasis", "SmallJ"),
            ("LongRunEmphasis", "LargeJ"),
            ("GrayLevelNonUniformity", "GLN"),
            ("GrayLevelNonUniformityNormalized", "GLNN"),
            ("RunLengthNonUniformity", "JN"),
            ("RunLengthNonUniformityNormalized", "JNN"),
            ("RunPercentage", "Percentage"),
            ("GrayLevelVariance", "VarI"),
            ("RunVariance", "VarJ"),
            ("RunEntropy", "Entropy"),
            ("LowGrayLevelRunEmphasis", "LowI"),
            ("HighGrayLevelRunEmphasis", "HighI"),
            ("ShortRunLowGrayLevelEmphasis", "SmallJLowI"),
            ("ShortRunHighGrayLevelEmphasis", "SmallJHighI"),
            ("LongRunLowGrayLevelEmphasis", "LargeJLowI"),
            ("LongRunHighGrayLevelEmphasis", "LargeJHighI"),
        ],
    );
}

fn glszm(roi: &Roi, out: &mut BTreeMap<String, f64>) {
    let np = roi.pix.len() as f64;
    let mut seen = vec![false; roi.pix.len()];
    let mut counts: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for s in 0..roi.pix.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let level = roi.pix[s].2;
        let mut queue = VecDeque::from([s]);
        let mut size = 0;
        while let Some(a) = queue.pop_front() {
            size += 1;
            for b in 0..roi.pix.len() {
                if !seen[b]
                    && roi.pix[b].2 == level
                    && (roi.pix[b].0 - roi.pix[a].0).abs() <= 1
                    && (roi.pix[b].1 - roi.pix[a].1).abs() <= 1
                {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        *counts.entry((level, size)).or_insert(0.0) += 1.0;
    }
    let f = emphasis(&counts, np);
    insert_run_like(
        out,
        "GLSZM",
        &f,
        [
            ("SmallAreaEmphasis", "SmallJ"),
            ("LargeAreaEmphasis", "LargeJ"),
            ("GrayLevelNonUniformity", "GLN"),
            ("GrayLevelNonUniformityNormalized", "GLNN"),
            ("SizeZoneNonUniformity", "JN"),
            ("SizeZoneNonUniformityNormalized", "JNN"),
            ("ZonePercentage", "Percentage"),
            ("GrayLevelVariance", "VarI"),
            ("ZoneVariance", "VarJ"),
            ("ZoneEntropy", "Entropy"),
            ("LowGrayLevelZoneEmphasis", "LowI"),
            ("HighGrayLevelZoneEmphasis", "HighI"),
            ("SmallAreaLowGrayLevelEmphasis", "SmallJLowI"),
            ("SmallAreaHighGrayLevelEmphasis", "SmallJHighI"),
            ("LargeAreaLowGrayLevelEmphasis", "LargeJLowI"),
            ("LargeAreaHighGrayLevelEmphasis", "LargeJHighI"),
        ],
    );
}

fn is_neighbour(a: &(i64, i64, usize), b: &(i64, i64, usize)) -> bool {
    let (dx, dy) = ((a.0 - b.0).abs(), (a.1 - b.1).abs());
    dx <= 1 && dy <= 1 && (dx, dy) != (0, 0)
}

fn gldm(roi: &Roi, out: &mut BTreeMap<String, f64>) {
    let np = roi.pix.len() as f64;
    let mut counts: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for a in &roi.pix {
        let dep = roi
            .pix
            .iter()
            .filter(|b| is_neighbour(a, b) && b.2 == a.2)
            .count();
        *counts.entry((a.2, dep + 1)).or_insert(0.0) += 1.0;
    }
    let f = emphasis(&counts, np);
    for (name, key) in [
        ("SmallDependenceEmphasis", "SmallJ"),
        ("LargeDependenceEmphasis", "LargeJ"),
        ("GrayLevelNonUniformity", "GLN"),
        ("DependenceNonUniformity", "JN"),
        ("DependenceNonUniformityNormalized", "JNN"),
        ("GrayLevelVariance", "VarI"),
        ("DependenceVariance", "VarJ"),
        ("DependenceEntropy", "Entropy"),
        ("LowGrayLevelEmphasis", "LowI"),
        ("HighGrayLevelEmphasis", "HighI"),
        ("SmallDependenceLowGrayLevelEmphasis", "SmallJLowI"),
        ("SmallDependenceHighGrayLevelEmphasis", "SmallJHighI"),
        ("LargeDependenceLowGrayLevelEmphasis", "LargeJLowI"),
        ("LargeDependenceHighGrayLevelEmphasis", "LargeJHighI"),
    ] {
        out.insert(format!("GLDM_{name}"), f[key]);
    }
}

fn ngtdm(roi: &Roi, cap: f64, out: &mut BTreeMap<String, f64>) {
    let ng = roi.ng;
    let mut n = vec![0.0; ng + 1];
    let mut s = vec![0.0; ng + 1];
    for a in &roi.pix {
        let nb: Vec<f64> = roi
            .pix
            .iter()
            .filter(|b| is_neighbour(a, b))
            .map(|b| b.2 as f64)
            .collect();
        if nb.is_empty() {
            continue;
        }
        let avg = nb.iter().sum::<f64>() / nb.len() as f64;
        n[a.2] += 1.0;
        s[a.2] += (a.2 as f64 - avg).abs();
    }
    let nvp: f64 = n.iter().sum();
    let p: Vec<f64> = n.iter().map(|v| v / nvp).collect();
    let levels: Vec<usize> = (1..=ng).filter(|&i| p[i] > 0.0).collect();
    let ngp = levels.len() as f64;
    let ps: f64 = levels.iter().map(|&i| p[i] * s[i]).sum();
    let s_total: f64 = s.iter().sum();
    let mut contrast_pairs = 0.0;
    let mut busy_den = 0.0;
    let mut complexity = 0.0;
    let mut strength_num = 0.0;
    for &i in &levels {
        for &j in &levels {
            let (fi, fj) = (i as f64, j as f64);
            contrast_pairs += p[i] * p[j] * (fi - fj).powi(2);
            busy_den += (fi * p[i] - fj * p[j]).abs();
            complexity += (fi - fj).abs() * (p[i] * s[i] + p[j] * s[j]) / (p[i] + p[j]);
            strength_num += (p[i] + p[j]) * (fi - fj).powi(2);
        }
    }
    out.insert(
        "NGTDM_Coarseness".into(),
        if ps == 0.0 { cap } else { (1.0 / ps).min(cap) },
    );
    out.insert(
        "NGTDM_Contrast".into(),
        if ngp <= 1.0 {
            0.0
        } else {
            contrast_pairs / (ngp * (ngp - 1.0)) * s_total / nvp
        },
    );
    out.insert(
        "NGTDM_Busyness".into(),
        if busy_den == 0.0 { 0.0 } else { ps / busy_den },
    );
    out.insert(
        "NGTDM_Complexity".into(),
        if ngp <= 1.0 { 0.0 } else { complexity / nvp },
    );
    out.insert(
        "NGTDM_Strength".into(),
        if s_total == 0.0 { 0.0 } else { strength_num / s_total },
    );
}

/// All 93 features keyed by canonical name.
pub fn naive_features(inp: &NaiveInput, coarseness_cap: f64) -> BTreeMap<String, f64> {
    let roi = discretize(inp);
    let mut out = BTreeMap::new();
    first_order(inp, &roi, &mut out);
    glcm(&roi, &mut out);
    gldm(&roi, &mut out);
    glrlm(&roi, &mut out);
    glszm(&roi, &mut out);
    ngtdm(&roi, coarseness_cap, &mut out);
    out
}
