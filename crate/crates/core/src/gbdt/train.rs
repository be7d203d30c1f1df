use crate::error::{Error, Result};
use crate::gbdt::{softmax_in_place, GbdtHyperparams, GbdtModel, Node};

const HESSIAN_FLOOR: f64 = 1e-16;
const NONE: u32 = u32::MAX;

/// Column-major copy of the design matrix with one ascending sample order
/// per feature (ties keep sample order).
struct Columns {
    values: Vec<Vec<f64>>,
    order: Vec<Vec<u32>>,
}

impl Columns {
    fn new(x: &[Vec<f64>], d: usize) -> Self {
        let values: Vec<Vec<f64>> = (0..d).map(|f| x.iter().map(|r| r[f]).collect()).collect();
        let order = values
            .iter()
            .map(|col| {
                let mut idx: Vec<u32> = (0..col.len() as u32).collect();
                idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
                idx
            })
            .collect();
        Self { values, order }
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

enum Slot {
    Pending { g: f64, h: f64 },
    Leaf(f64),
    Split { feature: usize, threshold: f64, gain: f64, left: usize, right: usize },
}

fn midpoint(a: f64, b: f64) -> f64 {
    let t = a + (b - a) * 0.5;
    if t > a { t } else { b }
}

fn leaf_weight(g: f64, h: f64, hp: &GbdtHyperparams) -> f64 {
    -hp.learning_rate * g / (h + hp.l2_reg)
}

fn score(g: f64, h: f64, lambda: f64) -> f64 {
    g * g / (h + lambda)
}

/// Level-wise exact greedy growth of one regression tree on (grad, hess).
fn grow_tree(cols: &Columns, grad: &[f64], hess: &[f64], hp: &GbdtHyperparams) -> Node {
    let n = grad.len();
    let lambda = hp.l2_reg;
    let (g0, h0) = grad.iter().zip(hess).fold((0.0, 0.0), |(a, b), (g, h)| (a + g, b + h));
    let mut arena = vec![Slot::Pending { g: g0, h: h0 }];
    // frontier position of every sample, indexing into `frontier`
    let mut pos = vec![0u32; n];
    let mut frontier: Vec<usize> = vec![0];

    for _depth in 0..hp.max_depth {
        if frontier.is_empty() {
            break;
        }
        let totals: Vec<(f64, f64)> = frontier
            .iter()
            .map(|&s| match arena[s] {
                Slot::Pending { g, h } => (g, h),
                _ => unreachable!(),
            })
            .collect();
        let mut best: Vec<Option<Candidate>> = vec![None; frontier.len()];
        let mut acc = vec![(0.0f64, 0.0f64, f64::NAN, false); frontier.len()];
        for (f, order) in cols.order.iter().enumerate() {
            let col = &cols.values[f];
            acc.iter_mut().for_each(|a| *a = (0.0, 0.0, f64::NAN, false));
            for &i in order {
                let p = pos[i as usize];
                if p == NONE {
                    continue;
                }
                let p = p as usize;
                let v = col[i as usize];
                let a = &mut acc[p];
                if a.3 && v > a.2 {
                    let (gl, hl) = (a.0, a.1);
                    let (g, h) = totals[p];
                    let (gr, hr) = (g - gl, h - hl);
                    if hl >= hp.min_child_weight && hr >= hp.min_child_weight {
                        let gain = 0.5 * (score(gl, hl, lambda) + score(gr, hr, lambda) - score(g, h, lambda));
                        if best[p].is_none_or(|b| gain > b.gain) {
                            best[p] = Some(Candidate { gain, feature: f, threshold: midpoint(a.2, v) });
                        }
                    }
                }
                a.0 += grad[i as usize];
                a.1 += hess[i as usize];
                a.2 = v;
                a.3 = true;
            }
        }

        let mut next = Vec::new();
        let mut remap = vec![(NONE, NONE, 0usize, 0.0f64); frontier.len()];
        for (p, &slot) in frontier.iter().enumerate() {
            let (g, h) = totals[p];
            match best[p] {
                Some(c) if c.gain > hp.min_split_gain && c.gain > 0.0 => {
                    let (l, r) = (arena.len(), arena.len() + 1);
                    arena.push(Slot::Pending { g: 0.0, h: 0.0 });
                    arena.push(Slot::Pending { g: 0.0, h: 0.0 });
                    arena[slot] = Slot::Split {
                        feature: c.feature,
                        threshold: c.threshold,
                        gain: c.gain,
                        left: l,
                        right: r,
                    };
                    remap[p] = (next.len() as u32, next.len() as u32 + 1, c.feature, c.threshold);
                    next.push(l);
                    next.push(r);
                }
                _ => arena[slot] = Slot::Leaf(leaf_weight(g, h, hp)),
            }
        }
        for i in 0..n {
            let p = pos[i];
            if p == NONE {
                continue;
            }
            let (l, r, f, t) = remap[p as usize];
            if l == NONE {
                pos[i] = NONE;
                continue;
            }
            let child = if cols.values[f][i] < t { l } else { r };
            pos[i] = child;
            if let Slot::Pending { g, h } = &mut arena[next[child as usize]] {
                *g += grad[i];
                *h += hess[i];
            }
        }
        frontier = next;
    }
    for &s in &frontier {
        if let Slot::Pending { g, h } = arena[s] {
            arena[s] = Slot::Leaf(leaf_weight(g, h, hp));
        }
    }
    build(&arena, 0)
}

fn build(arena: &[Slot], i: usize) -> Node {
    match arena[i] {
        Slot::Leaf(weight) => Node::Leaf { weight },
        Slot::Split { feature, threshold, gain, left, right } => Node::Split {
            feature,
            threshold,
            gain,
            left: Box::new(build(arena, left)),
            right: Box::new(build(arena, right)),
        },
        Slot::Pending { .. } => unreachable!("every slot is resolved before build"),
    }
}

/// Fits one tree per category per round on the softmax cross-entropy.
/// `y` holds category indices into `categories`.
pub fn train(
    x: &[Vec<f64>],
    y: &[usize],
    feature_names: &[String],
    categories: &[String],
    hp: &GbdtHyperparams,
) -> Result<GbdtModel> {
    hp.validate()?;
    let n = x.len();
    let d = feature_names.len();
    let k = categories.len();
    if y.len() != n {
        return Err(Error::InvalidArgument(format!("{} rows but {} labels", n, y.len())));
    }
    if let Some(r) = x.iter().position(|r| r.len() != d) {
        return Err(Error::InvalidArgument(format!("row {r} does not have {d} features")));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("feature values must be finite".into()));
    }
    if let Some(&bad) = y.iter().find(|&&c| c >= k) {
        return Err(Error::UnknownLabel(format!("category index {bad}")));
    }
    let mut present = vec![false; k];
    y.iter().for_each(|&c| present[c] = true);
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(Error::DegenerateTraining("fewer than two distinct labels".into()));
    }

    let cols = Columns::new(x, d);
    let mut margins = vec![0.0; n * k];
    let mut prob = vec![0.0; n * k];
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    let mut trees = Vec::with_capacity(hp.n_rounds);
    for _ in 0..hp.n_rounds {
        prob.copy_from_slice(&margins);
        prob.chunks_mut(k).for_each(softmax_in_place);
        let mut round = Vec::with_capacity(k);
        for c in 0..k {
            for i in 0..n {
                let p = prob[i * k + c];
                grad[i] = p - if y[i] == c { 1.0 } else { 0.0 };
                hess[i] = (p * (1.0 - p)).max(HESSIAN_FLOOR);
            }
            round.push(grow_tree(&cols, &grad, &hess, hp));
        }
        for (i, row) in x.iter().enumerate() {
            for (c, tree) in round.iter().enumerate() {
                margins[i * k + c] += tree.eval(row);
            }
        }
        trees.push(round);
    }
    Ok(GbdtModel {
        feature_names: feature_names.to_vec(),
        categories: categories.to_vec(),
        base_score: 0.0,
        hyperparams: hp.clone(),
        trees,
    })
}
