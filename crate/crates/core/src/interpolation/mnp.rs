//! Fujishige–Wolfe minimum-norm-point algorithm on the base polytope.
//!
//! The set function is integer-valued, so the numeric iterate only needs to
//! be good enough to certify: if the best level set `X` of a base `x`
//! satisfies `g(X) - x⁻(V) < 1/2` then `g(X)` is the exact minimum, because
//! every set has value at least `x⁻(V)`.

use nalgebra::{DMatrix, DVector};

use super::{GenericSetFn, Minimum};
use crate::error::{Error, Result};
use crate::ground::SubsetMask;

/// Tuning for the minimum-norm-point backend.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MnpConfig {
    /// Accept a candidate once its duality gap drops below this. Must be at
    /// most 1/2 for the rounding argument to hold.
    pub gap: f64,
    /// Combined budget of major and minor iterations.
    pub max_iterations: usize,
    pub eps: f64,
}

impl Default for MnpConfig {
    fn default() -> Self {
        MnpConfig { gap: 0.5, max_iterations: 20_000, eps: 1e-10 }
    }
}

struct Vertex {
    point: DVector<f64>,
}

/// Greedy vertex of the base polytope for the given element order; also
/// returns the best prefix set seen, which is the level-set certificate.
fn greedy_vertex(g: &GenericSetFn<'_>, offset: i64, order: &[usize]) -> (DVector<f64>, SubsetMask, i64) {
    let m = g.width();
    let mut point = DVector::zeros(m);
    let mut prefix = SubsetMask::empty(m);
    let mut prev = 0i64;
    let mut best_set = prefix.clone();
    let mut best_val = 0i64;
    for &e in order {
        prefix.insert(e);
        let v = g.eval(&prefix) - offset;
        point[e] = (v - prev) as f64;
        prev = v;
        if v < best_val {
            best_val = v;
            best_set = prefix.clone();
        }
    }
    (point, best_set, best_val)
}

fn ascending_order(x: &DVector<f64>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    order
}

fn negative_mass(x: &DVector<f64>) -> f64 {
    x.iter().map(|&v| v.min(0.0)).sum()
}

/// Coefficients `α` (summing to one) of the point of minimum norm in the
/// affine hull of `points`.
fn affine_minimizer(points: &[Vertex]) -> Option<DVector<f64>> {
    let r = points.len();
    let mut system = DMatrix::zeros(r + 1, r + 1);
    for i in 0..r {
        for j in 0..r {
            system[(i, j)] = points[i].point.dot(&points[j].point);
        }
        system[(i, r)] = 1.0;
        system[(r, i)] = 1.0;
    }
    let mut rhs = DVector::zeros(r + 1);
    rhs[r] = 1.0;
    let sol = system.clone().lu().solve(&rhs).or_else(|| {
        let svd = system.svd(true, true);
        svd.solve(&rhs, 1e-12).ok()
    })?;
    let alpha = sol.rows(0, r).into_owned();
    alpha.iter().all(|v| v.is_finite()).then_some(alpha)
}

fn combine(points: &[Vertex], weights: &DVector<f64>, m: usize) -> DVector<f64> {
    let mut x = DVector::zeros(m);
    for (p, &w) in points.iter().zip(weights.iter()) {
        x.axpy(w, &p.point, 1.0);
    }
    x
}

pub(super) fn minimize(g: &GenericSetFn<'_>, cfg: &MnpConfig) -> Result<Minimum> {
    let m = g.width();
    let offset = g.eval(&SubsetMask::empty(m));
    let identity: Vec<usize> = (0..m).collect();
    let (first, mut best_set, mut best_val) = greedy_vertex(g, offset, &identity);
    let mut corral = vec![Vertex { point: first }];
    let mut weights = DVector::from_element(1, 1.0);
    let mut x = corral[0].point.clone();
    let mut iterations = 0;

    loop {
        let order = ascending_order(&x);
        let (q, set, val) = greedy_vertex(g, offset, &order);
        if val < best_val {
            best_val = val;
            best_set = set;
        }
        let gap = best_val as f64 - negative_mass(&x);
        if gap < cfg.gap {
            return Ok(Minimum { set: best_set, value: best_val + offset, certified_gap: Some(gap) });
        }
        let xx = x.dot(&x);
        let scale = 1.0 + xx;
        if xx - x.dot(&q) <= cfg.eps * scale || corral.iter().any(|v| (&v.point - &q).norm() <= cfg.eps * scale) {
            return Err(Error::Backend(format!(
                "min-norm point converged with duality gap {gap:.3} >= {}; use the exhaustive backend",
                cfg.gap
            )));
        }
        corral.push(Vertex { point: q });
        weights = weights.push(0.0);

        loop {
            iterations += 1;
            if iterations > cfg.max_iterations {
                return Err(Error::Backend(format!(
                    "min-norm point did not certify within {} iterations; use the exhaustive backend",
                    cfg.max_iterations
                )));
            }
            let Some(alpha) = affine_minimizer(&corral) else {
                return Err(Error::Backend("singular affine system; use the exhaustive backend".into()));
            };
            if alpha.iter().all(|&a| a > cfg.eps) {
                weights = alpha;
                x = combine(&corral, &weights, m);
                break;
            }
            // Step from the current weights toward alpha until some weight hits zero.
            let mut theta = 1.0f64;
            for (l, a) in weights.iter().zip(alpha.iter()) {
                if *a <= cfg.eps && l - a > 0.0 {
                    theta = theta.min(l / (l - a));
                }
            }
            weights = &weights * (1.0 - theta) + &alpha * theta;
            let keep: Vec<usize> = (0..corral.len()).filter(|&i| weights[i] > cfg.eps).collect();
            let kept_weights: Vec<f64> = keep.iter().map(|&i| weights[i]).collect();
            let total: f64 = kept_weights.iter().sum();
            let mut idx = 0;
            corral.retain(|_| {
                let keep_it = keep.contains(&idx);
                idx += 1;
                keep_it
            });
            weights = DVector::from_vec(kept_weights.into_iter().map(|w| w / total).collect());
        }
    }
}
