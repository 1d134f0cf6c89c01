//! Linear separability of two finite point sets.
//!
//! Two convex hulls are disjoint exactly when the origin lies outside the
//! Minkowski difference `conv(A) - conv(B)`. The point of that polytope
//! closest to the origin gives the hard-margin separating hyperplane: its
//! norm is the hull distance (twice the margin) and its direction is the
//! hyperplane normal. It is found with Wolfe's minimum-norm-point method,
//! never materializing the `|A|·|B|` difference vertices: the linear
//! minimization over the difference splits into one minimization over `A`
//! and one maximization over `B`.
//!
//! Every iterate carries a certificate. The current point `x` bounds the
//! distance from above by `|x|`, and the best vertex `v` bounds it from below
//! by `x·v / |x|`, so the loop stops as soon as either bound clears the
//! tolerance.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative slack for optimality and barycentric-weight tests.
const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Separation {
    /// Distance between the hulls; an upper bound when not fully converged.
    pub distance: f64,
    /// Lower bound on the distance certified by `normal`.
    pub certified_gap: f64,
    /// Normal of the separating hyperplane, pointing from `B` toward `A`.
    pub normal: Vec<f64>,
    /// Hyperplane offset: points with `normal·p > offset` are on `A`'s side.
    pub offset: f64,
    pub separable: bool,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn argmin_dot<P: AsRef<[f64]>>(points: &[P], direction: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, p) in points.iter().enumerate() {
        let value = dot(p.as_ref(), direction);
        if value < best.1 {
            best = (i, value);
        }
    }
    best
}

fn argmax_dot<P: AsRef<[f64]>>(points: &[P], direction: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, p) in points.iter().enumerate() {
        let value = dot(p.as_ref(), direction);
        if value > best.1 {
            best = (i, value);
        }
    }
    best
}

/// Solves `M y = rhs` for a symmetric positive definite `M` by Cholesky.
/// Returns `None` when `M` is numerically singular.
fn cholesky_solve(m: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let scale = (0..n).map(|i| m[i][i].abs()).fold(0.0, f64::max).max(1.0);
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let partial: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            let value = m[i][j] - partial;
            if i == j {
                if value <= scale * 1e-13 {
                    return None;
                }
                l[i][i] = value.sqrt();
            } else {
                l[i][j] = value / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let partial: f64 = (0..i).map(|k| l[i][k] * y[k]).sum();
        y[i] = (rhs[i] - partial) / l[i][i];
    }
    for i in (0..n).rev() {
        let partial: f64 = (i + 1..n).map(|k| l[k][i] * y[k]).sum();
        y[i] = (y[i] - partial) / l[i][i];
    }
    Some(y)
}

/// Vertices of the difference polytope currently supporting the iterate.
struct Corral {
    pairs: Vec<(usize, usize)>,
    vectors: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl Corral {
    fn combination(&self, coefficients: &[f64], dim: usize) -> Vec<f64> {
        let mut x = vec![0.0; dim];
        for (v, &c) in self.vectors.iter().zip(coefficients) {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += c * vi;
            }
        }
        x
    }

    /// Barycentric coordinates of the minimum-norm point of the affine hull.
    fn affine_minimizer(&self) -> Option<Vec<f64>> {
        let k = self.vectors.len();
        let m: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| 1.0 + dot(&self.vectors[i], &self.vectors[j]))
                    .collect()
            })
            .collect();
        let raw = cholesky_solve(&m, &vec![1.0; k])?;
        let total: f64 = raw.iter().sum();
        if !(total.is_finite() && total.abs() > 0.0) {
            return None;
        }
        Some(raw.into_iter().map(|a| a / total).collect())
    }

    fn drop_zero_weights(&mut self) {
        let mut i = 0;
        while i < self.weights.len() {
            if self.weights[i] <= EPS {
                self.pairs.swap_remove(i);
                self.vectors.swap_remove(i);
                self.weights.swap_remove(i);
            } else {
                i += 1;
            }
        }
        let total: f64 = self.weights.iter().sum();
        self.weights.iter_mut().for_each(|w| *w /= total);
    }
}

fn check_sets<P: AsRef<[f64]>, Q: AsRef<[f64]>>(a: &[P], b: &[Q]) -> Result<usize> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::contract("separability needs two nonempty point sets"));
    }
    let dim = a[0].as_ref().len();
    for p in a.iter().map(AsRef::as_ref).chain(b.iter().map(AsRef::as_ref)) {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
    }
    Ok(dim)
}

/// Maximal-margin separation of `a` from `b`, solved to optimality.
///
/// `separable` is true when the hulls are at least `tolerance` apart.
pub fn max_margin<P: AsRef<[f64]>, Q: AsRef<[f64]>>(
    a: &[P],
    b: &[Q],
    tolerance: f64,
) -> Result<Separation> {
    solve(a, b, tolerance, false)
}

/// With `stop_on_certificate`, the search ends as soon as some normal proves
/// a gap above `tolerance`, leaving `distance` as an upper bound only.
fn solve<P: AsRef<[f64]>, Q: AsRef<[f64]>>(
    a: &[P],
    b: &[Q],
    tolerance: f64,
    stop_on_certificate: bool,
) -> Result<Separation> {
    let dim = check_sets(a, b)?;
    let vertex = |i: usize, j: usize| -> Vec<f64> {
        a[i].as_ref()
            .iter()
            .zip(b[j].as_ref())
            .map(|(p, q)| p - q)
            .collect()
    };
    let scale = a
        .iter()
        .map(AsRef::as_ref)
        .chain(b.iter().map(AsRef::as_ref))
        .map(|p| dot(p, p))
        .fold(0.0, f64::max)
        .max(1.0);

    let mut corral = Corral {
        pairs: vec![(0, 0)],
        vectors: vec![vertex(0, 0)],
        weights: vec![1.0],
    };
    let mut x = corral.vectors[0].clone();
    let max_iterations = 50 * (a.len() + b.len() + dim) + 100;

    let mut best_gap = f64::NEG_INFINITY;
    let mut best_normal = x.clone();
    let mut iterations = 0;
    let mut done = false;
    let mut optimal = false;

    while iterations < max_iterations && !done {
        iterations += 1;
        let norm_sq = dot(&x, &x);
        let norm = norm_sq.sqrt();
        if norm <= tolerance {
            break;
        }
        let (ia, low_a) = argmin_dot(a, &x);
        let (jb, high_b) = argmax_dot(b, &x);
        let support = low_a - high_b;
        let gap = support / norm;
        if gap > best_gap {
            best_gap = gap;
            best_normal = x.clone();
        }
        if stop_on_certificate && gap > tolerance {
            break;
        }
        if norm_sq - support <= EPS * scale || corral.pairs.contains(&(ia, jb)) {
            optimal = true;
            break;
        }
        corral.pairs.push((ia, jb));
        corral.vectors.push(vertex(ia, jb));
        corral.weights.push(0.0);

        loop {
            let Some(alpha) = corral.affine_minimizer() else {
                done = true;
                break;
            };
            if alpha.iter().all(|&w| w > EPS) {
                corral.weights = alpha;
                x = corral.combination(&corral.weights, dim);
                break;
            }
            let theta = corral
                .weights
                .iter()
                .zip(&alpha)
                .filter(|(_, &al)| al <= EPS)
                .map(|(&w, &al)| w / (w - al))
                .fold(1.0, f64::min)
                .clamp(0.0, 1.0);
            for (w, al) in corral.weights.iter_mut().zip(&alpha) {
                *w = (1.0 - theta) * *w + theta * al;
            }
            let before = corral.weights.len();
            corral.drop_zero_weights();
            if corral.weights.len() == before {
                // Rounding kept every weight alive; drop the smallest.
                let (smallest, _) = corral
                    .weights
                    .iter()
                    .enumerate()
                    .fold((0, f64::INFINITY), |acc, (i, &w)| if w < acc.1 { (i, w) } else { acc });
                corral.weights[smallest] = 0.0;
                corral.drop_zero_weights();
            }
            x = corral.combination(&corral.weights, dim);
            if corral.weights.is_empty() {
                done = true;
                break;
            }
        }
    }

    let distance = dot(&x, &x).sqrt();
    let norm = dot(&best_normal, &best_normal).sqrt();
    let (normal, offset) = if norm > 0.0 {
        let unit: Vec<f64> = best_normal.iter().map(|v| v / norm).collect();
        let (_, low_a) = argmin_dot(a, &unit);
        let (_, high_b) = argmax_dot(b, &unit);
        (unit, 0.5 * (low_a + high_b))
    } else {
        (vec![0.0; dim], 0.0)
    };
    let certified_gap = best_gap.max(0.0);
    Ok(Separation {
        distance,
        certified_gap,
        normal,
        offset,
        separable: best_gap > tolerance || (optimal && distance > tolerance && best_gap > 0.0),
        iterations,
    })
}

/// Whether a hyperplane strictly separates the two sets by more than
/// `tolerance`. Symmetric in its arguments.
pub fn separable<P: AsRef<[f64]>, Q: AsRef<[f64]>>(a: &[P], b: &[Q], tolerance: f64) -> Result<bool> {
    Ok(solve(a, b, tolerance, true)?.separable)
}
