//! Log-barrier interior-point maximization of one player's objective over
//! the coefficient polytope.
//!
//! Damped Newton steps on `-F(v) - μ Σ ln s_k(v)` follow the central path as
//! `μ` drops by factors of ten to `inner_tol / m` (`m` half-spaces), so the
//! final duality gap is at most `inner_tol`. A last face solve snaps rows that
//! are active at the optimum onto their bounds; it is kept only when it does
//! not lower the objective.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::objective::DiscretizedObjective;
use super::SolverConfig;
use crate::error::{Error, Result};
use crate::poly;

const ARMIJO: f64 = 1e-4;
const FRACTION_TO_BOUNDARY: f64 = 0.99;
const INTERMEDIATE_DECREMENT: f64 = 1e-6;
const FINAL_DECREMENT: f64 = 1e-24;

/// Outcome of [`best_response`].
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse {
    pub coeffs: Vec<f64>,
    pub value: f64,
    pub newton_steps: usize,
    /// False when the Newton budget ran out or a line search stalled
    /// before the final barrier stage was centred.
    pub converged: bool,
    /// The active-face solve improved on the barrier iterate.
    pub polished: bool,
}

struct Barrier<'o, 'a> {
    obj: &'o DiscretizedObjective<'a>,
    lo: f64,
    hi: f64,
    bound: f64,
}

struct Local {
    phi: f64,
    value: f64,
    gradient: DVector<f64>,
    hessian: DMatrix<f64>,
}

impl Barrier<'_, '_> {
    fn constraints(&self) -> usize {
        2 * self.obj.row_count() + 2 * self.obj.dimension()
    }

    fn strictly_feasible(&self, v: &[f64]) -> bool {
        v.iter().all(|c| c.abs() < self.bound) && self.obj.row_values(v).iter().all(|&x| self.lo < x && x < self.hi)
    }

    fn log_barrier(&self, v: &[f64], xs: &[f64]) -> f64 {
        let rows: f64 = xs
            .iter()
            .map(|&x| libm::log(x - self.lo) + libm::log(self.hi - x))
            .sum();
        let boxes: f64 = v
            .iter()
            .map(|&c| libm::log(self.bound - c) + libm::log(self.bound + c))
            .sum();
        rows + boxes
    }

    fn phi(&self, v: &[f64], mu: f64) -> f64 {
        let xs = self.obj.row_values(v);
        -self.obj.value_at_actions(&xs) - mu * self.log_barrier(v, &xs)
    }

    fn local(&self, v: &[f64], mu: f64) -> Result<Local> {
        let d = self.obj.derivatives(v)?;
        let xs = self.obj.row_values(v);
        let dim = self.obj.dimension();
        let mut gradient = -d.gradient;
        let mut hessian = -d.hessian;
        for (k, &x) in xs.iter().enumerate() {
            let (sl, sh) = (x - self.lo, self.hi - x);
            let r = self.obj.row(k);
            let g = mu * (1.0 / sl - 1.0 / sh);
            let h = mu * (1.0 / (sl * sl) + 1.0 / (sh * sh));
            for a in 0..dim {
                gradient[a] -= g * r[a];
                for b in 0..dim {
                    hessian[(a, b)] += h * r[a] * r[b];
                }
            }
        }
        for (a, &c) in v.iter().enumerate() {
            let (sl, sh) = (self.bound + c, self.bound - c);
            gradient[a] -= mu * (1.0 / sl - 1.0 / sh);
            hessian[(a, a)] += mu * (1.0 / (sl * sl) + 1.0 / (sh * sh));
        }
        let phi = -d.value - mu * self.log_barrier(v, &xs);
        Ok(Local {
            phi,
            value: d.value,
            gradient,
            hessian,
        })
    }

    /// Largest step in `(0, 1]` keeping a fixed fraction of every slack.
    fn max_step(&self, v: &[f64], dir: &[f64]) -> f64 {
        let mut t = 1.0f64;
        for k in 0..self.obj.row_count() {
            let r = self.obj.row(k);
            let x = poly::dot_slices(r, v);
            let dx = poly::dot_slices(r, dir);
            if dx < 0.0 {
                t = t.min(FRACTION_TO_BOUNDARY * (x - self.lo) / -dx);
            } else if dx > 0.0 {
                t = t.min(FRACTION_TO_BOUNDARY * (self.hi - x) / dx);
            }
        }
        for (&c, &dc) in v.iter().zip(dir) {
            if dc < 0.0 {
                t = t.min(FRACTION_TO_BOUNDARY * (self.bound + c) / -dc);
            } else if dc > 0.0 {
                t = t.min(FRACTION_TO_BOUNDARY * (self.bound - c) / dc);
            }
        }
        t
    }
}

/// Newton direction for `H Δ = -g` with Jacobi scaling and Levenberg
/// regularization when `H` is not positive definite.
fn newton_direction(hessian: &DMatrix<f64>, gradient: &DVector<f64>) -> Option<DVector<f64>> {
    let dim = gradient.len();
    let scale: Vec<f64> = (0..dim)
        .map(|a| {
            let h = hessian[(a, a)].abs();
            if h > 0.0 && h.is_finite() {
                1.0 / libm::sqrt(h)
            } else {
                1.0
            }
        })
        .collect();
    let scaled = DMatrix::from_fn(dim, dim, |a, b| hessian[(a, b)] * scale[a] * scale[b]);
    let rhs = DVector::from_fn(dim, |a, _| -gradient[a] * scale[a]);
    let mut tau = 0.0;
    for _ in 0..24 {
        let mut m = scaled.clone();
        for a in 0..dim {
            m[(a, a)] += tau;
        }
        if let Some(ch) = m.cholesky() {
            let y = ch.solve(&rhs);
            let dir = DVector::from_fn(dim, |a, _| y[a] * scale[a]);
            if dir.iter().all(|x| x.is_finite()) {
                return Some(dir);
            }
        }
        tau = if tau == 0.0 { 1e-12 } else { tau * 100.0 };
    }
    None
}

/// Pulls a feasible point strictly inside by mixing in the midpoint constant
/// rule.
fn strictly_interior_start(barrier: &Barrier<'_, '_>, warm: &[f64]) -> Vec<f64> {
    let dim = barrier.obj.dimension();
    let mut centre = vec![0.0; dim];
    centre[0] = 0.5 * (barrier.lo + barrier.hi);
    if warm.len() == dim && warm.iter().all(|c| c.is_finite()) {
        if barrier.strictly_feasible(warm) {
            return warm.to_vec();
        }
        for t in [1e-9, 1e-6, 1e-4, 1e-2, 0.1, 0.5] {
            let v: Vec<f64> = warm.iter().zip(&centre).map(|(w, c)| (1.0 - t) * w + t * c).collect();
            if barrier.strictly_feasible(&v) {
                return v;
            }
        }
    }
    centre
}

/// Best-fit `μ` for which `v` is closest to the central path, clamped to
/// `[mu_min, 1]`.
fn initial_mu(barrier: &Barrier<'_, '_>, v: &[f64], mu_min: f64) -> Result<f64> {
    let objective = barrier.local(v, 0.0)?.gradient; // -∇F
    let with_barrier = barrier.local(v, 1.0)?.gradient; // -∇F - ∇ log-barrier
    let bar = &with_barrier - &objective;
    let denom = bar.dot(&bar);
    if !(denom > 0.0) {
        return Ok(1.0);
    }
    // minimize ‖objective + μ bar‖
    let mu = -objective.dot(&bar) / denom;
    Ok(if mu.is_finite() { mu.clamp(mu_min, 1.0) } else { 1.0 })
}

/// Maximizes the sample-average utility over the coefficient polytope.
///
/// `warm_start` need not be feasible; infeasible or empty starts fall back
/// to the midpoint constant rule. The returned point is never worse than a
/// feasible warm start.
pub fn best_response(obj: &DiscretizedObjective<'_>, warm_start: &[f64], cfg: &SolverConfig) -> Result<BestResponse> {
    let bounds = obj.bounds();
    let barrier = Barrier {
        obj,
        lo: bounds.lo(),
        hi: bounds.hi(),
        bound: cfg.coeff_box,
    };
    let mu_final = cfg.inner_tol / barrier.constraints() as f64;

    let mut v = strictly_interior_start(&barrier, warm_start);
    let mut mu = initial_mu(&barrier, &v, mu_final)?;
    let mut steps = 0usize;
    let mut converged = false;

    'stages: loop {
        let last_stage = mu <= mu_final;
        let target = if last_stage {
            FINAL_DECREMENT
        } else {
            INTERMEDIATE_DECREMENT
        };
        loop {
            if steps >= cfg.inner_max_newton {
                break 'stages;
            }
            let here = barrier.local(&v, mu)?;
            let Some(dir) = newton_direction(&here.hessian, &here.gradient) else {
                break 'stages;
            };
            let slope = here.gradient.dot(&dir);
            let decrement = -slope;
            if !(decrement > target) {
                break;
            }
            steps += 1;
            let dir: Vec<f64> = dir.iter().copied().collect();
            let mut t = barrier.max_step(&v, &dir);
            let noise = 8.0 * f64::EPSILON * (1.0 + here.phi.abs() + here.value.abs());
            let mut accepted = None;
            for _ in 0..60 {
                let trial: Vec<f64> = v.iter().zip(&dir).map(|(a, b)| a + t * b).collect();
                if barrier.strictly_feasible(&trial) {
                    let phi = barrier.phi(&trial, mu);
                    if phi.is_finite() && phi <= here.phi + ARMIJO * t * slope + noise {
                        accepted = Some(trial);
                        break;
                    }
                }
                t *= 0.5;
            }
            match accepted {
                Some(next) => {
                    let moved = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    v = next;
                    let scale = v.iter().fold(1.0f64, |m, c| m.max(c.abs()));
                    if last_stage && moved <= 4.0 * f64::EPSILON * scale {
                        break;
                    }
                }
                None if last_stage && decrement < 1e-16 => break,
                None => break 'stages,
            }
        }
        if last_stage {
            converged = true;
            break;
        }
        mu = (mu / 10.0).max(mu_final);
    }

    let barrier_value = obj.expected_utility(&v);
    let mut best = (v.clone(), barrier_value);
    let mut polished = false;
    if let Some((p, value)) = polish(&barrier, &v, barrier_value, mu_final) {
        if value >= best.1 {
            best = (p, value);
            polished = true;
        }
    }
    if warm_start.len() == obj.dimension() && obj.is_feasible(warm_start) {
        let value = obj.expected_utility(warm_start);
        if value > best.1 {
            best = (warm_start.to_vec(), value);
            polished = false;
        }
    }
    if !best.1.is_finite() {
        return Err(Error::NonFinite {
            context: "best response value",
            point: best.0,
        });
    }
    Ok(BestResponse {
        coeffs: best.0,
        value: best.1,
        newton_steps: steps,
        converged,
        polished,
    })
}

/// Maximizes the objective on the face where the nearly active rows hold
/// with equality, starting from the barrier iterate `v`.
fn polish(barrier: &Barrier<'_, '_>, v: &[f64], value: f64, mu: f64) -> Option<(Vec<f64>, f64)> {
    let obj = barrier.obj;
    let dim = obj.dimension();
    let width = barrier.hi - barrier.lo;
    let tol = 10.0 * libm::sqrt(mu) * width.max(1.0);
    let xs = obj.row_values(v);
    let mut active_rows = Vec::new();
    let mut targets = Vec::new();
    for (k, &x) in xs.iter().enumerate() {
        if x - barrier.lo <= tol {
            active_rows.push(k);
            targets.push(barrier.lo);
        } else if barrier.hi - x <= tol {
            active_rows.push(k);
            targets.push(barrier.hi);
        }
    }
    if active_rows.is_empty() {
        return None;
    }
    let a = DMatrix::from_fn(active_rows.len(), dim, |r, c| obj.row(active_rows[r])[c]);
    let residual = DVector::from_fn(active_rows.len(), |r, _| targets[r] - xs[active_rows[r]]);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = 1e-10 * smax;
    let correction = svd.solve(&residual, eps).ok()?;
    let mut p: Vec<f64> = v.iter().zip(correction.iter()).map(|(x, c)| x + c).collect();

    // optimize within the null space of the active rows
    let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
    let null = complete_null_space(&a, rank);
    if !null.is_empty() {
        let basis = DMatrix::from_columns(&null);
        for _ in 0..20 {
            let d = obj.derivatives(&p).ok()?;
            let g = basis.transpose() * &d.gradient;
            let h = -(basis.transpose() * &d.hessian * &basis);
            let Some(step) = newton_direction(&h, &-g.clone()) else {
                break;
            };
            let delta = &basis * &step;
            let gain = g.dot(&step);
            if !(gain > 1e-30) {
                break;
            }
            let mut t = 1.0;
            let base = obj.expected_utility(&p);
            let mut moved = false;
            for _ in 0..40 {
                let trial: Vec<f64> = p.iter().zip(delta.iter()).map(|(x, dx)| x + t * dx).collect();
                if inactive_feasible(barrier, &trial, &active_rows) && obj.expected_utility(&trial) >= base {
                    p = trial;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if !moved {
                break;
            }
        }
    }

    // rounding can leave snapped rows a hair outside their bounds
    let mut best: Option<(Vec<f64>, f64)> = None;
    for t in [1.0, 1.0 - 1e-12, 1.0 - 1e-9, 1.0 - 1e-6, 1.0 - 1e-3] {
        let trial: Vec<f64> = v.iter().zip(&p).map(|(b, q)| b + t * (q - b)).collect();
        if obj.is_feasible(&trial) {
            let val = obj.expected_utility(&trial);
            if val >= value {
                best = Some((trial, val));
            }
            break;
        }
    }
    best
}

fn inactive_feasible(barrier: &Barrier<'_, '_>, v: &[f64], active: &[usize]) -> bool {
    let obj = barrier.obj;
    v.iter().all(|c| c.abs() <= barrier.bound)
        && (0..obj.row_count()).all(|k| {
            active.binary_search(&k).is_ok() || {
                let x = poly::dot_slices(obj.row(k), v);
                barrier.lo <= x && x <= barrier.hi
            }
        })
}

/// Orthonormal basis of `{z : A z = 0}` for a matrix of the given rank.
fn complete_null_space(a: &DMatrix<f64>, rank: usize) -> Vec<DVector<f64>> {
    let dim = a.ncols();
    // SVD of the square Gram matrix exposes every right singular vector
    let gram = a.transpose() * a;
    let svd = gram.svd(false, true);
    let Some(v_t) = svd.v_t else { return Vec::new() };
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    order[rank.min(dim)..].iter().map(|&r| v_t.row(r).transpose()).collect()
}
