use alloc::vec::Vec;

use crate::error::Result;
use crate::model::{GameSpec, Interval};
use crate::poly;
use crate::quantize::QuantizedMeasure;
use crate::solver::{best_response, DiscretizedObjective, SolverConfig};
use crate::strategy::StrategyProfile;
use crate::sum::Accumulator;

const GOLDEN_ITERATIONS: usize = 200;
const BISECTION_ITERATIONS: usize = 200;

/// Maximizes a function of one action over `bounds`, given `g(a) = (value,
/// derivative)`.
///
/// Candidates are both endpoints, a golden-section search and a bisection
/// on the first-order condition; the best one wins, earliest on ties.
pub fn pointwise_best_action<G>(mut g: G, bounds: Interval) -> (f64, f64)
where
    G: FnMut(f64) -> (f64, f64),
{
    let (lo, hi) = (bounds.lo(), bounds.hi());
    let mut candidates = Vec::with_capacity(4);
    candidates.push(lo);
    candidates.push(hi);

    let ratio = 0.5 * (libm::sqrt(5.0) - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (g(x1).0, g(x2).0);
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = g(x2).0;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = g(x1).0;
        }
        if b - a <= f64::EPSILON * (1.0 + a.abs().max(b.abs())) {
            break;
        }
    }
    candidates.push(0.5 * (a + b));

    if g(lo).1 > 0.0 && g(hi).1 < 0.0 {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..BISECTION_ITERATIONS {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if g(m).1 > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        candidates.push(0.5 * (a + b));
    }

    let mut best = (candidates[0], g(candidates[0]).0);
    for &x in &candidates[1..] {
        let v = g(x).0;
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichReport {
    /// Value of the discretized best response.
    pub best_response: f64,
    /// `Σ_j p_j max_a u_i(a, ·, θ^j)`.
    pub upper: f64,
    /// Value of the Bernstein fit of the pointwise best-response curve.
    pub lower: f64,
}

impl SandwichReport {
    pub fn holds(&self, slack: f64) -> bool {
        self.best_response <= self.upper + slack && self.best_response >= self.lower - slack
    }
}

/// Brackets player `i`'s discretized best-response value between the
/// atom-wise pointwise optimum and a fitted feasible rule.
pub fn sandwich_check(
    game: &GameSpec,
    sample: &QuantizedMeasure,
    player: usize,
    opponents: &StrategyProfile,
    cfg: &SolverConfig,
) -> Result<SandwichReport> {
    let obj = DiscretizedObjective::new(game, sample, player, opponents, cfg.degree, cfg.basis, cfg.coeff_box)?;
    let warm = StrategyProfile::midpoint(game, cfg.degree, cfg.basis)?;
    let br = best_response(&obj, warm.strategy(player).coeffs(), cfg)?;
    let bounds = game.action_domain(player);

    let mut upper = Accumulator::default();
    for (atom, &w) in sample.atoms().zip(sample.weights()) {
        let mut actions = opponents.actions(atom);
        let (_, value) = pointwise_best_action(
            |a| {
                actions[player] = a;
                let u = game.utility_unchecked(player, &actions, atom);
                let d = game.own_derivatives(player, &actions, atom).0;
                (u, d)
            },
            bounds,
        );
        upper.add(w * value);
    }

    // pointwise best response to the opponents' sample marginal
    let opp: Vec<(Vec<f64>, Vec<f64>, f64)> = sample
        .atoms()
        .zip(sample.weights())
        .map(|(atom, &w)| (opponents.actions(atom), atom.to_vec(), w))
        .collect();
    let curve = |t: f64| {
        let (a, _) = pointwise_best_action(
            |a| {
                let mut value = Accumulator::default();
                let mut slope = Accumulator::default();
                for (actions, types, w) in &opp {
                    let mut actions = actions.clone();
                    let mut types = types.clone();
                    actions[player] = a;
                    types[player] = t;
                    value.add(w * game.utility_unchecked(player, &actions, &types));
                    slope.add(w * game.own_derivatives(player, &actions, &types).0);
                }
                (value.value(), slope.value())
            },
            bounds,
        );
        a
    };
    let fitted = poly::bernstein_fit_in(cfg.basis, curve, cfg.degree, game.type_domain(player), bounds)?;
    Ok(SandwichReport {
        best_response: br.value,
        upper: upper.value(),
        lower: obj.expected_utility(fitted.coeffs()),
    })
}
