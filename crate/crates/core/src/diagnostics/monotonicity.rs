use alloc::string::ToString;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::GameSpec;
use crate::poly;
use crate::quantize::QuantizedMeasure;
use crate::strategy::{Basis, StrategyProfile};
use crate::sum::Accumulator;

const PAIR_DEGREE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Every tested pair gave a negative integral. Evidence only: the
    /// condition quantifies over all pairs of rules.
    Consistent,
    Violated,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Consistent => "consistent",
            Self::Violated => "violated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub pairs_tested: usize,
    /// Largest (least negative) integral seen.
    pub min_integral: f64,
    pub verdict: Verdict,
    /// A pair with nonnegative integral, when one was found.
    pub witness: Option<(StrategyProfile, StrategyProfile)>,
}

impl MonotonicityReport {
    pub const NOTE: &'static str = "a consistent verdict is evidence from sampled pairs, not a proof";
}

/// `Σ_j p_j Σ_i [H_i(f'(θ^j), θ^j) - H_i(f''(θ^j), θ^j)] (f'_i(θ_i^j) - f''_i(θ_i^j))`
/// with `H_i = ∂u_i/∂a_i`, for rules given as `f(i, θ_i)`.
pub fn monotonicity_integral<F, G>(game: &GameSpec, sample: &QuantizedMeasure, f: F, g: G) -> Result<f64>
where
    F: Fn(usize, f64) -> f64,
    G: Fn(usize, f64) -> f64,
{
    if !game.has_analytic_derivatives() {
        return Err(Error::Unsupported(
            "the monotonicity check needs analytic own-action derivatives".to_string(),
        ));
    }
    let n = game.players();
    if sample.dim() != n {
        return Err(Error::DimensionMismatch {
            what: "sample dimension",
            got: sample.dim(),
            expected: n,
        });
    }
    let mut acc = Accumulator::default();
    for (atom, &w) in sample.atoms().zip(sample.weights()) {
        let a: Vec<f64> = (0..n).map(|i| f(i, atom[i])).collect();
        let b: Vec<f64> = (0..n).map(|i| g(i, atom[i])).collect();
        for i in 0..n {
            let ha = game.own_derivatives(i, &a, atom).0;
            let hb = game.own_derivatives(i, &b, atom).0;
            acc.add(w * (ha - hb) * (a[i] - b[i]));
        }
    }
    let value = acc.value();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite {
            context: "monotonicity integral",
            point: Vec::new(),
        })
    }
}

fn random_profile(game: &GameSpec, rng: &mut ChaCha8Rng) -> Result<StrategyProfile> {
    let strategies = (0..game.players())
        .map(|i| {
            let bounds = game.action_domain(i);
            let ctrl: Vec<f64> = (0..=PAIR_DEGREE)
                .map(|_| bounds.lo() + bounds.width() * rng.random::<f64>())
                .collect();
            let domain = game.type_domain(i);
            poly::bernstein_fit_in(
                Basis::Unit,
                |t| poly::de_casteljau(&ctrl, (t - domain.lo()) / domain.width()),
                PAIR_DEGREE,
                domain,
                bounds,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    StrategyProfile::new(strategies)
}

/// Tests the diagonal strict monotonicity integral on `trials` random pairs
/// of cubic rules with control values inside the action intervals.
pub fn check_monotonicity(
    game: &GameSpec,
    trials: usize,
    sample: &QuantizedMeasure,
    seed: u64,
) -> Result<MonotonicityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    let mut tested = 0;
    while tested < trials {
        let p = random_profile(game, &mut rng)?;
        let q = random_profile(game, &mut rng)?;
        if p == q {
            continue;
        }
        let value = monotonicity_integral(
            game,
            sample,
            |i, t| p.strategy(i).eval_unchecked(t),
            |i, t| q.strategy(i).eval_unchecked(t),
        )?;
        tested += 1;
        if value > worst {
            worst = value;
        }
        if value >= 0.0 && witness.is_none() {
            witness = Some((p, q));
        }
    }
    Ok(MonotonicityReport {
        pairs_tested: tested,
        min_integral: worst,
        verdict: if witness.is_some() {
            Verdict::Violated
        } else {
            Verdict::Consistent
        },
        witness,
    })
}

/// `σ̂_i = -max [u_i(a+h) - 2u_i(a) + u_i(a-h)] / h²` over random interior
/// own actions, opponent actions and types, with `h = 1e-4` of the own action
/// width.
pub fn estimate_strong_concavity(game: &GameSpec, i: usize, probes: usize, seed: u64) -> Result<f64> {
    let n = game.players();
    if i >= n {
        return Err(Error::DimensionMismatch {
            what: "player",
            got: i,
            expected: n,
        });
    }
    if probes == 0 {
        return Err(Error::InvalidParameter {
            name: "probes".to_string(),
            reason: "must be at least 1".to_string(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let own = game.action_domain(i);
    let h = 1e-4 * own.width();
    let mut worst = f64::NEG_INFINITY;
    let mut actions = alloc::vec![0.0; n];
    let mut types = alloc::vec![0.0; n];
    for _ in 0..probes {
        for j in 0..n {
            let ad = game.action_domain(j);
            actions[j] = ad.lo() + ad.width() * rng.random::<f64>();
            let m = game.marginal(j);
            types[j] = m.domain().clamp(m.quantile(rng.random::<f64>()));
        }
        actions[i] = own.lo() + h + (own.width() - 2.0 * h) * rng.random::<f64>();
        let a = actions[i];
        let mid = game.utility_unchecked(i, &actions, &types);
        actions[i] = a + h;
        let up = game.utility_unchecked(i, &actions, &types);
        actions[i] = a - h;
        let dn = game.utility_unchecked(i, &actions, &types);
        let q = (up - 2.0 * mid + dn) / (h * h);
        if q.is_finite() {
            worst = worst.max(q);
        }
    }
    Ok(-worst)
}
