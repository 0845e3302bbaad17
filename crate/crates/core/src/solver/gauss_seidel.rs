use alloc::vec::Vec;

use super::barrier::best_response;
use super::objective::DiscretizedObjective;
use super::{EquilibriumKind, EquilibriumResult, SolverConfig};
use crate::error::{Error, Result};
use crate::model::GameSpec;
use crate::quantize::QuantizedMeasure;
use crate::strategy::StrategyProfile;

/// One player update inside a sweep, as seen by an observer.
#[derive(Debug)]
pub struct UpdateRecord<'p> {
    pub sweep: usize,
    pub player: usize,
    /// Player's sample-average utility before and after its update, against
    /// the same opponents.
    pub value_before: f64,
    pub value_after: f64,
    pub profile: &'p StrategyProfile,
}

fn check_sample(game: &GameSpec, sample: &QuantizedMeasure) -> Result<()> {
    if sample.dim() != game.players() {
        return Err(Error::DimensionMismatch {
            what: "sample dimension",
            got: sample.dim(),
            expected: game.players(),
        });
    }
    for atom in sample.atoms() {
        for (i, &t) in atom.iter().enumerate() {
            game.type_domain(i).check("sample type", t)?;
        }
    }
    Ok(())
}

/// Updates the players in `order`, each best-responding to the latest rules
/// of the others. Returns the largest coefficient change and the Newton
/// steps spent.
pub fn sweep<F>(
    game: &GameSpec,
    sample: &QuantizedMeasure,
    profile: &mut StrategyProfile,
    cfg: &SolverConfig,
    order: &[usize],
    sweep_index: usize,
    observer: &mut F,
) -> Result<(f64, usize)>
where
    F: FnMut(&UpdateRecord<'_>),
{
    let mut step = 0.0f64;
    let mut newton = 0;
    for &i in order {
        let obj = DiscretizedObjective::new(game, sample, i, profile, cfg.degree, cfg.basis, cfg.coeff_box)?;
        let current = profile.strategy(i).coeffs().to_vec();
        let before = obj.expected_utility(&current);
        let br = best_response(&obj, &current, cfg)?;
        newton += br.newton_steps;
        let next: Vec<f64> = if cfg.damping >= 1.0 {
            br.coeffs
        } else {
            current
                .iter()
                .zip(&br.coeffs)
                .map(|(v, b)| (1.0 - cfg.damping) * v + cfg.damping * b)
                .collect()
        };
        step = current
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(step, f64::max);
        let after = obj.expected_utility(&next);
        profile.replace(i, obj.strategy(&next)?);
        observer(&UpdateRecord {
            sweep: sweep_index,
            player: i,
            value_before: before,
            value_after: after,
            profile,
        });
    }
    Ok((step, newton))
}

/// Largest gain any player can obtain on the sample by deviating within its
/// coefficient polytope.
pub fn best_response_gap(
    game: &GameSpec,
    profile: &StrategyProfile,
    sample: &QuantizedMeasure,
    cfg: &SolverConfig,
) -> Result<f64> {
    Ok(gap_and_steps(game, profile, sample, cfg)?.0)
}

fn gap_and_steps(
    game: &GameSpec,
    profile: &StrategyProfile,
    sample: &QuantizedMeasure,
    cfg: &SolverConfig,
) -> Result<(f64, usize)> {
    check_sample(game, sample)?;
    let mut gap = 0.0f64;
    let mut steps = 0;
    for i in 0..game.players() {
        let obj = DiscretizedObjective::new(
            game,
            sample,
            i,
            profile,
            profile.degree(),
            profile.basis(),
            cfg.coeff_box,
        )?;
        let current = profile.strategy(i).coeffs();
        let br = best_response(&obj, current, cfg)?;
        steps += br.newton_steps;
        gap = gap.max(br.value - obj.expected_utility(current));
    }
    Ok((gap, steps))
}

/// Gauss-Seidel iteration from `init`, or from the midpoint constant rules.
pub fn gauss_seidel_solve(
    game: &GameSpec,
    sample: &QuantizedMeasure,
    cfg: &SolverConfig,
    init: Option<&StrategyProfile>,
) -> Result<EquilibriumResult> {
    gauss_seidel_solve_observed(game, sample, cfg, init, |_| {})
}

/// [`gauss_seidel_solve`] reporting every player update to `observer`.
pub fn gauss_seidel_solve_observed<F>(
    game: &GameSpec,
    sample: &QuantizedMeasure,
    cfg: &SolverConfig,
    init: Option<&StrategyProfile>,
    mut observer: F,
) -> Result<EquilibriumResult>
where
    F: FnMut(&UpdateRecord<'_>),
{
    cfg.validate()?;
    check_sample(game, sample)?;
    let mut profile = match init {
        Some(p) => {
            p.check_against(game)?;
            if p.basis() != cfg.basis {
                return Err(Error::Config {
                    field: "solver.basis".into(),
                    reason: "initial profile uses a different basis".into(),
                });
            }
            if p.degree() != cfg.degree {
                p.resized(cfg.degree)?
            } else {
                p.clone()
            }
        }
        None => StrategyProfile::midpoint(game, cfg.degree, cfg.basis)?,
    };
    let order: Vec<usize> = (0..game.players()).collect();
    let mut trace = Vec::new();
    let mut newton_steps = 0;
    let mut gap = f64::INFINITY;
    let mut converged = false;
    for k in 0..cfg.outer_max_sweeps {
        let (step, steps) = sweep(game, sample, &mut profile, cfg, &order, k, &mut observer)?;
        trace.push(step);
        newton_steps += steps;
        if step <= cfg.outer_tol {
            let (g, steps) = gap_and_steps(game, &profile, sample, cfg)?;
            newton_steps += steps;
            gap = g;
            if gap <= cfg.inner_tol {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        let (g, steps) = gap_and_steps(game, &profile, sample, cfg)?;
        newton_steps += steps;
        gap = g;
    }
    let kind = classify(game, sample, &profile);
    Ok(EquilibriumResult {
        profile,
        iterations: trace.len(),
        outer_trace: trace,
        br_gap: gap,
        converged,
        kind,
        newton_steps,
        quantization: sample.clone(),
    })
}

/// Global when the utility is concave in the own action and, short of
/// strong concavity, strictly concave at every sample atom under `profile`.
fn classify(game: &GameSpec, sample: &QuantizedMeasure, profile: &StrategyProfile) -> EquilibriumKind {
    let props = game.properties();
    if !props.concave_in_own_action {
        return EquilibriumKind::Local;
    }
    if props.strongly_concave {
        return EquilibriumKind::Global;
    }
    let witness = sample.atoms().all(|atom| {
        let actions = profile.actions(atom);
        (0..game.players()).all(|i| game.own_derivatives(i, &actions, atom).1 < 0.0)
    });
    if witness {
        EquilibriumKind::Global
    } else {
        EquilibriumKind::Local
    }
}
