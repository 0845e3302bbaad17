use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::GameSpec;
use crate::quantize::{QuantizerConfig, QuantizerMode};
use crate::solver::{gauss_seidel_solve, SolverConfig};
use crate::strategy::StrategyProfile;

/// Points of the evaluation grid on each player's type domain.
pub const CURVE_POINTS: usize = 1000;

/// What varies across the levels of a study.
#[derive(Debug, Clone, PartialEq)]
pub enum StudyAxis {
    /// Levels are polynomial degrees; the sample is fixed.
    Degree { quantizer: QuantizerConfig },
    /// Levels are total atom counts `M`; the degree comes from the solver
    /// config. Grid levels use `K · aspect[i]` atoms on axis `i`, where
    /// `K^n Π aspect = M`; Monte-Carlo levels draw `M` points.
    SampleSize { mode: SampleTemplate },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleTemplate {
    Grid { aspect: Vec<usize> },
    MonteCarlo { seed: u64 },
}

impl StudyAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Degree { .. } => "degree",
            Self::SampleSize { .. } => "sample-size",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub axis: &'static str,
    pub levels: Vec<usize>,
    /// `grid[i]`: evaluation points on player `i`'s type domain.
    pub grid: Vec<Vec<f64>>,
    /// `curves[level][i][k]`: player `i`'s rule at `grid[i][k]`.
    pub curves: Vec<Vec<Vec<f64>>>,
    /// Sup-norm difference between consecutive levels, over all players.
    pub successive_sup_diffs: Vec<f64>,
    pub converged: Vec<bool>,
    pub br_gaps: Vec<f64>,
    pub iterations: Vec<usize>,
    pub profiles: Vec<StrategyProfile>,
    pub quantizers: Vec<QuantizerConfig>,
}

/// Grid counts for `total` atoms with the given aspect ratios.
pub fn grid_counts(total: usize, aspect: &[usize]) -> Result<Vec<usize>> {
    let bad = || Error::Config {
        field: "study.levels".to_string(),
        reason: alloc::format!("{total} atoms do not factor as K^n times the aspect {aspect:?}"),
    };
    if aspect.is_empty() || aspect.contains(&0) {
        return Err(bad());
    }
    let scale: usize = aspect.iter().product();
    if total == 0 || !total.is_multiple_of(scale) {
        return Err(bad());
    }
    let base = total / scale;
    let n = aspect.len() as u32;
    let guess = libm::round(libm::pow(base as f64, 1.0 / n as f64)) as usize;
    for k in guess.saturating_sub(1)..=guess + 1 {
        if k > 0 && k.checked_pow(n) == Some(base) {
            return Ok(aspect.iter().map(|a| a * k).collect());
        }
    }
    Err(bad())
}

/// Solves at each level, warm-starting from the previous one, and tabulates
/// the rules on a fixed grid.
pub fn convergence_study(
    game: &GameSpec,
    axis: &StudyAxis,
    levels: &[usize],
    cfg: &SolverConfig,
) -> Result<ConvergenceStudy> {
    if levels.is_empty() {
        return Err(Error::Config {
            field: "study.levels".to_string(),
            reason: "needs at least one level".to_string(),
        });
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config {
            field: "study.levels".to_string(),
            reason: "levels must be strictly ascending".to_string(),
        });
    }
    let n = game.players();
    let grid: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..CURVE_POINTS)
                .map(|k| game.type_domain(i).grid_point(k, CURVE_POINTS))
                .collect()
        })
        .collect();
    let mut study = ConvergenceStudy {
        axis: axis.as_str(),
        levels: levels.to_vec(),
        grid,
        curves: Vec::new(),
        successive_sup_diffs: Vec::new(),
        converged: Vec::new(),
        br_gaps: Vec::new(),
        iterations: Vec::new(),
        profiles: Vec::new(),
        quantizers: Vec::new(),
    };
    let mut previous: Option<StrategyProfile> = None;
    for &level in levels {
        let (quantizer, level_cfg) = match axis {
            StudyAxis::Degree { quantizer } => (
                quantizer.clone(),
                SolverConfig {
                    degree: level,
                    ..cfg.clone()
                },
            ),
            StudyAxis::SampleSize { mode } => {
                let q = match mode {
                    SampleTemplate::Grid { aspect } => QuantizerConfig {
                        mode: QuantizerMode::Grid {
                            counts: grid_counts(level, aspect)?,
                        },
                    },
                    SampleTemplate::MonteCarlo { seed } => QuantizerConfig::monte_carlo(level, *seed),
                };
                (q, cfg.clone())
            }
        };
        let sample = quantizer.build(game)?;
        let result = gauss_seidel_solve(game, &sample, &level_cfg, previous.as_ref())?;
        let curve: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let s = result.profile.strategy(i);
                study.grid[i].iter().map(|&t| s.eval_unchecked(t)).collect()
            })
            .collect();
        if let Some(last) = study.curves.last() {
            study.successive_sup_diffs.push(sup_diff(last, &curve));
        }
        study.curves.push(curve);
        study.converged.push(result.converged);
        study.br_gaps.push(result.br_gap);
        study.iterations.push(result.iterations);
        study.quantizers.push(quantizer);
        previous = Some(result.profile.clone());
        study.profiles.push(result.profile);
    }
    Ok(study)
}

fn sup_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}
