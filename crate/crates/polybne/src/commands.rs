use std::path::Path;

use anyhow::{bail, Result};
use log::{info, warn};
use polybne_core::diagnostics::{self, BruteForce, MonotonicityReport, StudyAxis};
use polybne_core::poly::{certify_feasible, CertificateStatus};
use polybne_core::quantize::{dispersion, kantorovich_upper_bound};
use polybne_core::solver::{gauss_seidel_solve, EquilibriumResult};
use polybne_core::{GameSpec, Provenance, QuantizedMeasure, StrategyProfile};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::{write_curves, write_json, OutputLock};

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    NotConverged,
}

#[derive(Serialize)]
struct SampleSummary {
    provenance: &'static str,
    atoms: usize,
    dispersion: f64,
    /// False when the dispersion is a probe-search lower bound.
    dispersion_exact: bool,
    /// Upper bound on the Kantorovich distance to the type distribution;
    /// absent for Monte-Carlo samples.
    kantorovich_bound: Option<f64>,
}

fn summarize(game: &GameSpec, sample: &QuantizedMeasure) -> Result<SampleSummary> {
    let disp = dispersion(sample, sample.domains())?;
    let bound = match sample.provenance() {
        Provenance::GridVoronoi => Some(kantorovich_upper_bound(sample, game)?),
        Provenance::MonteCarlo => None,
    };
    Ok(SampleSummary {
        provenance: sample.provenance().as_str(),
        atoms: sample.len(),
        dispersion: disp.value,
        dispersion_exact: disp.exact,
        kantorovich_bound: bound,
    })
}

#[derive(Serialize)]
struct Certificate {
    status: &'static str,
    margin: f64,
    witness: f64,
}

#[derive(Serialize)]
struct Solution {
    converged: bool,
    kind: &'static str,
    iterations: usize,
    br_gap: f64,
    newton_steps: usize,
    outer_trace: Vec<f64>,
    basis: &'static str,
    coefficients: Vec<Vec<f64>>,
    /// Feasibility of each rule on its whole type domain.
    feasibility: Vec<Certificate>,
}

fn solution(result: &EquilibriumResult) -> Solution {
    Solution {
        converged: result.converged,
        kind: result.kind.as_str(),
        iterations: result.iterations,
        br_gap: result.br_gap,
        newton_steps: result.newton_steps,
        outer_trace: result.outer_trace.clone(),
        basis: match result.profile.basis() {
            polybne_core::Basis::Raw => "raw",
            polybne_core::Basis::Unit => "unit",
        },
        coefficients: coefficients(&result.profile),
        feasibility: result
            .profile
            .strategies()
            .iter()
            .map(|s| {
                let c = certify_feasible(s);
                Certificate {
                    status: match c.status {
                        CertificateStatus::Certified => "certified",
                        CertificateStatus::Violated => "violated",
                        CertificateStatus::Undecided => "undecided",
                    },
                    margin: c.margin,
                    witness: c.witness,
                }
            })
            .collect(),
    }
}

fn coefficients(profile: &StrategyProfile) -> Vec<Vec<f64>> {
    profile.strategies().iter().map(|s| s.coeffs().to_vec()).collect()
}

#[derive(Serialize)]
struct SolveReport<'a> {
    command: &'static str,
    config: &'a ExperimentConfig,
    game: &'a str,
    players: usize,
    sample: SampleSummary,
    #[serde(flatten)]
    solution: Solution,
    curves: Vec<String>,
}

pub fn solve(cfg: &ExperimentConfig) -> Result<Outcome> {
    let game = cfg.build_game()?;
    let solver = cfg.solver()?;
    let sample = cfg.quantizer().build(&game)?;
    let dir = &cfg.output_dir;
    let _lock = OutputLock::acquire(dir)?;
    info!(
        "solving {} with {} atoms at degree {}",
        game.name(),
        sample.len(),
        solver.degree
    );
    let result = gauss_seidel_solve(&game, &sample, &solver, None)?;
    info!(
        "{} sweeps, br_gap {:e}, converged {}",
        result.iterations, result.br_gap, result.converged
    );
    let curves = write_curves(dir, "curves", &game, &result.profile)?;
    let report = SolveReport {
        command: "solve",
        config: cfg,
        game: game.name(),
        players: game.players(),
        sample: summarize(&game, &sample)?,
        solution: solution(&result),
        curves,
    };
    write_json(&dir.join("result.json"), &report)?;
    Ok(if result.converged {
        Outcome::Converged
    } else {
        Outcome::NotConverged
    })
}

#[derive(Serialize)]
struct StudyLevel {
    level: usize,
    atoms: usize,
    converged: bool,
    br_gap: f64,
    iterations: usize,
    coefficients: Vec<Vec<f64>>,
    curves: Vec<String>,
}

#[derive(Serialize)]
struct StudyReport<'a> {
    command: &'static str,
    config: &'a ExperimentConfig,
    game: &'a str,
    axis: &'static str,
    levels: Vec<usize>,
    successive_sup_diffs: Vec<f64>,
    per_level: Vec<StudyLevel>,
}

pub fn study(cfg: &ExperimentConfig) -> Result<Outcome> {
    let game = cfg.build_game()?;
    let solver = cfg.solver()?;
    let (axis, levels) = cfg.study_axis()?;
    if let StudyAxis::Degree { quantizer } = &axis {
        quantizer.build(&game)?;
    }
    let dir = &cfg.output_dir;
    let _lock = OutputLock::acquire(dir)?;
    info!("{} study over levels {:?}", axis.as_str(), levels);
    let study = diagnostics::convergence_study(&game, &axis, &levels, &solver)?;
    let mut per_level = Vec::with_capacity(levels.len());
    for (k, &level) in levels.iter().enumerate() {
        let stem = format!("curves_{}_{}", axis.as_str().replace('-', "_"), level);
        let curves = write_curves(dir, &stem, &game, &study.profiles[k])?;
        if !study.converged[k] {
            warn!("level {level} did not converge (br_gap {:e})", study.br_gaps[k]);
        }
        per_level.push(StudyLevel {
            level,
            atoms: study.quantizers[k].total_atoms(),
            converged: study.converged[k],
            br_gap: study.br_gaps[k],
            iterations: study.iterations[k],
            coefficients: coefficients(&study.profiles[k]),
            curves,
        });
    }
    let all = study.converged.iter().all(|&c| c);
    let report = StudyReport {
        command: "study",
        config: cfg,
        game: game.name(),
        axis: study.axis,
        levels: study.levels.clone(),
        successive_sup_diffs: study.successive_sup_diffs.clone(),
        per_level,
    };
    write_json(&dir.join("study.json"), &report)?;
    Ok(if all { Outcome::Converged } else { Outcome::NotConverged })
}

#[derive(Serialize)]
struct FixedPoint {
    /// `actions[i][k]` is player `i`'s action at `types[i][k]`.
    actions: Vec<Vec<f64>>,
    levels: Vec<Vec<usize>>,
    /// No single action level improves any player at any type point.
    verified: bool,
}

#[derive(Serialize)]
struct Comparison {
    fixed_point: usize,
    max_abs_diff: f64,
    /// `max_abs_diff` in units of the coarsest action-grid step.
    action_steps: f64,
}

#[derive(Serialize)]
struct Sandwich {
    player: usize,
    best_response: f64,
    upper: f64,
    lower: f64,
    holds: bool,
}

#[derive(Serialize)]
struct Monotonicity {
    pairs_tested: usize,
    min_integral: f64,
    verdict: &'static str,
    note: &'static str,
}

impl From<MonotonicityReport> for Monotonicity {
    fn from(r: MonotonicityReport) -> Self {
        Self {
            pairs_tested: r.pairs_tested,
            min_integral: r.min_integral,
            verdict: r.verdict.as_str(),
            note: MonotonicityReport::NOTE,
        }
    }
}

#[derive(Serialize)]
struct OracleReport<'a> {
    command: &'static str,
    config: &'a ExperimentConfig,
    game: &'a str,
    types: Vec<Vec<f64>>,
    action_grids: Vec<Vec<f64>>,
    fixed_points: Vec<FixedPoint>,
    solver: Solution,
    comparison: Vec<Comparison>,
    sandwich: Vec<Sandwich>,
    monotonicity: Option<Monotonicity>,
    strong_concavity: Vec<f64>,
}

pub fn oracle(cfg: &ExperimentConfig) -> Result<Outcome> {
    let game = cfg.build_game()?;
    let solver = cfg.solver()?;
    let Some(section) = &cfg.oracle else {
        bail!("field `oracle`: the oracle command needs an oracle section");
    };
    let brute = BruteForce::new(&game, &section.type_points, &section.action_levels)?;
    let dir = &cfg.output_dir;
    let _lock = OutputLock::acquire(dir)?;

    let seeds = brute.seeds();
    info!("table iteration from {} seeds", seeds.len());
    let found: Vec<_> = seeds.par_iter().map(|s| brute.run_from(s)).collect();
    let tables = brute.collect(found);
    let fixed_points: Vec<FixedPoint> = tables
        .par_iter()
        .map(|t| FixedPoint {
            actions: t.actions.clone(),
            levels: t.levels.clone(),
            verified: brute.is_fixed_point(&t.levels),
        })
        .collect();
    info!("{} distinct fixed points", fixed_points.len());

    // the solver sees the same discrete measure as the tables
    let sample = polybne_core::QuantizerConfig::grid(section.type_points.clone()).build(&game)?;
    let result = gauss_seidel_solve(&game, &sample, &solver, None)?;
    let step = (0..game.players())
        .map(|i| game.action_domain(i).width() / (section.action_levels[i].max(2) - 1) as f64)
        .fold(0.0, f64::max);
    let comparison = tables
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let diff = (0..game.players())
                .flat_map(|i| {
                    let s = result.profile.strategy(i);
                    t.types[i]
                        .iter()
                        .zip(&t.actions[i])
                        .map(move |(&th, &a)| (s.eval_unchecked(th) - a).abs())
                })
                .fold(0.0, f64::max);
            Comparison {
                fixed_point: k,
                max_abs_diff: diff,
                action_steps: diff / step,
            }
        })
        .collect();
    let sandwich = (0..game.players())
        .map(|i| {
            let r = diagnostics::sandwich_check(&game, &sample, i, &result.profile, &solver)?;
            Ok(Sandwich {
                player: i,
                best_response: r.best_response,
                upper: r.upper,
                lower: r.lower,
                holds: r.holds(1e-8),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotonicity = if game.has_analytic_derivatives() {
        Some(diagnostics::check_monotonicity(&game, section.monotonicity_pairs, &sample, cfg.seed)?.into())
    } else {
        None
    };
    let strong_concavity = (0..game.players())
        .map(|i| diagnostics::estimate_strong_concavity(&game, i, section.concavity_probes.max(1), cfg.seed))
        .collect::<polybne_core::Result<Vec<_>>>()?;
    let report = OracleReport {
        command: "oracle",
        config: cfg,
        game: game.name(),
        types: (0..game.players()).map(|i| brute.type_grid(i).to_vec()).collect(),
        action_grids: (0..game.players()).map(|i| brute.action_grid(i).to_vec()).collect(),
        fixed_points,
        solver: solution(&result),
        comparison,
        sandwich,
        monotonicity,
        strong_concavity,
    };
    write_json(&dir.join("oracle.json"), &report)?;
    Ok(if result.converged {
        Outcome::Converged
    } else {
        Outcome::NotConverged
    })
}

#[derive(Serialize)]
struct QuantizeReport<'a> {
    command: &'static str,
    config: &'a ExperimentConfig,
    game: &'a str,
    #[serde(flatten)]
    summary: SampleSummary,
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

pub fn quantize(cfg: &ExperimentConfig) -> Result<Outcome> {
    let game = cfg.build_game()?;
    let sample = cfg.quantizer().build(&game)?;
    let dir = &cfg.output_dir;
    let _lock = OutputLock::acquire(dir)?;
    let report = QuantizeReport {
        command: "quantize",
        config: cfg,
        game: game.name(),
        summary: summarize(&game, &sample)?,
        atoms: sample.atoms().map(<[f64]>::to_vec).collect(),
        weights: sample.weights().to_vec(),
    };
    write_json(&dir.join("quantize.json"), &report)?;
    Ok(Outcome::Converged)
}

/// Loads `path` and applies command-line overrides.
pub fn load(path: &Path, output_dir: Option<&Path>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(dir) = output_dir {
        cfg.output_dir = dir.to_path_buf();
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}
