//! Discretized best responses and the Gauss-Seidel outer loop.

mod barrier;
mod gauss_seidel;
mod objective;

use alloc::string::ToString;
use alloc::vec::Vec;

pub use barrier::{best_response, BestResponse};
pub use gauss_seidel::{best_response_gap, gauss_seidel_solve, gauss_seidel_solve_observed, sweep, UpdateRecord};
pub use objective::{Derivatives, DiscretizedObjective};

use crate::error::{Error, Result};
use crate::quantize::QuantizedMeasure;
use crate::strategy::{Basis, StrategyProfile};

/// Tolerances and budgets for [`gauss_seidel_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub degree: usize,
    pub basis: Basis,
    /// Sup-norm bound on the coefficient change of a sweep.
    pub outer_tol: f64,
    pub outer_max_sweeps: usize,
    /// Duality-gap target of each best response.
    pub inner_tol: f64,
    pub inner_max_newton: usize,
    /// Bound on `‖v_i‖_∞`.
    pub coeff_box: f64,
    /// Weight `λ` of the update `v ← (1 - λ) v + λ BR(v)`.
    pub damping: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            degree: 1,
            basis: Basis::Raw,
            outer_tol: 1e-8,
            outer_max_sweeps: 500,
            inner_tol: 1e-10,
            inner_max_newton: 200,
            coeff_box: 1e6,
            damping: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn with_degree(degree: usize) -> Self {
        Self {
            degree,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &'static str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::Config {
                    field: field.to_string(),
                    reason: "must be positive and finite".to_string(),
                })
            }
        };
        positive("solver.outer_tol", self.outer_tol)?;
        positive("solver.inner_tol", self.inner_tol)?;
        positive("solver.coeff_box", self.coeff_box)?;
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Config {
                field: "solver.damping".to_string(),
                reason: "must lie in (0, 1]".to_string(),
            });
        }
        if self.outer_max_sweeps == 0 {
            return Err(Error::Config {
                field: "solver.outer_max_sweeps".to_string(),
                reason: "must be at least 1".to_string(),
            });
        }
        if self.inner_max_newton == 0 {
            return Err(Error::Config {
                field: "solver.inner_max_newton".to_string(),
                reason: "must be at least 1".to_string(),
            });
        }
        Ok(())
    }
}

/// Whether the fixed point is known to solve every player's concave
/// discretized problem globally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    Global,
    Local,
}

impl EquilibriumKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Global => "global",
            Self::Local => "local",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub profile: StrategyProfile,
    /// Sweeps performed.
    pub iterations: usize,
    /// Largest coefficient change of each sweep.
    pub outer_trace: Vec<f64>,
    pub br_gap: f64,
    pub converged: bool,
    pub kind: EquilibriumKind,
    pub newton_steps: usize,
    /// The sample the profile was solved on.
    pub quantization: QuantizedMeasure,
}
