//! Uniqueness and growth checks, exhaustive table oracles, the
//! discretized-vs-pointwise sandwich and refinement studies.

mod monotonicity;
mod oracle;
mod sandwich;
mod study;

pub use monotonicity::{
    check_monotonicity, estimate_strong_concavity, monotonicity_integral, MonotonicityReport, Verdict,
};
pub use oracle::{brute_force_discrete_equilibria, BruteForce, TableProfile, BRUTE_FORCE_BUDGET};
pub use sandwich::{pointwise_best_action, sandwich_check, SandwichReport};
pub use study::{convergence_study, grid_counts, ConvergenceStudy, SampleTemplate, StudyAxis, CURVE_POINTS};
