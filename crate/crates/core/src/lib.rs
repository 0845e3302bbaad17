//! Approximate continuous equilibria of Bayesian games with interval type and
//! action spaces.
//!
//! Each player's behavioural function is restricted to a degree-`d`
//! polynomial `v^T (1, θ, …, θ^d)`, the product type distribution is replaced
//! by a finitely supported quantized measure, and the resulting finite game is
//! solved by Gauss-Seidel best-response sweeps whose inner problems are
//! concave programs over the coefficient polytope.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command line live in the `polybne` companion crate.
#![no_std]
// `!(x > 0.0)` style checks also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod diagnostics;
pub mod error;
pub mod games;
pub mod model;
pub mod poly;
pub mod quantize;
pub mod solver;
pub mod strategy;
mod sum;

pub use error::{Error, Result};
pub use model::{eval_utility, marginal_density, GameProperties, GameSpec, Interval, TypeMarginal, Utility};
pub use quantize::{Provenance, QuantizedMeasure, QuantizerConfig, QuantizerMode};
pub use solver::{EquilibriumResult, SolverConfig};
pub use strategy::{Basis, PolynomialStrategy, StrategyProfile};
