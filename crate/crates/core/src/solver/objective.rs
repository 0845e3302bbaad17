//! Sample-average expected utility of one player against fixed opponents.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{GameSpec, Interval};
use crate::poly;
use crate::quantize::QuantizedMeasure;
use crate::strategy::{basis_variable, Basis, PolynomialStrategy, StrategyProfile};
use crate::sum::Accumulator;

/// Player `i`'s objective `Σ_j p_j u_i(v^T ξ_d(θ_i^j), V_{-i}(θ_{-i}^j), θ^j)`
/// over the polytope `{v : a_i ≤ v^T ξ_d(θ_i^j) ≤ b_i}` intersected with the
/// coefficient box `‖v‖_∞ ≤ coeff_box`.
///
/// Constraint rows are kept once per distinct own-type value.
pub struct DiscretizedObjective<'a> {
    game: &'a GameSpec,
    player: usize,
    degree: usize,
    basis: Basis,
    domain: Interval,
    bounds: Interval,
    coeff_box: f64,
    own_types: Vec<f64>,
    /// `own_types.len() × (degree + 1)`, row-major.
    rows: Vec<f64>,
    group: Vec<usize>,
    /// Action profiles with the opponents' actions filled in.
    profiles: Vec<f64>,
    types: Vec<f64>,
    weights: Vec<f64>,
}

/// Value, gradient and Hessian of the objective in the coefficients.
pub struct Derivatives {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

impl<'a> DiscretizedObjective<'a> {
    /// `opponents` supplies every other player's rule; its entry for
    /// `player` is ignored.
    pub fn new(
        game: &'a GameSpec,
        sample: &QuantizedMeasure,
        player: usize,
        opponents: &StrategyProfile,
        degree: usize,
        basis: Basis,
        coeff_box: f64,
    ) -> Result<Self> {
        let n = game.players();
        if player >= n {
            return Err(Error::DimensionMismatch {
                what: "player",
                got: player,
                expected: n,
            });
        }
        if sample.dim() != n {
            return Err(Error::DimensionMismatch {
                what: "sample dimension",
                got: sample.dim(),
                expected: n,
            });
        }
        opponents.check_against(game)?;
        let domain = game.type_domain(player);

        let mut own_types: Vec<f64> = sample.atoms().map(|a| a[player]).collect();
        own_types.sort_by(f64::total_cmp);
        own_types.dedup();
        for &t in &own_types {
            domain.check("sample type", t)?;
        }
        let mut rows = Vec::with_capacity(own_types.len() * (degree + 1));
        let mut row = Vec::new();
        for &t in &own_types {
            poly::fill_monomials(basis_variable(basis, domain, t), degree, &mut row);
            rows.extend_from_slice(&row);
        }

        let mut group = Vec::with_capacity(sample.len());
        let mut profiles = Vec::with_capacity(sample.len() * n);
        let mut types = Vec::with_capacity(sample.len() * n);
        for atom in sample.atoms() {
            let g = own_types
                .binary_search_by(|t| t.total_cmp(&atom[player]))
                .expect("own type collected above");
            group.push(g);
            for (j, &t) in atom.iter().enumerate() {
                profiles.push(if j == player {
                    0.0
                } else {
                    opponents.strategy(j).eval_unchecked(t)
                });
            }
            types.extend_from_slice(atom);
        }
        Ok(Self {
            game,
            player,
            degree,
            basis,
            domain,
            bounds: game.action_domain(player),
            coeff_box,
            own_types,
            rows,
            group,
            profiles,
            types,
            weights: sample.weights().to_vec(),
        })
    }

    pub fn player(&self) -> usize {
        self.player
    }

    pub fn dimension(&self) -> usize {
        self.degree + 1
    }

    pub fn bounds(&self) -> Interval {
        self.bounds
    }

    pub fn coeff_box(&self) -> f64 {
        self.coeff_box
    }

    /// Distinct own-type values, ascending.
    pub fn own_types(&self) -> &[f64] {
        &self.own_types
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let d = self.dimension();
        &self.rows[k * d..(k + 1) * d]
    }

    pub fn row_count(&self) -> usize {
        self.own_types.len()
    }

    /// Actions `v^T ξ_d(θ)` at the distinct own types.
    pub fn row_values(&self, v: &[f64]) -> Vec<f64> {
        (0..self.row_count())
            .map(|k| poly::dot_slices(self.row(k), v))
            .collect()
    }

    /// Non-strict membership in the polytope and the coefficient box.
    pub fn is_feasible(&self, v: &[f64]) -> bool {
        v.iter().all(|c| c.abs() <= self.coeff_box) && self.row_values(v).iter().all(|&x| self.bounds.contains(x))
    }

    /// The rule with coefficients `v`.
    pub fn strategy(&self, v: &[f64]) -> Result<PolynomialStrategy> {
        PolynomialStrategy::with_basis(v.to_vec(), self.domain, self.bounds, self.basis)
    }

    pub(crate) fn atoms(&self) -> usize {
        self.weights.len()
    }

    /// Sample-average expected utility of coefficients `v`.
    pub fn expected_utility(&self, v: &[f64]) -> f64 {
        let xs = self.row_values(v);
        self.value_at_actions(&xs)
    }

    pub(crate) fn value_at_actions(&self, xs: &[f64]) -> f64 {
        let n = self.game.players();
        let mut scratch = vec![0.0; n];
        let mut acc = Accumulator::default();
        for j in 0..self.atoms() {
            scratch.copy_from_slice(&self.profiles[j * n..(j + 1) * n]);
            scratch[self.player] = xs[self.group[j]];
            let u = self
                .game
                .utility_unchecked(self.player, &scratch, &self.types[j * n..(j + 1) * n]);
            acc.add(self.weights[j] * u);
        }
        acc.value()
    }

    /// Value, gradient and Hessian at `v`.
    pub fn derivatives(&self, v: &[f64]) -> Result<Derivatives> {
        let n = self.game.players();
        let dim = self.dimension();
        let xs = self.row_values(v);
        let mut first = vec![Accumulator::default(); self.row_count()];
        let mut second = vec![Accumulator::default(); self.row_count()];
        let mut value = Accumulator::default();
        let mut scratch = vec![0.0; n];
        for j in 0..self.atoms() {
            let g = self.group[j];
            scratch.copy_from_slice(&self.profiles[j * n..(j + 1) * n]);
            scratch[self.player] = xs[g];
            let types = &self.types[j * n..(j + 1) * n];
            let u = self.game.utility_unchecked(self.player, &scratch, types);
            let (d1, d2) = self.game.own_derivatives(self.player, &scratch, types);
            if !(u.is_finite() && d1.is_finite() && d2.is_finite()) {
                return Err(Error::NonFinite {
                    context: "expected utility",
                    point: scratch.iter().chain(types).copied().collect(),
                });
            }
            let w = self.weights[j];
            value.add(w * u);
            first[g].add(w * d1);
            second[g].add(w * d2);
        }
        let mut gradient = DVector::zeros(dim);
        let mut hessian = DMatrix::zeros(dim, dim);
        for k in 0..self.row_count() {
            let r = self.row(k);
            let (g1, g2) = (first[k].value(), second[k].value());
            for a in 0..dim {
                gradient[a] += g1 * r[a];
                for b in 0..=a {
                    hessian[(a, b)] += g2 * r[a] * r[b];
                }
            }
        }
        for a in 0..dim {
            for b in 0..a {
                hessian[(b, a)] = hessian[(a, b)];
            }
        }
        Ok(Derivatives {
            value: value.value(),
            gradient,
            hessian,
        })
    }
}
