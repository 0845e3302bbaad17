//! Polynomial decision rules and strategy profiles.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{GameSpec, Interval};
use crate::poly;

/// Variable the monomials are taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Basis {
    /// `ξ_d(θ)` on the raw type value.
    #[default]
    Raw,
    /// `ξ_d(t)` with `t = (θ - lo) / (hi - lo) ∈ [0, 1]`.
    Unit,
}

/// A degree-`d` decision rule `f(θ) = v^T ξ_d(θ)` on a type interval.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialStrategy {
    coeffs: Vec<f64>,
    domain: Interval,
    action_bounds: Interval,
    basis: Basis,
    /// Bernstein control values of a fitted rule; evaluation goes through
    /// them, which keeps the fit inside its bounds in floating point.
    bernstein: Option<Vec<f64>>,
    certified: bool,
}

impl PolynomialStrategy {
    pub fn new(coeffs: Vec<f64>, domain: Interval, action_bounds: Interval) -> Result<Self> {
        Self::with_basis(coeffs, domain, action_bounds, Basis::Raw)
    }

    pub fn with_basis(coeffs: Vec<f64>, domain: Interval, action_bounds: Interval, basis: Basis) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter {
                name: "coeffs".to_string(),
                reason: "a polynomial needs at least one coefficient".to_string(),
            });
        }
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                context: "strategy coefficients",
                point: alloc::vec![k as f64],
            });
        }
        Ok(Self {
            coeffs,
            domain,
            action_bounds,
            basis,
            bernstein: None,
            certified: false,
        })
    }

    /// Constant rule `f ≡ value` of the given degree.
    pub fn constant(value: f64, degree: usize, domain: Interval, action_bounds: Interval) -> Result<Self> {
        let mut coeffs = alloc::vec![0.0; degree + 1];
        coeffs[0] = value;
        Self::new(coeffs, domain, action_bounds)
    }

    pub(crate) fn with_bernstein(mut self, control: Vec<f64>) -> Self {
        self.bernstein = Some(control);
        self
    }

    pub(crate) fn set_certified(&mut self, certified: bool) {
        self.certified = certified;
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn action_bounds(&self) -> Interval {
        self.action_bounds
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn bernstein_control(&self) -> Option<&[f64]> {
        self.bernstein.as_deref()
    }

    /// Set only by a successful [`poly::certify_feasible`].
    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Maps a type value to the variable the monomials are taken in.
    #[inline]
    pub fn variable(&self, theta: f64) -> f64 {
        basis_variable(self.basis, self.domain, theta)
    }

    /// Range of [`Self::variable`] over the domain.
    pub fn variable_range(&self) -> (f64, f64) {
        match self.basis {
            Basis::Raw => (self.domain.lo(), self.domain.hi()),
            Basis::Unit => (0.0, 1.0),
        }
    }

    pub fn eval(&self, theta: f64) -> Result<f64> {
        self.domain.check("type", theta)?;
        Ok(self.eval_unchecked(theta))
    }

    #[inline]
    pub fn eval_unchecked(&self, theta: f64) -> f64 {
        match &self.bernstein {
            Some(ctrl) => {
                let s = (theta - self.domain.lo()) / self.domain.width();
                poly::de_casteljau(ctrl, s)
            }
            _ => poly::dot_monomials(&self.coeffs, self.variable(theta)),
        }
    }

    /// Same rule with different coefficients; drops fit and certification
    /// metadata.
    pub fn with_coeffs(&self, coeffs: Vec<f64>) -> Result<Self> {
        Self::with_basis(coeffs, self.domain, self.action_bounds, self.basis)
    }
}

#[inline]
pub(crate) fn basis_variable(basis: Basis, domain: Interval, theta: f64) -> f64 {
    match basis {
        Basis::Raw => theta,
        Basis::Unit => (theta - domain.lo()) / domain.width(),
    }
}

/// One decision rule per player, all of the same degree and basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    strategies: Vec<PolynomialStrategy>,
}

impl StrategyProfile {
    pub fn new(strategies: Vec<PolynomialStrategy>) -> Result<Self> {
        let Some(first) = strategies.first() else {
            return Err(Error::InvalidParameter {
                name: "profile".to_string(),
                reason: "a profile needs at least one strategy".to_string(),
            });
        };
        let (degree, basis) = (first.degree(), first.basis());
        if strategies.iter().any(|s| s.degree() != degree || s.basis() != basis) {
            return Err(Error::InvalidParameter {
                name: "profile".to_string(),
                reason: "all strategies must share one degree and basis".to_string(),
            });
        }
        Ok(Self { strategies })
    }

    /// Checks that the profile has one strategy per player, on that player's
    /// type domain.
    pub fn for_game(game: &GameSpec, strategies: Vec<PolynomialStrategy>) -> Result<Self> {
        let profile = Self::new(strategies)?;
        profile.check_against(game)?;
        Ok(profile)
    }

    pub fn check_against(&self, game: &GameSpec) -> Result<()> {
        if self.strategies.len() != game.players() {
            return Err(Error::DimensionMismatch {
                what: "profile",
                got: self.strategies.len(),
                expected: game.players(),
            });
        }
        for (i, s) in self.strategies.iter().enumerate() {
            if s.domain() != game.type_domain(i) {
                return Err(Error::InvalidParameter {
                    name: alloc::format!("profile[{i}].domain"),
                    reason: alloc::format!("{} differs from the type domain {}", s.domain(), game.type_domain(i)),
                });
            }
        }
        Ok(())
    }

    /// Midpoint constant rules of degree `degree`.
    pub fn midpoint(game: &GameSpec, degree: usize, basis: Basis) -> Result<Self> {
        let strategies = (0..game.players())
            .map(|i| {
                let mut coeffs = alloc::vec![0.0; degree + 1];
                coeffs[0] = game.action_domain(i).midpoint();
                PolynomialStrategy::with_basis(coeffs, game.type_domain(i), game.action_domain(i), basis)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(strategies)
    }

    pub fn players(&self) -> usize {
        self.strategies.len()
    }

    pub fn degree(&self) -> usize {
        self.strategies[0].degree()
    }

    pub fn basis(&self) -> Basis {
        self.strategies[0].basis()
    }

    pub fn strategy(&self, i: usize) -> &PolynomialStrategy {
        &self.strategies[i]
    }

    pub fn strategies(&self) -> &[PolynomialStrategy] {
        &self.strategies
    }

    pub(crate) fn replace(&mut self, i: usize, s: PolynomialStrategy) {
        self.strategies[i] = s;
    }

    /// Action profile `(f_1(θ_1), …, f_n(θ_n))`.
    pub fn actions(&self, types: &[f64]) -> Vec<f64> {
        self.strategies
            .iter()
            .zip(types)
            .map(|(s, &t)| s.eval_unchecked(t))
            .collect()
    }

    /// Largest coefficient change `max_i ‖v_i - w_i‖_∞`.
    pub fn sup_coeff_distance(&self, other: &Self) -> f64 {
        self.strategies
            .iter()
            .zip(&other.strategies)
            .flat_map(|(a, b)| a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    /// Same rules lifted to degree `degree` by zero-padding (or truncated).
    pub fn resized(&self, degree: usize) -> Result<Self> {
        let strategies = self
            .strategies
            .iter()
            .map(|s| {
                let mut c = s.coeffs().to_vec();
                c.resize(degree + 1, 0.0);
                s.with_coeffs(c)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(strategies)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn evaluation_is_repeatable_and_checks_domain() {
        let s = PolynomialStrategy::new(vec![1.0, 2.0, 3.0], iv(0.0, 3.0), iv(0.0, 100.0)).unwrap();
        assert_eq!(s.eval(2.0).unwrap(), 17.0);
        let a = s.eval(0.7312).unwrap();
        assert_eq!(a.to_bits(), s.eval(0.7312).unwrap().to_bits());
        assert!(s.eval(3.5).is_err());
    }

    #[test]
    fn unit_basis_rescales_the_type() {
        let s = PolynomialStrategy::with_basis(vec![0.0, 1.0], iv(2.0, 4.0), iv(0.0, 1.0), Basis::Unit).unwrap();
        assert_eq!(s.eval(3.0).unwrap(), 0.5);
    }

    #[test]
    fn profile_requires_common_degree() {
        let a = PolynomialStrategy::constant(1.0, 1, iv(0.0, 1.0), iv(0.0, 2.0)).unwrap();
        let b = PolynomialStrategy::constant(1.0, 2, iv(0.0, 1.0), iv(0.0, 2.0)).unwrap();
        assert!(StrategyProfile::new(vec![a.clone(), b]).is_err());
        let p = StrategyProfile::new(vec![a.clone(), a]).unwrap();
        assert_eq!(p.resized(3).unwrap().degree(), 3);
    }
}
