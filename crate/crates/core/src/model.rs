//! Games, type distributions and the utility-evaluator interface.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::strategy::StrategyProfile;

/// A compact interval `[lo, hi]` with finite bounds and `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidInterval { lo, hi })
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lo).min(self.hi)
    }

    /// `k`-th of `count` equally spaced points including both endpoints.
    pub fn grid_point(&self, k: usize, count: usize) -> f64 {
        if count <= 1 {
            return self.midpoint();
        }
        if k + 1 == count {
            return self.hi;
        }
        self.lo + self.width() * (k as f64) / ((count - 1) as f64)
    }

    pub(crate) fn check(&self, what: &'static str, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                what,
                value: x,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Uniform,
    /// Piecewise-constant density: `edges[0] = lo`, `edges[last] = hi`,
    /// `masses[k]` is the probability of `[edges[k], edges[k+1]]`.
    Histogram {
        edges: Vec<f64>,
        masses: Vec<f64>,
    },
}

/// One player's marginal type distribution on `Θ_i`.
///
/// Either uniform, or a tabulated piecewise-constant density. Tabulated
/// densities are normalized to unit mass on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeMarginal {
    domain: Interval,
    shape: Shape,
}

impl TypeMarginal {
    pub fn uniform(domain: Interval) -> Self {
        Self {
            domain,
            shape: Shape::Uniform,
        }
    }

    /// Tabulated density with bin `edges` spanning the domain and
    /// non-negative per-bin `densities` (normalized here).
    pub fn tabulated(edges: Vec<f64>, densities: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || densities.len() + 1 != edges.len() {
            return Err(Error::InvalidParameter {
                name: "marginal.edges".to_string(),
                reason: "need at least two edges and one density per bin".to_string(),
            });
        }
        let domain = Interval::new(edges[0], edges[edges.len() - 1])?;
        if edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter {
                name: "marginal.edges".to_string(),
                reason: "edges must be strictly increasing".to_string(),
            });
        }
        if densities.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "marginal.densities".to_string(),
                reason: "densities must be finite and non-negative".to_string(),
            });
        }
        let raw: Vec<f64> = edges
            .windows(2)
            .zip(&densities)
            .map(|(w, d)| d * (w[1] - w[0]))
            .collect();
        let total = crate::sum::compensated_sum(raw.iter().copied());
        if !(total > 0.0) {
            return Err(Error::InvalidParameter {
                name: "marginal.densities".to_string(),
                reason: "total mass must be positive".to_string(),
            });
        }
        let masses = raw.into_iter().map(|m| m / total).collect();
        Ok(Self {
            domain,
            shape: Shape::Histogram { edges, masses },
        })
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.shape, Shape::Uniform)
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        self.domain.check("type", x)?;
        Ok(match &self.shape {
            Shape::Uniform => 1.0 / self.domain.width(),
            Shape::Histogram { edges, masses } => {
                let k = bin_of(edges, x);
                masses[k] / (edges[k + 1] - edges[k])
            }
        })
    }

    /// Cumulative distribution, clamped to the domain.
    pub fn cdf(&self, x: f64) -> f64 {
        let x = self.domain.clamp(x);
        match &self.shape {
            Shape::Uniform => (x - self.domain.lo) / self.domain.width(),
            Shape::Histogram { edges, masses } => {
                let k = bin_of(edges, x);
                let below: f64 = masses[..k].iter().sum();
                below + masses[k] * (x - edges[k]) / (edges[k + 1] - edges[k])
            }
        }
    }

    /// Probability of `[a, b] ∩ Θ_i`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match &self.shape {
            Shape::Uniform => {
                let a = self.domain.clamp(a);
                let b = self.domain.clamp(b);
                (b - a) / self.domain.width()
            }
            Shape::Histogram { .. } => self.pieces(a, b).iter().map(|p| p.2).sum(),
        }
    }

    /// Smallest `x` with `cdf(x) >= u`, `u ∈ [0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match &self.shape {
            Shape::Uniform => self.domain.lo + u * self.domain.width(),
            Shape::Histogram { edges, masses } => {
                let mut below = 0.0;
                for (k, &m) in masses.iter().enumerate() {
                    if m > 0.0 && below + m >= u {
                        let frac = ((u - below) / m).clamp(0.0, 1.0);
                        return edges[k] + frac * (edges[k + 1] - edges[k]);
                    }
                    below += m;
                }
                self.domain.hi
            }
        }
    }

    /// `∫_a^b x dη_i`.
    pub fn first_moment(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match &self.shape {
            Shape::Uniform => {
                let a = self.domain.clamp(a);
                let b = self.domain.clamp(b);
                0.5 * (b * b - a * a) / self.domain.width()
            }
            Shape::Histogram { .. } => self.pieces(a, b).iter().map(|&(lo, hi, m)| m * 0.5 * (lo + hi)).sum(),
        }
    }

    /// Splits `[a, b] ∩ Θ_i` into sub-intervals of constant density,
    /// returning `(lo, hi, mass)` triples.
    pub(crate) fn pieces(&self, a: f64, b: f64) -> Vec<(f64, f64, f64)> {
        let a = self.domain.clamp(a);
        let b = self.domain.clamp(b);
        if b <= a {
            return Vec::new();
        }
        match &self.shape {
            Shape::Uniform => alloc::vec![(a, b, (b - a) / self.domain.width())],
            Shape::Histogram { edges, masses } => edges
                .windows(2)
                .zip(masses)
                .filter_map(|(w, &m)| {
                    let lo = w[0].max(a);
                    let hi = w[1].min(b);
                    (hi > lo).then(|| (lo, hi, m * (hi - lo) / (w[1] - w[0])))
                })
                .collect(),
        }
    }
}

fn bin_of(edges: &[f64], x: f64) -> usize {
    let last = edges.len() - 2;
    match edges[1..=last].iter().position(|&e| x < e) {
        Some(k) => k,
        None => last,
    }
}

/// Utility evaluator `u_i(a, θ)`.
///
/// Implementations must be pure. `own_derivatives` returns the first and
/// second partial derivatives of `u_i` in the player's own action when they
/// are known in closed form; otherwise the solver falls back to central
/// finite differences.
pub trait Utility: Send + Sync {
    fn value(&self, player: usize, actions: &[f64], types: &[f64]) -> f64;

    fn own_derivatives(&self, _player: usize, _actions: &[f64], _types: &[f64]) -> Option<(f64, f64)> {
        None
    }
}

impl<F> Utility for F
where
    F: Fn(usize, &[f64], &[f64]) -> f64 + Send + Sync,
{
    fn value(&self, player: usize, actions: &[f64], types: &[f64]) -> f64 {
        self(player, actions, types)
    }
}

/// Structural facts a game constructor knows about its utilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameProperties {
    /// Every `u_i` is concave in `a_i` on the action box.
    pub concave_in_own_action: bool,
    /// `u_i` is strongly concave in `a_i` uniformly over the action box.
    pub strongly_concave: bool,
    /// False for games known to admit only discontinuous equilibria.
    pub continuous_equilibrium_expected: bool,
}

impl Default for GameProperties {
    fn default() -> Self {
        Self {
            concave_in_own_action: false,
            strongly_concave: false,
            continuous_equilibrium_expected: true,
        }
    }
}

/// An `n`-player Bayesian game with interval types and actions and an
/// independent (product) type distribution.
#[derive(Clone)]
pub struct GameSpec {
    name: String,
    marginals: Vec<TypeMarginal>,
    action_domains: Vec<Interval>,
    utility: Arc<dyn Utility>,
    properties: GameProperties,
    reference: Option<StrategyProfile>,
}

impl fmt::Debug for GameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GameSpec")
            .field("name", &self.name)
            .field("marginals", &self.marginals)
            .field("action_domains", &self.action_domains)
            .field("properties", &self.properties)
            .finish_non_exhaustive()
    }
}

impl GameSpec {
    pub fn new(
        name: impl Into<String>,
        marginals: Vec<TypeMarginal>,
        action_domains: Vec<Interval>,
        utility: Arc<dyn Utility>,
    ) -> Result<Self> {
        if marginals.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "n".to_string(),
                reason: "a game needs at least two players".to_string(),
            });
        }
        if action_domains.len() != marginals.len() {
            return Err(Error::DimensionMismatch {
                what: "action_domains",
                got: action_domains.len(),
                expected: marginals.len(),
            });
        }
        Ok(Self {
            name: name.into(),
            marginals,
            action_domains,
            utility,
            properties: GameProperties::default(),
            reference: None,
        })
    }

    pub fn with_properties(mut self, properties: GameProperties) -> Self {
        self.properties = properties;
        self
    }

    pub fn with_reference(mut self, reference: StrategyProfile) -> Self {
        self.reference = Some(reference);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn players(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginal(&self, i: usize) -> &TypeMarginal {
        &self.marginals[i]
    }

    pub fn marginals(&self) -> &[TypeMarginal] {
        &self.marginals
    }

    pub fn type_domain(&self, i: usize) -> Interval {
        self.marginals[i].domain()
    }

    pub fn action_domain(&self, i: usize) -> Interval {
        self.action_domains[i]
    }

    pub fn properties(&self) -> GameProperties {
        self.properties
    }

    /// Known equilibrium, when the constructor attaches one.
    pub fn reference(&self) -> Option<&StrategyProfile> {
        self.reference.as_ref()
    }

    pub fn utility(&self) -> &dyn Utility {
        &*self.utility
    }

    /// `u_i(a, θ)` without domain checks.
    #[inline]
    pub fn utility_unchecked(&self, i: usize, actions: &[f64], types: &[f64]) -> f64 {
        self.utility.value(i, actions, types)
    }

    /// Whether `own_derivatives` is analytic rather than a finite-difference
    /// fallback.
    pub fn has_analytic_derivatives(&self) -> bool {
        let actions: Vec<f64> = self.action_domains.iter().map(Interval::midpoint).collect();
        let types: Vec<f64> = self.marginals.iter().map(|m| m.domain().midpoint()).collect();
        self.utility.own_derivatives(0, &actions, &types).is_some()
    }

    /// First and second derivative of `u_i` in `a_i`, analytic when
    /// available, central finite differences otherwise.
    pub fn own_derivatives(&self, i: usize, actions: &[f64], types: &[f64]) -> (f64, f64) {
        if let Some(d) = self.utility.own_derivatives(i, actions, types) {
            return d;
        }
        let mut probe = actions.to_vec();
        let a = actions[i];
        let u0 = self.utility.value(i, actions, types);

        let h1 = 1e-6 * a.abs().max(1.0);
        probe[i] = a + h1;
        let up = self.utility.value(i, &probe, types);
        probe[i] = a - h1;
        let dn = self.utility.value(i, &probe, types);
        let first = (up - dn) / (2.0 * h1);

        let h2 = 1e-4 * a.abs().max(1.0);
        probe[i] = a + h2;
        let up2 = self.utility.value(i, &probe, types);
        probe[i] = a - h2;
        let dn2 = self.utility.value(i, &probe, types);
        let second = (up2 - 2.0 * u0 + dn2) / (h2 * h2);
        (first, second)
    }

    /// Probability of the rectangle `Π [lo_i, hi_i]` under the product
    /// measure.
    pub fn rectangle_mass(&self, rect: &[Interval]) -> Result<f64> {
        if rect.len() != self.players() {
            return Err(Error::DimensionMismatch {
                what: "rectangle",
                got: rect.len(),
                expected: self.players(),
            });
        }
        Ok(self
            .marginals
            .iter()
            .zip(rect)
            .map(|(m, r)| m.mass(r.lo(), r.hi()))
            .product())
    }

    fn check_profile(&self, what: &'static str, xs: &[f64], domains: impl Iterator<Item = Interval>) -> Result<()> {
        if xs.len() != self.players() {
            return Err(Error::DimensionMismatch {
                what,
                got: xs.len(),
                expected: self.players(),
            });
        }
        xs.iter().zip(domains).try_for_each(|(&x, d)| d.check(what, x))
    }
}

/// `u_i(a, θ)` with domain checks on both profiles.
pub fn eval_utility(game: &GameSpec, i: usize, actions: &[f64], types: &[f64]) -> Result<f64> {
    if i >= game.players() {
        return Err(Error::InvalidParameter {
            name: "player".to_string(),
            reason: alloc::format!("index {i} out of range for {} players", game.players()),
        });
    }
    game.check_profile("action", actions, game.action_domains.iter().copied())?;
    game.check_profile("type", types, game.marginals.iter().map(TypeMarginal::domain))?;
    Ok(game.utility.value(i, actions, types))
}

/// Density of player `i`'s marginal at `theta`.
pub fn marginal_density(game: &GameSpec, i: usize, theta: f64) -> Result<f64> {
    if i >= game.players() {
        return Err(Error::InvalidParameter {
            name: "player".to_string(),
            reason: alloc::format!("index {i} out of range for {} players", game.players()),
        });
    }
    game.marginal(i).density(theta)
}
