//! Built-in games: rent-seeking contests and two academic examples with
//! known equilibria.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{GameProperties, GameSpec, Interval, TypeMarginal, Utility};
use crate::strategy::{PolynomialStrategy, StrategyProfile};

/// Contest with linear effort cost `θ_i a_i` and prize share
/// `a_i / Σ_j a_j` (an even split when nobody exerts effort).
#[derive(Debug, Clone, PartialEq)]
pub struct RentSeekingParams {
    /// `Θ_i = [α_i, β_i]`, one per player; `n` is their count.
    pub type_domains: Vec<Interval>,
    /// Upper effort bound per player; defaults to `1/α_i`.
    pub effort_cap: Option<Vec<f64>>,
    /// Lower effort bound `ε ≥ 0` shared by all players.
    pub effort_floor: f64,
    /// Per-player type marginals; uniform when absent.
    pub marginals: Option<Vec<TypeMarginal>>,
}

impl RentSeekingParams {
    pub fn new(type_domains: Vec<Interval>) -> Self {
        Self {
            type_domains,
            effort_cap: None,
            effort_floor: 0.0,
            marginals: None,
        }
    }

    /// Two players of the symmetric contest: types uniform on
    /// `[0.01, 1.01]`, effort in `[0, 100]`.
    pub fn symmetric_pair() -> Self {
        let d = Interval::new(0.01, 1.01).expect("valid interval");
        Self::new(vec![d, d])
    }

    /// Player 2's costs spread over `[0.01, 2.01]`.
    pub fn asymmetric_pair() -> Self {
        Self::new(vec![
            Interval::new(0.01, 1.01).expect("valid interval"),
            Interval::new(0.01, 2.01).expect("valid interval"),
        ])
    }

    pub fn with_floor(mut self, effort_floor: f64) -> Self {
        self.effort_floor = effort_floor;
        self
    }

    pub fn with_cap(mut self, caps: Vec<f64>) -> Self {
        self.effort_cap = Some(caps);
        self
    }

    fn caps(&self) -> Result<Vec<f64>> {
        if let Some(caps) = &self.effort_cap {
            if caps.len() != self.type_domains.len() {
                return Err(Error::DimensionMismatch {
                    what: "effort_cap",
                    got: caps.len(),
                    expected: self.type_domains.len(),
                });
            }
            return Ok(caps.clone());
        }
        Ok(self.type_domains.iter().map(|d| 1.0 / d.lo()).collect())
    }
}

struct RentSeeking {
    players: usize,
}

impl RentSeeking {
    #[inline]
    fn split(player: usize, actions: &[f64]) -> (f64, f64) {
        let own = actions[player];
        let total: f64 = actions.iter().sum();
        (own, total - own)
    }
}

impl Utility for RentSeeking {
    #[inline]
    fn value(&self, player: usize, actions: &[f64], types: &[f64]) -> f64 {
        let (own, others) = Self::split(player, actions);
        let total = own + others;
        let share = if total == 0.0 {
            1.0 / self.players as f64
        } else {
            own / total
        };
        share - own * types[player]
    }

    #[inline]
    fn own_derivatives(&self, player: usize, actions: &[f64], types: &[f64]) -> Option<(f64, f64)> {
        let (own, others) = Self::split(player, actions);
        let total = own + others;
        if others == 0.0 {
            // share is the constant 1 for any positive own effort
            return Some((-types[player], 0.0));
        }
        let first = -types[player] + others / (total * total);
        let second = -2.0 * others / (total * total * total);
        Some((first, second))
    }
}

/// Rent-seeking contest with `u_i = -a_i θ_i + a_i / Σ_j a_j` on
/// `𝒜_i = [ε, cap_i]`.
pub fn rent_seeking(params: &RentSeekingParams) -> Result<GameSpec> {
    let n = params.type_domains.len();
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "type_domains".to_string(),
            reason: "a contest needs at least two players".to_string(),
        });
    }
    if let Some(i) = params.type_domains.iter().position(|d| !(d.lo() > 0.0)) {
        return Err(Error::InvalidParameter {
            name: alloc::format!("type_domains[{i}]"),
            reason: "the lowest cost α_i must be positive".to_string(),
        });
    }
    let caps = params.caps()?;
    let floor = params.effort_floor;
    if !(floor >= 0.0 && caps.iter().all(|&c| floor < c)) {
        return Err(Error::InvalidParameter {
            name: "effort_floor".to_string(),
            reason: "need 0 ≤ ε < every effort cap".to_string(),
        });
    }
    let action_domains = caps
        .iter()
        .map(|&c| Interval::new(floor, c))
        .collect::<Result<Vec<_>>>()?;
    let marginals = match &params.marginals {
        Some(ms) => {
            if ms.len() != n || ms.iter().zip(&params.type_domains).any(|(m, d)| m.domain() != *d) {
                return Err(Error::InvalidParameter {
                    name: "marginals".to_string(),
                    reason: "one marginal per player on that player's type domain".to_string(),
                });
            }
            ms.clone()
        }
        None => params.type_domains.iter().map(|d| TypeMarginal::uniform(*d)).collect(),
    };
    let game = GameSpec::new(
        "rent-seeking",
        marginals,
        action_domains,
        Arc::new(RentSeeking { players: n }),
    )?;
    Ok(game.with_properties(GameProperties {
        concave_in_own_action: true,
        strongly_concave: floor > 0.0,
        continuous_equilibrium_expected: true,
    }))
}

/// Lower bound `2(n-1)ε / (Σ_i cap_i)^3` on `-∂²u_i/∂a_i²` over `𝒜^ε`.
pub fn rent_seeking_concavity_bound(params: &RentSeekingParams) -> Result<f64> {
    let caps = params.caps()?;
    let n = params.type_domains.len() as f64;
    let s: f64 = caps.iter().sum();
    Ok(2.0 * (n - 1.0) * params.effort_floor / (s * s * s))
}

struct BilinearQuadratic;

impl Utility for BilinearQuadratic {
    fn value(&self, player: usize, a: &[f64], t: &[f64]) -> f64 {
        a[0] * a[1] * t[player] - a[player] * a[player]
    }

    fn own_derivatives(&self, player: usize, a: &[f64], t: &[f64]) -> Option<(f64, f64)> {
        Some((a[1 - player] * t[player] - 2.0 * a[player], -2.0))
    }
}

struct Bilinear;

impl Utility for Bilinear {
    fn value(&self, player: usize, a: &[f64], t: &[f64]) -> f64 {
        a[0] * a[1] * t[player]
    }

    fn own_derivatives(&self, player: usize, a: &[f64], t: &[f64]) -> Option<(f64, f64)> {
        Some((a[1 - player] * t[player], 0.0))
    }
}

fn academic_domains() -> (Vec<TypeMarginal>, Vec<Interval>) {
    let types = Interval::new(-1.0, 1.0).expect("valid interval");
    let actions = Interval::new(0.0, 10.0).expect("valid interval");
    (vec![TypeMarginal::uniform(types); 2], vec![actions; 2])
}

/// `u_i = a_1 a_2 θ_i - a_i²` on `[0,10]² × [-1,1]²`; its unique
/// equilibrium is `f* ≡ 0`, attached as the reference profile.
pub fn bilinear_quadratic() -> GameSpec {
    let (marginals, actions) = academic_domains();
    let zero = |i: usize| {
        PolynomialStrategy::constant(0.0, 0, marginals[i].domain(), actions[i]).expect("finite coefficients")
    };
    let reference = StrategyProfile::new(vec![zero(0), zero(1)]).expect("matching degrees");
    GameSpec::new("bilinear-quadratic", marginals, actions, Arc::new(BilinearQuadratic))
        .expect("two players")
        .with_properties(GameProperties {
            concave_in_own_action: true,
            strongly_concave: true,
            continuous_equilibrium_expected: true,
        })
        .with_reference(reference)
}

/// `u_i = a_1 a_2 θ_i` on `[0,10]² × [-1,1]²`. Has several discontinuous
/// equilibria and no continuous-equilibrium guarantee; meant for the
/// brute-force oracle.
pub fn bilinear() -> GameSpec {
    let (marginals, actions) = academic_domains();
    GameSpec::new("bilinear", marginals, actions, Arc::new(Bilinear))
        .expect("two players")
        .with_properties(GameProperties {
            concave_in_own_action: true,
            strongly_concave: false,
            continuous_equilibrium_expected: false,
        })
}

/// Jacobian of the pseudo-gradient `H(a, θ) = (∂u_i/∂a_i)_i` in `a`, by
/// central differences of the own-action derivatives.
pub fn pseudo_gradient_jacobian(game: &GameSpec, actions: &[f64], types: &[f64]) -> Vec<Vec<f64>> {
    let n = game.players();
    let mut jac = vec![vec![0.0; n]; n];
    let mut probe = actions.to_vec();
    for j in 0..n {
        let h = 1e-6 * actions[j].abs().max(1.0);
        for (i, row) in jac.iter_mut().enumerate() {
            probe[j] = actions[j] + h;
            let up = game.own_derivatives(i, &probe, types).0;
            probe[j] = actions[j] - h;
            let dn = game.own_derivatives(i, &probe, types).0;
            row[j] = (up - dn) / (2.0 * h);
        }
        probe[j] = actions[j];
    }
    jac
}
