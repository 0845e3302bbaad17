//! Discrete surrogates of the product type distribution.
//!
//! Grid quantization builds, per player, `K_i` atoms with their 1-D Voronoi
//! cells and cell masses, then takes the tensor product. Monte-Carlo
//! quantization draws iid atoms with equal weights.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{GameSpec, Interval, TypeMarginal};
use crate::sum::compensated_sum;

/// Probes used by the dense-grid dispersion search.
pub const DISPERSION_PROBES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    GridVoronoi,
    MonteCarlo,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::GridVoronoi => "grid-voronoi",
            Provenance::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuantizerMode {
    /// Atoms per dimension.
    Grid { counts: Vec<usize> },
    /// Total number of iid atoms.
    MonteCarlo { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizerConfig {
    pub mode: QuantizerMode,
}

impl QuantizerConfig {
    pub fn grid(counts: Vec<usize>) -> Self {
        Self {
            mode: QuantizerMode::Grid { counts },
        }
    }

    pub fn monte_carlo(count: usize, seed: u64) -> Self {
        Self {
            mode: QuantizerMode::MonteCarlo { count, seed },
        }
    }

    /// Total number of atoms the configuration produces.
    pub fn total_atoms(&self) -> usize {
        match &self.mode {
            QuantizerMode::Grid { counts } => counts.iter().product(),
            QuantizerMode::MonteCarlo { count, .. } => *count,
        }
    }

    pub fn build(&self, game: &GameSpec) -> Result<QuantizedMeasure> {
        match &self.mode {
            QuantizerMode::Grid { counts } => grid_quantize(game, counts),
            QuantizerMode::MonteCarlo { count, seed } => mc_quantize(game, *count, *seed),
        }
    }
}

/// One axis of a tensor grid: atoms, Voronoi cell edges (`K + 1` values from
/// `lo` to `hi`) and cell masses.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisCells {
    pub atoms: Vec<f64>,
    pub edges: Vec<f64>,
    pub masses: Vec<f64>,
}

/// A finitely supported probability measure `Σ_k p_k δ_{θ^k}` on `Θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedMeasure {
    domains: Vec<Interval>,
    atoms: Vec<f64>,
    weights: Vec<f64>,
    provenance: Provenance,
    axes: Option<Vec<AxisCells>>,
}

impl QuantizedMeasure {
    /// Builds a measure from explicit atoms (row-major, one row per atom).
    pub fn from_atoms(
        domains: Vec<Interval>,
        atoms: Vec<Vec<f64>>,
        weights: Vec<f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptySample);
        }
        if atoms.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                what: "weights",
                got: weights.len(),
                expected: atoms.len(),
            });
        }
        let dim = domains.len();
        let mut flat = Vec::with_capacity(atoms.len() * dim);
        for a in &atoms {
            if a.len() != dim {
                return Err(Error::DimensionMismatch {
                    what: "atom",
                    got: a.len(),
                    expected: dim,
                });
            }
            flat.extend_from_slice(a);
        }
        let m = Self {
            domains,
            atoms: flat,
            weights,
            provenance,
            axes: None,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "weights".to_string(),
                reason: "weights must be finite and non-negative".to_string(),
            });
        }
        let total = compensated_sum(self.weights.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "weights".to_string(),
                reason: alloc::format!("weights sum to {total}, expected 1"),
            });
        }
        for k in 0..self.len() {
            for (x, d) in self.atom(k).iter().zip(&self.domains) {
                d.check("atom", *x)?;
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.domains.len()
    }

    pub fn domains(&self) -> &[Interval] {
        &self.domains
    }

    #[inline]
    pub fn atom(&self, k: usize) -> &[f64] {
        let d = self.dim();
        &self.atoms[k * d..(k + 1) * d]
    }

    #[inline]
    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = &[f64]> {
        self.atoms.chunks_exact(self.dim())
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Per-axis cell structure of a tensor grid.
    pub fn axes(&self) -> Option<&[AxisCells]> {
        self.axes.as_deref()
    }

    /// Marginal of the grid on axis `i`, as a 1-D grid measure.
    pub fn marginal(&self, i: usize) -> Result<QuantizedMeasure> {
        let axes = self.axes().ok_or(Error::UnsupportedProvenance {
            needed: "grid-voronoi",
            found: self.provenance.as_str(),
        })?;
        let axis = axes.get(i).ok_or(Error::DimensionMismatch {
            what: "axis",
            got: i,
            expected: axes.len(),
        })?;
        Ok(Self {
            domains: vec![self.domains[i]],
            atoms: axis.atoms.clone(),
            weights: axis.masses.clone(),
            provenance: Provenance::GridVoronoi,
            axes: Some(vec![axis.clone()]),
        })
    }

    /// `Σ_k p_k g(θ^k)` with compensated summation.
    pub fn expectation<F: FnMut(&[f64]) -> f64>(&self, mut g: F) -> f64 {
        compensated_sum(self.atoms().zip(&self.weights).map(|(a, w)| w * g(a)))
    }
}

fn config_error(reason: impl Into<alloc::string::String>) -> Error {
    Error::Config {
        field: "quantizer.counts".to_string(),
        reason: reason.into(),
    }
}

/// 1-D quantizer of a marginal with `count` atoms.
///
/// Uniform marginals get the midpoints of `count` equal cells; tabulated
/// marginals get the conditional means of an equal-mass partition. Cells are
/// the Voronoi cells of the atoms and masses their probabilities.
pub fn quantize_axis(marginal: &TypeMarginal, count: usize) -> Result<AxisCells> {
    if count == 0 {
        return Err(config_error("every dimension needs at least one atom"));
    }
    let domain = marginal.domain();
    let (lo, w) = (domain.lo(), domain.width());
    let atoms: Vec<f64> = if marginal.is_uniform() {
        (0..count)
            .map(|k| lo + ((2 * k + 1) as f64) * w / ((2 * count) as f64))
            .collect()
    } else {
        let cuts: Vec<f64> = (0..=count)
            .map(|k| match k {
                0 => domain.lo(),
                k if k == count => domain.hi(),
                k => marginal.quantile(k as f64 / count as f64),
            })
            .collect();
        cuts.windows(2)
            .map(|c| {
                let m = marginal.mass(c[0], c[1]);
                if m > 0.0 {
                    domain.clamp(marginal.first_moment(c[0], c[1]) / m)
                } else {
                    0.5 * (c[0] + c[1])
                }
            })
            .collect()
    };
    let mut edges = Vec::with_capacity(count + 1);
    edges.push(domain.lo());
    edges.extend(atoms.windows(2).map(|a| 0.5 * (a[0] + a[1])));
    edges.push(domain.hi());
    let masses = if marginal.is_uniform() {
        vec![1.0 / count as f64; count]
    } else {
        edges.windows(2).map(|e| marginal.mass(e[0], e[1])).collect()
    };
    Ok(AxisCells { atoms, edges, masses })
}

/// Tensor-product grid quantization with `counts[i]` atoms for player `i`.
pub fn grid_quantize(game: &GameSpec, counts: &[usize]) -> Result<QuantizedMeasure> {
    if counts.len() != game.players() {
        return Err(config_error(alloc::format!(
            "expected {} per-player counts, got {}",
            game.players(),
            counts.len()
        )));
    }
    let axes = game
        .marginals()
        .iter()
        .zip(counts)
        .map(|(m, &k)| quantize_axis(m, k))
        .collect::<Result<Vec<_>>>()?;
    let dim = axes.len();
    let total: usize = counts.iter().product();
    let mut atoms = Vec::with_capacity(total * dim);
    let mut weights = Vec::with_capacity(total);
    let mut index = vec![0usize; dim];
    for _ in 0..total {
        let mut w = 1.0;
        for (axis, &k) in axes.iter().zip(&index) {
            atoms.push(axis.atoms[k]);
            w *= axis.masses[k];
        }
        weights.push(w);
        // last axis fastest
        for d in (0..dim).rev() {
            index[d] += 1;
            if index[d] < counts[d] {
                break;
            }
            index[d] = 0;
        }
    }
    let m = QuantizedMeasure {
        domains: game.marginals().iter().map(TypeMarginal::domain).collect(),
        atoms,
        weights,
        provenance: Provenance::GridVoronoi,
        axes: Some(axes),
    };
    m.validate()?;
    Ok(m)
}

/// `count` iid draws from the product measure, each with weight `1/count`.
pub fn mc_quantize(game: &GameSpec, count: usize, seed: u64) -> Result<QuantizedMeasure> {
    if count == 0 {
        return Err(config_error("monte-carlo mode needs at least one atom"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = game.players();
    let mut atoms = Vec::with_capacity(count * dim);
    for _ in 0..count {
        for m in game.marginals() {
            let u: f64 = rng.random();
            atoms.push(m.domain().clamp(m.quantile(u)));
        }
    }
    Ok(QuantizedMeasure {
        domains: game.marginals().iter().map(TypeMarginal::domain).collect(),
        atoms,
        weights: vec![1.0 / count as f64; count],
        provenance: Provenance::MonteCarlo,
        axes: None,
    })
}

/// Fill distance of the atoms in `Θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    pub value: f64,
    /// False when the value comes from a probe search and is only a lower
    /// bound.
    pub exact: bool,
}

fn axis_fill(axis: &AxisCells, domain: Interval) -> f64 {
    let a = &axis.atoms;
    let mut worst = (a[0] - domain.lo()).max(domain.hi() - a[a.len() - 1]);
    for w in a.windows(2) {
        worst = worst.max(0.5 * (w[1] - w[0]));
    }
    worst
}

/// `β_M = max_θ min_k ‖θ - θ^k‖`.
///
/// Exact for tensor grids; a dense probe search for other samples.
pub fn dispersion(sample: &QuantizedMeasure, domains: &[Interval]) -> Result<Dispersion> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if domains.len() != sample.dim() {
        return Err(Error::DimensionMismatch {
            what: "domains",
            got: domains.len(),
            expected: sample.dim(),
        });
    }
    if let Some(axes) = sample.axes() {
        let sq: f64 = axes
            .iter()
            .zip(domains)
            .map(|(a, d)| {
                let f = axis_fill(a, *d);
                f * f
            })
            .sum();
        return Ok(Dispersion {
            value: libm::sqrt(sq),
            exact: true,
        });
    }
    Ok(Dispersion {
        value: probe_dispersion(sample, domains, DISPERSION_PROBES),
        exact: false,
    })
}

/// Largest nearest-atom distance over a tensor grid of about `probes` points.
pub fn probe_dispersion(sample: &QuantizedMeasure, domains: &[Interval], probes: usize) -> f64 {
    let dim = sample.dim();
    let per_axis = (libm::floor(libm::pow(probes as f64, 1.0 / dim as f64) + 1e-9) as usize).max(2);
    // atoms sorted by first coordinate for pruned nearest-neighbour search
    let mut order: Vec<usize> = (0..sample.len()).collect();
    order.sort_by(|&a, &b| sample.atom(a)[0].total_cmp(&sample.atom(b)[0]));
    let firsts: Vec<f64> = order.iter().map(|&k| sample.atom(k)[0]).collect();

    let total = per_axis.pow(dim as u32);
    let mut probe = vec![0.0; dim];
    let mut worst = 0.0f64;
    for flat in 0..total {
        let mut rest = flat;
        for d in (0..dim).rev() {
            probe[d] = domains[d].grid_point(rest % per_axis, per_axis);
            rest /= per_axis;
        }
        let start = firsts.partition_point(|&x| x < probe[0]);
        let mut best = f64::INFINITY;
        let dist = |k: usize| {
            let a = sample.atom(order[k]);
            a.iter().zip(&probe).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
        };
        for (k, &first) in firsts.iter().enumerate().skip(start) {
            let dx = first - probe[0];
            if dx * dx >= best {
                break;
            }
            best = best.min(dist(k));
        }
        for k in (0..start).rev() {
            let dx = probe[0] - firsts[k];
            if dx * dx >= best {
                break;
            }
            best = best.min(dist(k));
        }
        worst = worst.max(best);
    }
    libm::sqrt(worst)
}

// Gauss-Legendre nodes and weights on [-1, 1].
const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_86),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_86),
];
const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

/// Per-axis quadrature for one Voronoi cell: `(offset from atom, weight)`
/// pairs whose weights integrate the marginal over the cell.
fn axis_rule(marginal: &TypeMarginal, lo: f64, hi: f64, atom: f64, rule: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    // split at the atom so |x - atom| is smooth on every piece
    for (a, b) in [(lo, atom.clamp(lo, hi)), (atom.clamp(lo, hi), hi)] {
        for (p, q, mass) in marginal.pieces(a, b) {
            let (mid, half) = (0.5 * (p + q), 0.5 * (q - p));
            for &(x, w) in rule {
                // mass spread uniformly over [p, q]
                out.push((mid + half * x - atom, 0.5 * w * mass));
            }
        }
    }
    out
}

/// `Σ_k ∫_{Θ^k} ‖θ - θ^k‖ dη(θ)` over the Voronoi cells of a grid sample.
///
/// This equals the Kantorovich distance between `η` and the grid measure.
/// Each cell is split at its atom and at density breakpoints and integrated
/// by tensor Gauss-Legendre quadrature, which is exact in one dimension.
pub fn kantorovich_upper_bound(sample: &QuantizedMeasure, game: &GameSpec) -> Result<f64> {
    let axes = sample.axes().ok_or(Error::UnsupportedProvenance {
        needed: "grid-voronoi",
        found: sample.provenance().as_str(),
    })?;
    if axes.len() != game.players() {
        return Err(Error::DimensionMismatch {
            what: "sample dimension",
            got: axes.len(),
            expected: game.players(),
        });
    }
    let marginals: Vec<&TypeMarginal> = game.marginals().iter().collect();
    Ok(cell_integral(axes, &marginals))
}

/// Kantorovich distance between player `i`'s marginal and the grid's axis
/// `i`; the 1-D analogue of [`kantorovich_upper_bound`].
pub fn kantorovich_marginal(sample: &QuantizedMeasure, game: &GameSpec, i: usize) -> Result<f64> {
    if sample.dim() != game.players() {
        return Err(Error::DimensionMismatch {
            what: "sample dimension",
            got: sample.dim(),
            expected: game.players(),
        });
    }
    let axis = sample.marginal(i)?;
    Ok(cell_integral(axis.axes().unwrap_or_default(), &[game.marginal(i)]))
}

fn cell_integral(axes: &[AxisCells], marginals: &[&TypeMarginal]) -> f64 {
    let rule: &[(f64, f64)] = if axes.len() <= 2 { &GL8 } else { &GL4 };
    // per axis, per cell: quadrature offsets and weights
    let rules: Vec<Vec<Vec<(f64, f64)>>> = axes
        .iter()
        .zip(marginals)
        .map(|(axis, m)| {
            (0..axis.atoms.len())
                .map(|k| axis_rule(m, axis.edges[k], axis.edges[k + 1], axis.atoms[k], rule))
                .collect()
        })
        .collect();

    let dim = axes.len();
    let counts: Vec<usize> = axes.iter().map(|a| a.atoms.len()).collect();
    let mut cell = vec![0usize; dim];
    let mut total = crate::sum::Accumulator::default();
    loop {
        let cell_rules: Vec<&[(f64, f64)]> = (0..dim).map(|d| rules[d][cell[d]].as_slice()).collect();
        total.add(integrate_norm(&cell_rules));
        let mut d = dim;
        loop {
            if d == 0 {
                return total.value();
            }
            d -= 1;
            cell[d] += 1;
            if cell[d] < counts[d] {
                break;
            }
            cell[d] = 0;
        }
    }
}

/// Tensor quadrature of `‖x‖` with per-axis rules.
fn integrate_norm(rules: &[&[(f64, f64)]]) -> f64 {
    if rules.len() == 1 {
        return rules[0].iter().map(|(x, w)| w * x.abs()).sum();
    }
    let dim = rules.len();
    let mut idx = vec![0usize; dim];
    let mut acc = crate::sum::Accumulator::default();
    loop {
        let mut sq = 0.0;
        let mut w = 1.0;
        for d in 0..dim {
            let (x, wd) = rules[d][idx[d]];
            sq += x * x;
            w *= wd;
        }
        acc.add(w * libm::sqrt(sq));
        let mut d = dim;
        loop {
            if d == 0 {
                return acc.value();
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < rules[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::sync::Arc;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn uniform_game(domains: &[Interval]) -> GameSpec {
        GameSpec::new(
            "test",
            domains.iter().map(|d| TypeMarginal::uniform(*d)).collect(),
            vec![iv(0.0, 1.0); domains.len()],
            Arc::new(|_: usize, _: &[f64], _: &[f64]| 0.0),
        )
        .unwrap()
    }

    fn one_dim(domain: Interval, count: usize) -> QuantizedMeasure {
        let game = uniform_game(&[domain, iv(0.0, 1.0)]);
        grid_quantize(&game, &[count, 1]).unwrap().marginal(0).unwrap()
    }

    #[test]
    fn grid_examples() {
        let m = one_dim(iv(0.0, 1.0), 4);
        assert_eq!(
            m.atoms().map(|a| a[0]).collect::<Vec<_>>(),
            [0.125, 0.375, 0.625, 0.875]
        );
        assert_eq!(m.weights(), &[0.25; 4]);

        let g = uniform_game(&[iv(0.0, 1.0), iv(0.0, 1.0)]);
        let m = grid_quantize(&g, &[2, 2]).unwrap();
        let atoms: Vec<Vec<f64>> = m.atoms().map(<[f64]>::to_vec).collect();
        assert_eq!(atoms, [[0.25, 0.25], [0.25, 0.75], [0.75, 0.25], [0.75, 0.75]]);
        assert_eq!(m.weights(), &[0.25; 4]);

        let m = one_dim(iv(0.01, 1.01), 1);
        assert!((m.atom(0)[0] - 0.51).abs() < 1e-15);
        assert_eq!(m.weights(), &[1.0]);
    }

    #[test]
    fn zero_count_is_a_config_error() {
        let g = uniform_game(&[iv(0.0, 1.0), iv(0.0, 1.0)]);
        match grid_quantize(&g, &[3, 0]).unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "quantizer.counts"),
            e => panic!("unexpected {e:?}"),
        }
        assert!(mc_quantize(&g, 0, 1).is_err());
    }

    #[test]
    fn midpoint_grid_has_exact_symmetric_origin_atom() {
        let m = one_dim(iv(-1.0, 1.0), 21);
        assert_eq!(m.atom(10)[0], 0.0);
    }

    #[test]
    fn monte_carlo_examples() {
        let g = uniform_game(&[iv(0.0, 1.0), iv(0.0, 1.0)]);
        let one = mc_quantize(&g, 1, 9).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.weights(), &[1.0]);
        let a = mc_quantize(&g, 500, 42).unwrap();
        let b = mc_quantize(&g, 500, 42).unwrap();
        assert_eq!(a, b);
        let big = mc_quantize(&g, 100_000, 7).unwrap();
        let mean = big.expectation(|t| t[0]);
        assert!((mean - 0.5).abs() <= 0.005, "{mean}");
    }

    #[test]
    fn dispersion_examples() {
        for k in [1usize, 3, 4, 10] {
            let m = one_dim(iv(0.0, 1.0), k);
            let d = dispersion(&m, &[iv(0.0, 1.0)]).unwrap();
            assert!(d.exact);
            assert!((d.value - 0.5 / k as f64).abs() < 1e-15);
        }
        let g = uniform_game(&[iv(0.0, 1.0), iv(0.0, 1.0)]);
        let m = grid_quantize(&g, &[5, 5]).unwrap();
        let d = dispersion(&m, m.domains()).unwrap();
        assert!((d.value - libm::sqrt(2.0) / 10.0).abs() < 1e-15);
        let m = one_dim(iv(0.01, 1.01), 1);
        assert!((dispersion(&m, m.domains()).unwrap().value - 0.5).abs() < 1e-15);
        let empty = QuantizedMeasure::from_atoms(vec![iv(0.0, 1.0)], vec![], vec![], Provenance::MonteCarlo);
        assert_eq!(empty.unwrap_err(), Error::EmptySample);
    }

    #[test]
    fn probe_dispersion_bounds_grid_value_from_below() {
        let g = uniform_game(&[iv(0.0, 1.0), iv(0.0, 2.0)]);
        let m = grid_quantize(&g, &[4, 6]).unwrap();
        let exact = dispersion(&m, m.domains()).unwrap().value;
        let probed = probe_dispersion(&m, m.domains(), 40_000);
        assert!(probed <= exact + 1e-15);
        assert!(probed > 0.95 * exact);
    }

    #[test]
    fn mc_dispersion_is_flagged_lower_bound() {
        let g = uniform_game(&[iv(0.0, 1.0), iv(0.0, 1.0)]);
        let m = mc_quantize(&g, 50, 3).unwrap();
        let d = dispersion(&m, m.domains()).unwrap();
        assert!(!d.exact);
        assert!(d.value > 0.0 && d.value < libm::sqrt(2.0));
    }

    #[test]
    fn kantorovich_single_atom_and_midpoint_grid() {
        let m = one_dim(iv(0.0, 1.0), 1);
        let g = uniform_game(&[iv(0.0, 1.0), iv(0.0, 1.0)]);
        // reuse the 1-D marginal through a one-player view
        let k = kantorovich_1d(&m, &g);
        assert!((k - 0.25).abs() < 1e-15);
        for count in [2usize, 5, 7] {
            let m = one_dim(iv(0.0, 1.0), count);
            let k = kantorovich_1d(&m, &g);
            assert!((k - 0.25 / count as f64).abs() < 1e-15 * count as f64);
        }
    }

    fn kantorovich_1d(m: &QuantizedMeasure, g: &GameSpec) -> f64 {
        cell_integral(m.axes().unwrap(), &[g.marginal(0)])
    }

    #[test]
    fn kantorovich_rejects_monte_carlo() {
        let g = uniform_game(&[iv(0.0, 1.0), iv(0.0, 1.0)]);
        let m = mc_quantize(&g, 10, 1).unwrap();
        assert!(matches!(
            kantorovich_upper_bound(&m, &g),
            Err(Error::UnsupportedProvenance { .. })
        ));
    }

    #[test]
    fn kantorovich_two_dim_single_cell_matches_closed_form() {
        // E‖U - c‖ for U uniform on the unit square and c its centre:
        // (√2 + ln(1 + √2)) / 6
        let g = uniform_game(&[iv(0.0, 1.0), iv(0.0, 1.0)]);
        let m = grid_quantize(&g, &[1, 1]).unwrap();
        let exact = (libm::sqrt(2.0) + libm::log(1.0 + libm::sqrt(2.0))) / 6.0;
        let k = kantorovich_upper_bound(&m, &g).unwrap();
        assert!((k - exact).abs() < 1e-5, "{k} vs {exact}");
        assert!(k <= dispersion(&m, m.domains()).unwrap().value);
    }

    #[test]
    fn tabulated_axis_uses_conditional_means_and_voronoi_masses() {
        let marginal = TypeMarginal::tabulated(vec![0.0, 1.0, 2.0], vec![3.0, 1.0]).unwrap();
        let axis = quantize_axis(&marginal, 2).unwrap();
        // equal-mass split at the median 2/3
        assert!((axis.atoms[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((axis.atoms[1] - 7.0 / 6.0).abs() < 1e-12);
        // Voronoi boundary halfway between the atoms
        assert!((axis.edges[1] - 0.75).abs() < 1e-12);
        assert!((axis.masses[0] - 0.5625).abs() < 1e-12);
        assert!((axis.masses[1] - 0.4375).abs() < 1e-12);
    }
}
