use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::GameSpec;
use crate::quantize::quantize_axis;
use crate::sum::Accumulator;

/// Utility evaluations allowed in one table sweep.
pub const BRUTE_FORCE_BUDGET: u128 = 10_000_000;

const MAX_TABLE_SWEEPS: usize = 10_000;

/// Table strategies: `actions[i][k]` is player `i`'s action at type
/// `types[i][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TableProfile {
    pub types: Vec<Vec<f64>>,
    pub actions: Vec<Vec<f64>>,
    /// Index of each action in the player's action grid.
    pub levels: Vec<Vec<usize>>,
}

/// Exhaustive pointwise best-response iteration on type and action grids.
///
/// Types are the grid quantizer's atoms with their cell masses, so the
/// oracle integrates against the same discrete measure as the solver.
pub struct BruteForce<'a> {
    game: &'a GameSpec,
    types: Vec<Vec<f64>>,
    masses: Vec<Vec<f64>>,
    actions: Vec<Vec<f64>>,
}

impl<'a> BruteForce<'a> {
    pub fn new(game: &'a GameSpec, type_points: &[usize], action_levels: &[usize]) -> Result<Self> {
        let n = game.players();
        for (what, v) in [("type_points", type_points), ("action_levels", action_levels)] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    what,
                    got: v.len(),
                    expected: n,
                });
            }
            if v.contains(&0) {
                return Err(Error::Config {
                    field: alloc::format!("oracle.{what}"),
                    reason: "every grid needs at least one point".into(),
                });
            }
        }
        let mut evaluations: u128 = 0;
        for i in 0..n {
            let others: u128 = (0..n).filter(|&j| j != i).map(|j| type_points[j] as u128).product();
            evaluations = evaluations.saturating_add(type_points[i] as u128 * action_levels[i] as u128 * others);
        }
        if evaluations > BRUTE_FORCE_BUDGET {
            return Err(Error::BudgetExceeded {
                evaluations,
                limit: BRUTE_FORCE_BUDGET,
                type_points: type_points.to_vec(),
                action_levels: action_levels.to_vec(),
            });
        }
        let mut types = Vec::with_capacity(n);
        let mut masses = Vec::with_capacity(n);
        for (i, &k) in type_points.iter().enumerate() {
            let cells = quantize_axis(game.marginal(i), k)?;
            types.push(cells.atoms);
            masses.push(cells.masses);
        }
        let actions = action_levels
            .iter()
            .enumerate()
            .map(|(i, &l)| (0..l).map(|k| game.action_domain(i).grid_point(k, l)).collect())
            .collect();
        Ok(Self {
            game,
            types,
            masses,
            actions,
        })
    }

    pub fn type_grid(&self, i: usize) -> &[f64] {
        &self.types[i]
    }

    pub fn action_grid(&self, i: usize) -> &[f64] {
        &self.actions[i]
    }

    /// Constant tables at every combination of lowest and highest action,
    /// then the constant midpoint-level table.
    pub fn seeds(&self) -> Vec<Vec<Vec<usize>>> {
        let n = self.game.players();
        let mut seeds = Vec::with_capacity((1 << n.min(16)) + 1);
        for mask in 0..(1usize << n.min(16)) {
            seeds.push(
                (0..n)
                    .map(|i| {
                        let top = if i < 16 && mask & (1 << i) != 0 {
                            self.actions[i].len() - 1
                        } else {
                            0
                        };
                        vec![top; self.types[i].len()]
                    })
                    .collect(),
            );
        }
        seeds.push(
            (0..n)
                .map(|i| vec![(self.actions[i].len() - 1) / 2; self.types[i].len()])
                .collect(),
        );
        seeds
    }

    /// Player `i`'s expected utility at own type index `k` and action level
    /// `l` against the table `levels`.
    pub fn value(&self, levels: &[Vec<usize>], i: usize, k: usize, l: usize) -> f64 {
        let n = self.game.players();
        let mut actions = vec![0.0; n];
        let mut types = vec![0.0; n];
        actions[i] = self.actions[i][l];
        types[i] = self.types[i][k];
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let mut idx = vec![0usize; others.len()];
        let mut acc = Accumulator::default();
        loop {
            let mut w = 1.0;
            for (slot, &j) in others.iter().enumerate() {
                let m = idx[slot];
                types[j] = self.types[j][m];
                actions[j] = self.actions[j][levels[j][m]];
                w *= self.masses[j][m];
            }
            acc.add(w * self.game.utility_unchecked(i, &actions, &types));
            // odometer, last opponent fastest
            let mut slot = others.len();
            loop {
                if slot == 0 {
                    return acc.value();
                }
                slot -= 1;
                idx[slot] += 1;
                if idx[slot] < self.types[others[slot]].len() {
                    break;
                }
                idx[slot] = 0;
            }
        }
    }

    /// Pointwise best level, ties broken toward the smallest action.
    pub fn best_level(&self, levels: &[Vec<usize>], i: usize, k: usize) -> usize {
        let mut best = (0, self.value(levels, i, k, 0));
        for l in 1..self.actions[i].len() {
            let v = self.value(levels, i, k, l);
            if v > best.1 {
                best = (l, v);
            }
        }
        best.0
    }

    /// Gauss-Seidel table iteration from `seed`; `None` when no fixed point
    /// is reached within the sweep budget.
    pub fn run_from(&self, seed: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
        let mut levels = seed.to_vec();
        for _ in 0..MAX_TABLE_SWEEPS {
            let mut changed = false;
            for i in 0..self.game.players() {
                let next: Vec<usize> = (0..self.types[i].len())
                    .map(|k| self.best_level(&levels, i, k))
                    .collect();
                if next != levels[i] {
                    levels[i] = next;
                    changed = true;
                }
            }
            if !changed {
                return Some(levels);
            }
        }
        None
    }

    /// No single action level improves any player at any type point.
    pub fn is_fixed_point(&self, levels: &[Vec<usize>]) -> bool {
        (0..self.game.players()).all(|i| {
            (0..self.types[i].len()).all(|k| {
                let current = self.value(levels, i, k, levels[i][k]);
                (0..self.actions[i].len()).all(|l| self.value(levels, i, k, l) <= current)
            })
        })
    }

    pub fn table(&self, levels: Vec<Vec<usize>>) -> TableProfile {
        TableProfile {
            types: self.types.clone(),
            actions: levels
                .iter()
                .enumerate()
                .map(|(i, row)| row.iter().map(|&l| self.actions[i][l]).collect())
                .collect(),
            levels,
        }
    }

    /// Distinct fixed points in first-found order.
    pub fn collect<I>(&self, found: I) -> Vec<TableProfile>
    where
        I: IntoIterator<Item = Option<Vec<Vec<usize>>>>,
    {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for levels in found.into_iter().flatten() {
            if seen.insert(levels.clone()) {
                out.push(self.table(levels));
            }
        }
        out
    }
}

/// All distinct table equilibria reached from the corner seeds.
pub fn brute_force_discrete_equilibria(
    game: &GameSpec,
    type_points: &[usize],
    action_levels: &[usize],
) -> Result<Vec<TableProfile>> {
    let oracle = BruteForce::new(game, type_points, action_levels)?;
    let seeds = oracle.seeds();
    Ok(oracle.collect(seeds.iter().map(|s| oracle.run_from(s))))
}
