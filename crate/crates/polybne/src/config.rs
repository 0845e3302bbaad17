//! Experiment configuration: one JSON document per run.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use polybne_core::diagnostics::{SampleTemplate, StudyAxis};
use polybne_core::games::{self, RentSeekingParams};
use polybne_core::{Basis, GameSpec, Interval, QuantizerConfig, SolverConfig, TypeMarginal};
use serde::{Deserialize, Serialize};

use crate::plugins;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub game: GameConfig,
    #[serde(default)]
    pub quantizer: QuantizerSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<StudySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("output")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GameConfig {
    RentSeeking {
        type_domains: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        effort_cap: Option<Vec<f64>>,
        #[serde(default)]
        effort_floor: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        marginals: Option<Vec<MarginalConfig>>,
    },
    BilinearQuadratic,
    Bilinear,
    Plugin {
        name: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MarginalConfig {
    Uniform,
    Tabulated { edges: Vec<f64>, densities: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum QuantizerSection {
    Grid {
        counts: Vec<usize>,
    },
    MonteCarlo {
        count: usize,
        /// Falls back to the run seed.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

impl Default for QuantizerSection {
    fn default() -> Self {
        Self::Grid { counts: vec![20, 20] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub degree: usize,
    pub basis: BasisName,
    pub outer_tol: f64,
    pub outer_max_sweeps: usize,
    pub inner_tol: f64,
    pub inner_max_newton: usize,
    pub coeff_box: f64,
    pub damping: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            degree: d.degree,
            basis: BasisName::Raw,
            outer_tol: d.outer_tol,
            outer_max_sweeps: d.outer_max_sweeps,
            inner_tol: d.inner_tol,
            inner_max_newton: d.inner_max_newton,
            coeff_box: d.coeff_box,
            damping: d.damping,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisName {
    Raw,
    Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StudySection {
    /// Levels are degrees; the sample comes from `quantizer`.
    Degree { levels: Vec<usize> },
    /// Levels are total atom counts. Grid quantizers split each level as
    /// `K · aspect[i]` per axis; Monte-Carlo quantizers draw that many points.
    SampleSize {
        levels: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        aspect: Option<Vec<usize>>,
    },
}

impl StudySection {
    pub fn levels(&self) -> &[usize] {
        match self {
            Self::Degree { levels } | Self::SampleSize { levels, .. } => levels,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub type_points: Vec<usize>,
    pub action_levels: Vec<usize>,
    /// Random rule pairs for the monotonicity check.
    #[serde(default = "default_monotonicity_pairs")]
    pub monotonicity_pairs: usize,
    /// Random probes for the strong-concavity estimate.
    #[serde(default = "default_concavity_probes")]
    pub concavity_probes: usize,
}

fn default_monotonicity_pairs() -> usize {
    100
}

fn default_concavity_probes() -> usize {
    10_000
}

impl ExperimentConfig {
    /// Parses a config file; errors carry the line and column or the field.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            anyhow!("field `{}`: {inner}", e.path())
        })?;
        Ok(cfg)
    }

    pub fn build_game(&self) -> Result<GameSpec> {
        match &self.game {
            GameConfig::RentSeeking {
                type_domains,
                effort_cap,
                effort_floor,
                marginals,
            } => {
                let domains = type_domains
                    .iter()
                    .enumerate()
                    .map(|(i, [lo, hi])| {
                        Interval::new(*lo, *hi).with_context(|| format!("field `game.type_domains[{i}]`"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut params = RentSeekingParams::new(domains.clone()).with_floor(*effort_floor);
                if let Some(caps) = effort_cap {
                    params = params.with_cap(caps.clone());
                }
                if let Some(ms) = marginals {
                    if ms.len() != domains.len() {
                        bail!(
                            "field `game.marginals`: {} entries for {} players",
                            ms.len(),
                            domains.len()
                        );
                    }
                    let built = ms
                        .iter()
                        .zip(&domains)
                        .enumerate()
                        .map(|(i, (m, d))| match m {
                            MarginalConfig::Uniform => Ok(TypeMarginal::uniform(*d)),
                            MarginalConfig::Tabulated { edges, densities } => {
                                TypeMarginal::tabulated(edges.clone(), densities.clone())
                                    .with_context(|| format!("field `game.marginals[{i}]`"))
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                    params.marginals = Some(built);
                }
                games::rent_seeking(&params).context("field `game`")
            }
            GameConfig::BilinearQuadratic => Ok(games::bilinear_quadratic()),
            GameConfig::Bilinear => Ok(games::bilinear()),
            GameConfig::Plugin { name } => {
                plugins::lookup(name).ok_or_else(|| anyhow!("field `game.name`: no plugin game named `{name}`"))
            }
        }
    }

    pub fn quantizer(&self) -> QuantizerConfig {
        match &self.quantizer {
            QuantizerSection::Grid { counts } => QuantizerConfig::grid(counts.clone()),
            QuantizerSection::MonteCarlo { count, seed } => {
                QuantizerConfig::monte_carlo(*count, seed.unwrap_or(self.seed))
            }
        }
    }

    pub fn solver(&self) -> Result<SolverConfig> {
        let s = &self.solver;
        let cfg = SolverConfig {
            degree: s.degree,
            basis: match s.basis {
                BasisName::Raw => Basis::Raw,
                BasisName::Unit => Basis::Unit,
            },
            outer_tol: s.outer_tol,
            outer_max_sweeps: s.outer_max_sweeps,
            inner_tol: s.inner_tol,
            inner_max_newton: s.inner_max_newton,
            coeff_box: s.coeff_box,
            damping: s.damping,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn study_axis(&self) -> Result<(StudyAxis, Vec<usize>)> {
        let Some(study) = &self.study else {
            bail!("field `study`: the study command needs a study section");
        };
        if study.levels().is_empty() {
            bail!("field `study.levels`: needs at least one level");
        }
        let axis = match study {
            StudySection::Degree { .. } => StudyAxis::Degree {
                quantizer: self.quantizer(),
            },
            StudySection::SampleSize { aspect, .. } => match &self.quantizer {
                QuantizerSection::Grid { counts } => StudyAxis::SampleSize {
                    mode: SampleTemplate::Grid {
                        aspect: aspect.clone().unwrap_or_else(|| vec![1; counts.len()]),
                    },
                },
                QuantizerSection::MonteCarlo { seed, .. } => StudyAxis::SampleSize {
                    mode: SampleTemplate::MonteCarlo {
                        seed: seed.unwrap_or(self.seed),
                    },
                },
            },
        };
        Ok((axis, study.levels().to_vec()))
    }
}
