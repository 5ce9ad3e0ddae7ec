use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partition::{KMode, MergeStrategy, SpectralParams, SphParams};
use crate::simplify::{Simplifier, SimplifyParams};
use crate::solvers::{EaParams, PhysarumParams, QuboParams, SaParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionerKind {
    #[default]
    None,
    /// Greedy modularity.
    Gm,
    /// Spectral clustering.
    Sc,
    Voronoi,
}

impl PartitionerKind {
    pub const ALL: [Self; 4] = [Self::None, Self::Gm, Self::Sc, Self::Voronoi];

    pub fn label(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Gm => "gm",
            Self::Sc => "sc",
            Self::Voronoi => "voronoi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[default]
    Baseline,
    Ea,
    Sa,
    Physarum,
    Qubo,
    Exact,
}

impl SolverKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Baseline => "baseline",
            Self::Ea => "ea",
            Self::Sa => "sa",
            Self::Physarum => "physarum",
            Self::Qubo => "qubo",
            Self::Exact => "exact",
        }
    }
}

impl Simplifier {
    pub const ALL: [Self; 4] = [Self::None, Self::Triangle, Self::Gng, Self::Physarum];

    pub fn label(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Triangle => "triangle",
            Self::Gng => "gng",
            Self::Physarum => "physarum",
        }
    }
}

impl MergeStrategy {
    pub fn label(self) -> &'static str {
        match self {
            Self::Sph => "sph",
            Self::CenterOfMass => "com",
        }
    }
}

/// Everything a pipeline run needs besides the problem itself. Solver seeds
/// inside the nested parameter blocks are overridden by seeds derived from
/// `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub problem: Option<PathBuf>,
    pub image: Option<PathBuf>,
    pub pixel_connectivity: u8,
    pub simplifier: Simplifier,
    pub partitioner: PartitionerKind,
    pub k: KMode,
    pub solver: SolverKind,
    /// Required exactly when a partitioner is configured.
    pub merger: Option<MergeStrategy>,
    pub seed: u64,
    /// Concurrent subproblem solves; 0 uses every available core.
    pub parallelism: usize,
    pub simplify: SimplifyParams,
    pub spectral: SpectralParams,
    pub voronoi_node_limit: Option<usize>,
    pub sph: SphParams,
    pub ea: EaParams,
    pub sa: SaParams,
    pub physarum: PhysarumParams,
    pub qubo: QuboParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            problem: None,
            image: None,
            pixel_connectivity: 4,
            simplifier: Simplifier::None,
            partitioner: PartitionerKind::None,
            k: KMode::Guess,
            solver: SolverKind::Baseline,
            merger: None,
            seed: 0,
            parallelism: 0,
            simplify: SimplifyParams::default(),
            spectral: SpectralParams::default(),
            voronoi_node_limit: None,
            sph: SphParams::default(),
            ea: EaParams::default(),
            sa: SaParams::default(),
            physarum: PhysarumParams::default(),
            qubo: QuboParams::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.into()));
        if self.problem.is_some() && self.image.is_some() {
            return bad("give either a problem file or an image, not both");
        }
        if !matches!(self.pixel_connectivity, 4 | 8) {
            return bad("pixel_connectivity must be 4 or 8");
        }
        if self.partitioner != PartitionerKind::None && self.merger.is_none() {
            return bad("a partitioned run needs a merger");
        }
        if self.partitioner == PartitionerKind::None && self.merger.is_some() {
            return bad("a merger is only meaningful with a partitioner");
        }
        if self.k == KMode::Explicit(0) {
            return bad("k must be positive");
        }
        if self.simplifier == Simplifier::Gng {
            self.simplify.gng.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        Ok(())
    }

    /// Merger label for reports; empty for unpartitioned runs.
    pub fn merger_label(&self) -> &'static str {
        match (self.partitioner, self.merger) {
            (PartitionerKind::None, _) | (_, None) => "",
            (_, Some(m)) => m.label(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_overrides() {
        let text = r#"
            seed = 9
            simplifier = "gng"
            partitioner = "sc"
            k = "eigengap"
            merger = "com"
            solver = "physarum"

            [physarum]
            pressure_mode = "dirichlet"
            iterations = 50

            [spectral]
            eigs = "largest"
        "#;
        let cfg = PipelineConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.merger, Some(MergeStrategy::CenterOfMass));
        assert_eq!(cfg.physarum.iterations, 50);
        assert_eq!(cfg.physarum.alpha, PhysarumParams::default().alpha);
        let again = PipelineConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(again, cfg);
        let explicit = PipelineConfig::from_toml_str("k = { explicit = 4 }").unwrap();
        assert_eq!(explicit.k, KMode::Explicit(4));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(matches!(PipelineConfig::from_toml_str("partitioner = \"gm\""), Err(ConfigError::Invalid(_))));
        assert!(matches!(PipelineConfig::from_toml_str("merger = \"sph\""), Err(ConfigError::Invalid(_))));
        assert!(matches!(PipelineConfig::from_toml_str("pixel_connectivity = 6"), Err(ConfigError::Invalid(_))));
        assert!(matches!(PipelineConfig::from_toml_str("solver = \"magic\""), Err(ConfigError::Toml(_))));
        assert!(matches!(PipelineConfig::from_toml_str("unknown_key = 1"), Err(ConfigError::Toml(_))));
    }
}
