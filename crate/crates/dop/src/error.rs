use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Pipeline stage that produced an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Potential,
    Equilibrium,
    Refinement,
    Surface,
    Exact,
    Asymptotics,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Config => "config",
            Stage::Potential => "potential",
            Stage::Equilibrium => "equilibrium",
            Stage::Refinement => "edge refinement",
            Stage::Surface => "surface",
            Stage::Exact => "exact",
            Stage::Asymptotics => "asymptotics",
            Stage::Output => "output",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("[{0}] {1}")]
    Core(Stage, #[source] dop_core::Error),
    #[error("[config] {0}")]
    Config(#[from] ConfigError),
    #[error("[output] {0}")]
    Output(String),
}

impl PipelineError {
    pub fn stage(&self) -> Stage {
        match self {
            PipelineError::Core(s, _) => *s,
            PipelineError::Config(_) => Stage::Config,
            PipelineError::Output(_) => Stage::Output,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, s: Stage) -> Result<T, PipelineError>;
}

impl<T> StageExt<T> for dop_core::Result<T> {
    fn stage(self, s: Stage) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError::Core(s, e))
    }
}
