//! Run configuration, read from TOML.

use std::path::{Path, PathBuf};

use dop_core::asymptotics::ShiftReading;
use dop_core::Potential;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Either a named preset or polynomial coefficients `v_0, v_1, …` of `V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialSpec {
    Preset(String),
    Coeffs(Vec<f64>),
}

impl PotentialSpec {
    pub fn build(&self) -> dop_core::Result<Potential> {
        match self {
            PotentialSpec::Preset(name) => Potential::preset(name),
            PotentialSpec::Coeffs(c) => Potential::new(c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftReadingConfig {
    #[default]
    OmegaPlusD,
    OmegaMinusD,
    MinusOmegaPlusD,
    D,
}

impl From<ShiftReadingConfig> for ShiftReading {
    fn from(s: ShiftReadingConfig) -> Self {
        match s {
            ShiftReadingConfig::OmegaPlusD => ShiftReading::OmegaPlusD,
            ShiftReadingConfig::OmegaMinusD => ShiftReading::OmegaMinusD,
            ShiftReadingConfig::MinusOmegaPlusD => ShiftReading::MinusOmegaPlusD,
            ShiftReadingConfig::D => ShiftReading::D,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// KKT residual target of the grid solver.
    pub kkt: f64,
    /// Density threshold separating bands from voids and saturated regions.
    pub band: f64,
    /// Distance from an edge below which bulk formulas are not applied.
    pub margin: f64,
    /// Band and saturated samples are kept only where the oscillating factor is at least this fraction of its amplitude.
    pub near_zero: f64,
    /// Relative tail bound of the theta sums.
    pub theta_tail: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            kkt: 1e-6,
            band: 1e-4,
            margin: 1e-3,
            near_zero: 0.3,
            theta_tail: 1e-16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    /// Relative positions inside each band, void and saturated region.
    pub positions: Vec<f64>,
    /// Offsets in the Airy variable `N^{2/3}ψ`, used on both sides of every edge.
    pub edge_offsets: Vec<f64>,
    /// Airy-variable offsets where edge and bulk formulas are compared.
    pub overlap_offsets: Vec<f64>,
    /// Distance beyond the outermost edges of the exterior void samples.
    pub exterior_offset: f64,
    /// Complex void sample points `[re, im]`.
    pub complex_points: Vec<[f64; 2]>,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            positions: vec![0.15, 0.3, 0.5, 0.7, 0.85],
            edge_offsets: vec![0.5, 1.0, 2.0],
            overlap_offsets: vec![2.0, 4.0],
            exterior_offset: 0.5,
            complex_points: vec![[0.0, 2.0]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub csv: bool,
    pub json: bool,
    /// Also write density and g-function grids.
    pub grids: bool,
    pub grid_points: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("dop-out"),
            csv: true,
            json: true,
            grids: false,
            grid_points: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub n_list: Vec<usize>,
    pub grid_size: usize,
    /// Gauss nodes for the band-structure and surface quadratures.
    pub quadrature_nodes: usize,
    pub tolerances: Tolerances,
    pub sampling: Sampling,
    pub output: OutputConfig,
    pub shift_reading: ShiftReadingConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            potential: PotentialSpec::Preset("gaussian".into()),
            n_list: vec![8, 16, 32, 64],
            grid_size: 2000,
            quadrature_nodes: 256,
            tolerances: Tolerances::default(),
            sampling: Sampling::default(),
            output: OutputConfig::default(),
            shift_reading: ShiftReadingConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let c: RunConfig = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_path_buf(), e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.n_list.is_empty() {
            return bad("n_list is empty".into());
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("n_list must be strictly increasing: {:?}", self.n_list));
        }
        if self.n_list[0] < 4 {
            return bad("every N must be at least 4".into());
        }
        if self.grid_size < 100 {
            return bad(format!("grid_size {} is below 100", self.grid_size));
        }
        if self.quadrature_nodes < 16 {
            return bad("quadrature_nodes must be at least 16".into());
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("kkt", t.kkt),
            ("band", t.band),
            ("margin", t.margin),
            ("near_zero", t.near_zero),
            ("theta_tail", t.theta_tail),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        if self.sampling.positions.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
            return bad("sample positions must lie in (0, 1)".into());
        }
        if self.sampling.edge_offsets.iter().chain(&self.sampling.overlap_offsets).any(|o| !(*o > 0.0)) {
            return bad("edge offsets must be positive".into());
        }
        Ok(())
    }
}
