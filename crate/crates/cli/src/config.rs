//! TOML experiment files.
//!
//! ```toml
//! [model]
//! d = 1
//! lambda = 1.0
//! p = 2.0
//!
//! [model.spectral]
//! family = "riesz"
//! alpha = 0.5
//!
//! [model.temporal]
//! family = "fractional"
//! hurst = 0.75
//!
//! [model.initial]
//! atoms = [{ location = [0.0], weight = 1.0 }]
//!
//! [grid]
//! t = [0.5, 1.0]
//! x = [[0.0], [0.5]]
//!
//! [numerics]
//! truncation = 64
//! seed = 42
//! ```
//!
//! Every key is documented in the repository README.

use std::path::Path;

use pam_core::initial_data::{Atom, DensityFamily, InitialMeasure};
use pam_core::model::Model;
use pam_core::moment_bounds::{DEFAULT_GRID_SIZE, DEFAULT_TRUNCATION};
use pam_core::noise_model::{SpectralFamily, SpectralMeasure, TemporalCovariance};
use pam_core::{PamError, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    model: ModelSection,
    grid: GridSection,
    #[serde(default)]
    numerics: Numerics,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    d: usize,
    lambda: f64,
    #[serde(default = "default_p")]
    p: f64,
    spectral: SpectralFamily,
    temporal: TemporalCovariance,
    initial: InitialSection,
}

fn default_p() -> f64 {
    2.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialSection {
    #[serde(default)]
    atoms: Vec<Atom>,
    density: Option<DensityFamily>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    t: Vec<f64>,
    x: Vec<Vec<f64>>,
}

/// Truncation orders, tolerances, Monte-Carlo sizes and the seed.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    /// Truncation order `N` of the `H` and `H̃` series.
    pub truncation: usize,
    /// Number of time points of the numerical `h_n` table.
    pub grid_size: usize,
    /// Relative tolerance of deterministic quadratures.
    pub quadrature_tol: f64,
    /// Largest accepted series tail bound, relative to the partial sum.
    pub series_tol: f64,
    /// Replica or sample count of Monte-Carlo estimates.
    pub mc_replicas: usize,
    pub seed: u64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            truncation: DEFAULT_TRUNCATION,
            grid_size: DEFAULT_GRID_SIZE,
            quadrature_tol: 1e-10,
            series_tol: 1e-10,
            mc_replicas: 10_000,
            seed: 42,
        }
    }
}

/// A parsed and validated experiment.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub model: Model,
    pub t_grid: Vec<f64>,
    pub x_grid: Vec<Vec<f64>>,
    pub numerics: Numerics,
}

fn config_err(e: impl std::fmt::Display) -> PamError {
    PamError::Config(e.to_string())
}

impl ModelConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PamError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(config_err)?;
        let m = file.model;
        let spectral = SpectralMeasure::new(m.spectral, m.d).map_err(config_err)?;
        let initial = InitialMeasure::new(m.d, m.initial.atoms, m.initial.density).map_err(config_err)?;
        let model = Model::new(m.lambda, m.p, spectral, m.temporal, initial).map_err(config_err)?;
        if file.grid.t.is_empty() || file.grid.x.is_empty() {
            return Err(PamError::Config("grid.t and grid.x must be nonempty".into()));
        }
        if file.grid.t.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(PamError::Config("grid.t entries must be positive and finite".into()));
        }
        if file.grid.x.iter().any(|x| x.len() != m.d || x.iter().any(|v| !v.is_finite())) {
            return Err(PamError::Config(format!(
                "grid.x entries must be finite points with {} coordinates",
                m.d
            )));
        }
        let n = file.numerics;
        if n.truncation == 0 || n.grid_size < 16 || n.mc_replicas < 2 {
            return Err(PamError::Config(
                "numerics needs truncation >= 1, grid_size >= 16 and mc_replicas >= 2".into(),
            ));
        }
        if !(n.quadrature_tol > 0.0) || !(n.series_tol > 0.0) {
            return Err(PamError::Config("tolerances must be positive".into()));
        }
        Ok(Self {
            model,
            t_grid: file.grid.t,
            x_grid: file.grid.x,
            numerics: n,
        })
    }

    /// Largest time on the grid.
    pub fn horizon(&self) -> f64 {
        self.t_grid.iter().cloned().fold(0.0, f64::max)
    }
}
