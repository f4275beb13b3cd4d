//! The validated model bundle shared by the chaos and bound computations.

use crate::error::{domain, Result};
use crate::initial_data::InitialMeasure;
use crate::noise_model::{SpectralMeasure, TemporalCovariance};

/// Dimension, coupling, moment order and the three model ingredients.
#[derive(Debug, Clone)]
pub struct Model {
    pub d: usize,
    pub lambda: f64,
    pub p: f64,
    pub spectral: SpectralMeasure,
    pub temporal: TemporalCovariance,
    pub initial: InitialMeasure,
}

impl Model {
    pub fn new(
        lambda: f64,
        p: f64,
        spectral: SpectralMeasure,
        temporal: TemporalCovariance,
        initial: InitialMeasure,
    ) -> Result<Self> {
        let d = spectral.d();
        if initial.d() != d {
            return domain(format!(
                "initial measure lives in d = {} but the noise in d = {d}",
                initial.d()
            ));
        }
        if !lambda.is_finite() {
            return domain("lambda must be finite");
        }
        if !(p >= 2.0) || !p.is_finite() {
            return domain(format!("moment order p must be at least 2, got {p}"));
        }
        temporal.validate()?;
        Ok(Self {
            d,
            lambda,
            p,
            spectral,
            temporal,
            initial,
        })
    }

    /// `d = 1`, Riesz `α = 1/2`, fractional `H = 3/4`, `u₀ = δ₀`, `λ = 1`, `p = 2`.
    pub fn standard() -> Self {
        Self::new(
            1.0,
            2.0,
            SpectralMeasure::riesz(0.5, 1).expect("valid riesz exponent"),
            TemporalCovariance::Fractional { hurst: 0.75 },
            InitialMeasure::dirac(1).expect("valid dimension"),
        )
        .expect("standard model is valid")
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }
}
