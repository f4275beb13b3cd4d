//! Spectral measures `μ` of the spatial correlation and temporal covariances `γ`.
//!
//! Every spectral family is radial: `μ(dξ) = ρ(|ξ|) dξ`. Integrals against `μ`
//! are reduced to one-dimensional radial integrals with weight
//! `ω_{d-1} r^{d-1} ρ(r)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, PamError, Result};
use crate::heat_kernel::check_dim;
use crate::quadrature::{integrate, integrate_power_ends, integrate_radial, Estimate, QuadOptions};
use crate::special_functions::{gamma, log_gamma};

/// Surface area `ω_{d-1} = 2π^{d/2}/Γ(d/2)` of the unit sphere in `R^d`.
pub fn sphere_area(d: usize) -> f64 {
    let h = 0.5 * d as f64;
    2.0 * PI.powf(h) / gamma(h).expect("positive half-integer")
}

/// Radial profiles `ρ` for user-specified spectral densities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialDensity {
    /// `ρ(r) = exp(-width² r² / 2)`.
    Gaussian { width: f64 },
    /// `ρ(r) = (1 + r²)^{-ν}`.
    Bessel { nu: f64 },
    /// Log-log linear interpolation through `(radii[i], values[i])`, extended
    /// beyond both ends as a power law with the slope of the end segment.
    Table { radii: Vec<f64>, values: Vec<f64> },
}

impl RadialDensity {
    fn validate(&self) -> Result<()> {
        match self {
            RadialDensity::Gaussian { width } => {
                if !(*width > 0.0) {
                    return domain("gaussian spectral width must be positive");
                }
            }
            RadialDensity::Bessel { nu } => {
                if !nu.is_finite() {
                    return domain("bessel exponent must be finite");
                }
            }
            RadialDensity::Table { radii, values } => {
                if radii.len() < 2 || radii.len() != values.len() {
                    return domain("a radial table needs at least two (radius, value) pairs");
                }
                if radii.windows(2).any(|w| !(w[1] > w[0])) || radii[0] <= 0.0 {
                    return domain("table radii must be positive and strictly increasing");
                }
                if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                    return domain("table values must be positive and finite");
                }
            }
        }
        Ok(())
    }

    fn eval(&self, r: f64) -> f64 {
        match self {
            RadialDensity::Gaussian { width } => (-0.5 * width * width * r * r).exp(),
            RadialDensity::Bessel { nu } => (1.0 + r * r).powf(-nu),
            RadialDensity::Table { radii, values } => {
                let n = radii.len();
                let i = match radii.partition_point(|&x| x <= r) {
                    0 => 0,
                    k if k >= n => n - 2,
                    k => k - 1,
                };
                let (r0, r1) = (radii[i].ln(), radii[i + 1].ln());
                let (v0, v1) = (values[i].ln(), values[i + 1].ln());
                let slope = (v1 - v0) / (r1 - r0);
                (v0 + slope * (r.ln() - r0)).exp()
            }
        }
    }

    /// Power-law exponents of `ρ` at `0` and at `∞`.
    fn exponents(&self) -> (f64, f64) {
        match self {
            RadialDensity::Gaussian { .. } => (0.0, f64::NEG_INFINITY),
            RadialDensity::Bessel { nu } => (0.0, -2.0 * nu),
            RadialDensity::Table { radii, values } => {
                let n = radii.len();
                let s0 = (values[1] / values[0]).ln() / (radii[1] / radii[0]).ln();
                let s1 = (values[n - 1] / values[n - 2]).ln() / (radii[n - 1] / radii[n - 2]).ln();
                (s0, s1)
            }
        }
    }
}

/// Family of the spectral measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SpectralFamily {
    /// `μ(dξ) = |ξ|^{α-d} dξ`, i.e. `f(x) ∝ |x|^{-α}`.
    Riesz { alpha: f64 },
    /// Lebesgue measure in `d = 1`, i.e. `f = δ₀`.
    WhiteSpace,
    /// `μ(dξ) = ρ(|ξ|) dξ`.
    RadialDensity { density: RadialDensity },
}

/// Spectral measure `μ` on `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    family: SpectralFamily,
    d: usize,
}

const QUAD_REL: f64 = 1e-11;

impl SpectralMeasure {
    pub fn new(family: SpectralFamily, d: usize) -> Result<Self> {
        check_dim(d)?;
        match &family {
            SpectralFamily::Riesz { alpha } => {
                if !(*alpha > 0.0) || !alpha.is_finite() {
                    return domain(format!("riesz alpha must be positive, got {alpha}"));
                }
            }
            SpectralFamily::WhiteSpace => {
                if d != 1 {
                    return domain("white-in-space noise is only defined for d = 1");
                }
            }
            SpectralFamily::RadialDensity { density } => density.validate()?,
        }
        Ok(Self { family, d })
    }

    pub fn riesz(alpha: f64, d: usize) -> Result<Self> {
        Self::new(SpectralFamily::Riesz { alpha }, d)
    }

    pub fn white_space() -> Self {
        Self {
            family: SpectralFamily::WhiteSpace,
            d: 1,
        }
    }

    pub fn radial(density: RadialDensity, d: usize) -> Result<Self> {
        Self::new(SpectralFamily::RadialDensity { density }, d)
    }

    pub fn family(&self) -> &SpectralFamily {
        &self.family
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// For power-law families, the exponent `α` with `μ(dξ) = |ξ|^{α-d} dξ`.
    pub fn power_alpha(&self) -> Option<f64> {
        match &self.family {
            SpectralFamily::Riesz { alpha } => Some(*alpha),
            SpectralFamily::WhiteSpace => Some(1.0),
            SpectralFamily::RadialDensity { .. } => None,
        }
    }

    /// Radial density `ρ(r)`.
    pub fn density(&self, r: f64) -> f64 {
        match &self.family {
            SpectralFamily::Riesz { alpha } => r.powf(alpha - self.d as f64),
            SpectralFamily::WhiteSpace => 1.0,
            SpectralFamily::RadialDensity { density } => density.eval(r),
        }
    }

    /// Power-law exponents of `ρ` at `0` and `∞`.
    pub fn density_exponents(&self) -> (f64, f64) {
        match &self.family {
            SpectralFamily::Riesz { alpha } => (alpha - self.d as f64, alpha - self.d as f64),
            SpectralFamily::WhiteSpace => (0.0, 0.0),
            SpectralFamily::RadialDensity { density } => density.exponents(),
        }
    }

    /// Whether `Υ(β) < ∞` for `β > 0`.
    pub fn dalang_ok(&self) -> bool {
        let d = self.d as f64;
        if let SpectralFamily::Riesz { alpha } = self.family {
            return alpha < d.min(2.0);
        }
        let (q0, qi) = self.density_exponents();
        q0 + d > 0.0 && qi + d - 2.0 < 0.0
    }

    /// Model error naming Dalang's condition when it fails.
    pub fn check_dalang(&self) -> Result<()> {
        if self.dalang_ok() {
            return Ok(());
        }
        let detail = match &self.family {
            SpectralFamily::Riesz { alpha } => format!(
                "riesz kernel with alpha = {alpha} in d = {} requires 0 < alpha < min(d, 2)",
                self.d
            ),
            _ => "the spectral density does not integrate 1/(1+|xi|^2)".to_string(),
        };
        Err(PamError::Model(format!("Dalang's condition fails: {detail}")))
    }

    /// Whether `Υ(0) < ∞`.
    pub fn upsilon_zero_finite(&self) -> bool {
        let (q0, _) = self.density_exponents();
        self.dalang_ok() && q0 + self.d as f64 - 2.0 > 0.0
    }

    fn prefactor(&self) -> f64 {
        sphere_area(self.d) / (2.0 * PI).powi(self.d as i32)
    }

    /// Constant `c` of `k(t) = c t^{-α/2}` for power-law families.
    pub fn k_power_constant(&self) -> Option<f64> {
        let alpha = self.power_alpha()?;
        let d = self.d as f64;
        let lg = log_gamma(0.5 * alpha).ok()? - log_gamma(0.5 * d).ok()?;
        Some((2.0 * PI).powf(-d) * PI.powf(0.5 * d) * lg.exp() * 2f64.powf(0.5 * alpha))
    }

    /// Dalang's functional `Υ(β) = (2π)^{-d} ∫ μ(dξ)/(β + |ξ|²)`; `+∞` when divergent.
    pub fn upsilon(&self, beta: f64) -> Result<f64> {
        if !(beta >= 0.0) || beta.is_nan() {
            return domain(format!("upsilon requires beta >= 0, got {beta}"));
        }
        if !self.dalang_ok() || (beta == 0.0 && !self.upsilon_zero_finite()) {
            return Ok(f64::INFINITY);
        }
        if let Some(alpha) = self.power_alpha() {
            return Ok(self.prefactor() * beta.powf(0.5 * alpha - 1.0) * PI / (2.0 * (0.5 * PI * alpha).sin()));
        }
        Ok(self.upsilon_quadrature(beta)?.value)
    }

    /// `Υ(β)` by radial quadrature, for any family.
    pub fn upsilon_quadrature(&self, beta: f64) -> Result<Estimate> {
        let d = self.d as i32;
        let e = integrate_radial(
            |r| self.density(r) * r.powi(d - 1) / (beta + r * r),
            &[beta.sqrt().max(1e-8)],
            QuadOptions::rel(QUAD_REL),
        )?;
        let c = self.prefactor();
        Ok(Estimate {
            value: c * e.value,
            error: c * e.error,
        })
    }

    /// `k(t) = (2π)^{-d} ∫ exp(-t|ξ|²/2) μ(dξ)`.
    pub fn k(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return domain(format!("k requires a positive time, got {t}"));
        }
        if let (Some(c), Some(alpha)) = (self.k_power_constant(), self.power_alpha()) {
            return Ok(c * t.powf(-0.5 * alpha));
        }
        Ok(self.k_quadrature(t)?.value)
    }

    /// `k(t)` by radial quadrature, for any family.
    pub fn k_quadrature(&self, t: f64) -> Result<Estimate> {
        let (q0, _) = self.density_exponents();
        if q0 + self.d as f64 <= 0.0 {
            return Err(PamError::Model("spectral density is not locally integrable".into()));
        }
        let d = self.d as i32;
        let e = integrate_radial(
            |r| self.density(r) * r.powi(d - 1) * (-0.5 * t * r * r).exp(),
            &[1.0 / t.sqrt()],
            QuadOptions::rel(QUAD_REL),
        )?;
        let c = self.prefactor();
        Ok(Estimate {
            value: c * e.value,
            error: c * e.error,
        })
    }

    /// Local power exponent `κ` with `k(s) ≈ A s^{-κ}` as `s → 0`.
    pub fn k_small_time_exponent(&self) -> f64 {
        let d = self.d as f64;
        let (_, qi) = self.density_exponents();
        if qi == f64::NEG_INFINITY || qi + d < 0.0 {
            0.0
        } else {
            0.5 * (qi + d)
        }
    }

    /// `∫_{R^d} exp(-a |tξ + η|²) μ(dξ)`, for `d ≤ 3`.
    pub fn shifted_gaussian_integral(&self, a: f64, t: f64, eta: &[f64]) -> Result<f64> {
        if !(a > 0.0 && t > 0.0) {
            return domain("shifted gaussian integral requires a > 0 and t > 0");
        }
        if eta.len() != self.d {
            return domain("shift vector has the wrong dimension");
        }
        if self.d > 3 {
            return Err(PamError::Unsupported(
                "shifted gaussian integrals are implemented for d <= 3".into(),
            ));
        }
        let (q0, _) = self.density_exponents();
        let norm_eta = eta.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r0 = norm_eta / t;
        let w = 1.0 / (t * (2.0 * a).sqrt());
        let d = self.d;
        let angular = |r: f64| -> f64 {
            let lo = (-a * (t * r - norm_eta).powi(2)).exp();
            match d {
                1 => lo + (-a * (t * r + norm_eta).powi(2)).exp(),
                2 => {
                    let z = 2.0 * a * t * r * norm_eta;
                    lo * 2.0 * PI * scaled_bessel_i0(z)
                }
                _ => {
                    let z = 2.0 * a * t * r * norm_eta;
                    if z < 1e-8 {
                        4.0 * PI * (-a * (t * t * r * r + norm_eta * norm_eta)).exp() * (1.0 + z * z / 6.0)
                    } else {
                        let hi = (-a * (t * r + norm_eta).powi(2)).exp();
                        4.0 * PI * (lo - hi) / (2.0 * z)
                    }
                }
            }
        };
        let integrand = |r: f64| self.density(r) * r.powi(d as i32 - 1) * angular(r);
        let mut breaks = Vec::new();
        for b in [r0 - 8.0 * w, r0, r0 + 8.0 * w, r0 + 40.0 * w] {
            if b > 0.0 && breaks.last().is_none_or(|&p: &f64| b > p) {
                breaks.push(b);
            }
        }
        let opts = QuadOptions::rel(1e-12);
        let p0 = q0 + d as f64 - 1.0;
        let mut total = integrate_power_ends(|r, _, _| integrand(r), 0.0, breaks[0], p0, 0.0, opts)?.value;
        for win in breaks.windows(2) {
            total += integrate(integrand, win[0], win[1], opts)?.value;
        }
        Ok(total)
    }

    /// Whether no sampled shift raises the Gaussian integral above its unshifted value.
    pub fn max_principle_check(&self, a: f64, t: f64, etas: &[Vec<f64>], tolerance: f64) -> Result<bool> {
        let base = self.shifted_gaussian_integral(a, t, &vec![0.0; self.d])?;
        for eta in etas {
            if self.shifted_gaussian_integral(a, t, eta)? > base + tolerance {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Both sides of the Hölder-condition equivalence, decided numerically:
    /// the tail of `(1+|ξ|²)^{-β} μ(dξ)` and the small-time behaviour of
    /// `k(s) s^{β-1}`. `None` means the estimated exponent lies within the
    /// ambiguity band around the boundary.
    pub fn holder_sides(&self, beta: f64) -> Result<(Option<bool>, Option<bool>)> {
        if !(beta > 0.0 && beta < 1.0) {
            return domain(format!("beta must lie in (0, 1), got {beta}"));
        }
        const BAND: f64 = 1e-3;
        let d = self.d as f64;
        let g = |r: f64| -beta * (1.0 + r * r).ln() + self.density(r).ln() + d * r.ln();
        let (r1, r2) = (1e7f64, 1e8f64);
        let (g1, g2) = (g(r1), g(r2));
        let mu_side = if g2 == f64::NEG_INFINITY || (g1.is_finite() && g2 < g1 - 50.0) {
            Some(true)
        } else {
            let slope = (g2 - g1) / (r2 / r1).ln();
            if slope.abs() < BAND {
                None
            } else {
                Some(slope < 0.0)
            }
        };
        let (s1, s2) = (1e-10f64, 1e-12f64);
        let k1 = self.k_quadrature(s1)?.value;
        let k2 = self.k_quadrature(s2)?.value;
        let sigma = ((k2 * s2.powf(beta)).ln() - (k1 * s1.powf(beta)).ln()) / (s2 / s1).ln();
        let k_side = if sigma.abs() < BAND { None } else { Some(sigma > 0.0) };
        Ok((mu_side, k_side))
    }

    /// Whether `∫ (1+|ξ|²)^{-β} μ(dξ) < ∞`.
    pub fn holder_beta_admissible(&self, beta: f64) -> Result<bool> {
        if !(beta > 0.0 && beta < 1.0) {
            return domain(format!("beta must lie in (0, 1), got {beta}"));
        }
        if let Some(alpha) = self.power_alpha() {
            return Ok(beta > 0.5 * alpha);
        }
        match self.holder_sides(beta)? {
            (Some(a), Some(b)) if a == b => Ok(a),
            (a, b) => Err(PamError::NonConvergence {
                message: format!(
                    "the two sides of the Hölder-condition equivalence disagree at beta = {beta}: {a:?} vs {b:?}"
                ),
                achieved: beta,
            }),
        }
    }

    /// Coefficient `C` of the spatial correlation `f(x) = C|x|^{-α}` for the Riesz family.
    pub fn riesz_correlation_constant(&self) -> Option<f64> {
        match &self.family {
            SpectralFamily::Riesz { alpha } => {
                let d = self.d as f64;
                let lg = log_gamma(0.5 * alpha).ok()? - log_gamma(0.5 * (d - alpha)).ok()?;
                Some(lg.exp() / (PI.powf(0.5 * d) * 2f64.powf(d - alpha)))
            }
            _ => None,
        }
    }
}

/// `I₀(z) e^{-z}` by quadrature of `(1/π) ∫₀^π exp(z(cos θ - 1)) dθ`.
fn scaled_bessel_i0(z: f64) -> f64 {
    integrate(|th: f64| (z * (th.cos() - 1.0)).exp(), 0.0, PI, QuadOptions::rel(1e-13))
        .map(|e| e.value / PI)
        .unwrap_or(f64::NAN)
}

/// Temporal covariance `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TemporalCovariance {
    /// `γ(t) = H(2H-1)|t|^{2H-2}` with `H ∈ (1/2, 1)`.
    Fractional { hurst: f64 },
    /// `γ(t) = exp(-rate |t|)`.
    Exponential { rate: f64 },
    /// `γ(t) = c`.
    Constant { c: f64 },
}

impl TemporalCovariance {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TemporalCovariance::Fractional { hurst } => {
                if !(hurst > 0.5 && hurst < 1.0) {
                    return domain(format!("hurst index must lie in (1/2, 1), got {hurst}"));
                }
            }
            TemporalCovariance::Exponential { rate } => {
                if !(rate > 0.0) || !rate.is_finite() {
                    return domain(format!("exponential rate must be positive, got {rate}"));
                }
            }
            TemporalCovariance::Constant { c } => {
                if !(c >= 0.0) || !c.is_finite() {
                    return domain(format!("constant covariance must be nonnegative, got {c}"));
                }
            }
        }
        Ok(())
    }

    /// `γ(t)`; `+∞` at `t = 0` for the fractional family.
    pub fn gamma_eval(&self, t: f64) -> f64 {
        let u = t.abs();
        match *self {
            TemporalCovariance::Fractional { hurst } => {
                if u == 0.0 {
                    f64::INFINITY
                } else {
                    hurst * (2.0 * hurst - 1.0) * u.powf(2.0 * hurst - 2.0)
                }
            }
            TemporalCovariance::Exponential { rate } => (-rate * u).exp(),
            TemporalCovariance::Constant { c } => c,
        }
    }

    /// `Γ_t = ∫_{-t}^{t} γ(s) ds`.
    pub fn big_gamma(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return domain(format!("big_gamma requires t >= 0, got {t}"));
        }
        Ok(match *self {
            TemporalCovariance::Fractional { hurst } => {
                if t == 0.0 {
                    0.0
                } else {
                    2.0 * hurst * t.powf(2.0 * hurst - 1.0)
                }
            }
            TemporalCovariance::Exponential { rate } => -2.0 * (-rate * t).exp_m1() / rate,
            TemporalCovariance::Constant { c } => 2.0 * c * t,
        })
    }

    /// `Γ_∞ = lim Γ_t`, possibly `+∞`.
    pub fn gamma_infinity(&self) -> f64 {
        match *self {
            TemporalCovariance::Fractional { .. } => f64::INFINITY,
            TemporalCovariance::Exponential { rate } => 2.0 / rate,
            TemporalCovariance::Constant { c } => {
                if c == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Even function `Φ` with `Φ'' = γ` and `Φ(0) = Φ'(0) = 0`, so that
    /// `∫_a^b ∫_c^e γ(u-v) dv du = Φ(b-c) - Φ(a-c) - Φ(b-e) + Φ(a-e)`.
    pub fn double_antiderivative(&self, u: f64) -> f64 {
        let u = u.abs();
        match *self {
            TemporalCovariance::Fractional { hurst } => 0.5 * u.powf(2.0 * hurst),
            TemporalCovariance::Exponential { rate } => {
                let x = rate * u;
                (x + (-x).exp_m1()) / (rate * rate)
            }
            TemporalCovariance::Constant { c } => 0.5 * c * u * u,
        }
    }

    /// Exponent `p` of the singularity `γ(u) ~ u^p` at the origin.
    pub fn singularity_exponent(&self) -> f64 {
        match *self {
            TemporalCovariance::Fractional { hurst } => 2.0 * hurst - 2.0,
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riesz_upsilon_value() {
        let sm = SpectralMeasure::riesz(0.5, 1).unwrap();
        assert!((sm.upsilon(1.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
        assert_eq!(sm.upsilon(0.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn white_space_requires_d1() {
        assert!(SpectralMeasure::new(SpectralFamily::WhiteSpace, 2).is_err());
    }

    #[test]
    fn dalang_gate() {
        let bad = SpectralMeasure::riesz(2.5, 3).unwrap();
        let err = bad.check_dalang().unwrap_err();
        assert!(matches!(err, PamError::Model(ref m) if m.contains("Dalang")));
    }

    #[test]
    fn temporal_values() {
        let f = TemporalCovariance::Fractional { hurst: 0.75 };
        assert!((f.gamma_eval(1.0) - 0.375).abs() < 1e-16);
        assert!((f.big_gamma(1.0).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(f.gamma_eval(0.0), f64::INFINITY);
        let e = TemporalCovariance::Exponential { rate: 2.0 };
        assert_eq!(e.gamma_eval(0.0), 1.0);
        assert!((e.gamma_infinity() - 1.0).abs() < 1e-16);
        assert!(TemporalCovariance::Fractional { hurst: 0.5 }.validate().is_err());
    }
}
