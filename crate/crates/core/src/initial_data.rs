//! Signed initial measures and their heat flows `J₀` and `J₊`.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, PamError, Result};
use crate::heat_kernel::{check_dim, check_time, ln_g, norm_sq};

/// A weighted point mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: Vec<f64>,
    pub weight: f64,
}

/// Closed-form density families. A negative `scale` gives a signed density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DensityFamily {
    /// `scale · dx`.
    Lebesgue { scale: f64 },
    /// `scale · |x|^k dx` with `k ∈ {0, 2, 4}`.
    Polynomial { k: u32, scale: f64 },
    /// `scale · G(width², x - center) dx`, a normalised Gaussian bump.
    Gaussian { center: Vec<f64>, width: f64, scale: f64 },
}

/// Initial data `u₀` as atoms plus an optional density.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialMeasure {
    d: usize,
    atoms: Vec<Atom>,
    density: Option<DensityFamily>,
}

/// Integrability conditions on `|u₀|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InitialConditions {
    /// `∫ e^{-a|x|²} |u₀|(dx) < ∞` for all `a > 0`.
    pub init_ok: bool,
    /// `∫ e^{-β|x|} |u₀|(dx) < ∞` for all `β > 0`.
    pub expo_ok: bool,
}

impl InitialMeasure {
    pub fn new(d: usize, atoms: Vec<Atom>, density: Option<DensityFamily>) -> Result<Self> {
        check_dim(d)?;
        if atoms.is_empty() && density.is_none() {
            return domain("an initial measure needs atoms or a density");
        }
        for a in &atoms {
            if a.location.len() != d {
                return domain(format!(
                    "atom location has {} coordinates, expected {d}",
                    a.location.len()
                ));
            }
            if !a.weight.is_finite() {
                return domain("atom weight must be finite");
            }
        }
        match &density {
            Some(DensityFamily::Polynomial { k, scale }) => {
                if *k > 4 {
                    return Err(PamError::Unsupported(format!(
                        "polynomial densities are tabulated for k <= 4, got {k}"
                    )));
                }
                if k % 2 != 0 {
                    return domain(format!("polynomial exponent must be even, got {k}"));
                }
                if !scale.is_finite() {
                    return domain("density scale must be finite");
                }
            }
            Some(DensityFamily::Gaussian { center, width, scale }) => {
                if center.len() != d {
                    return domain("gaussian density center has the wrong dimension");
                }
                if !(*width > 0.0) || !scale.is_finite() {
                    return domain("gaussian density needs positive width and finite scale");
                }
            }
            Some(DensityFamily::Lebesgue { scale }) => {
                if !scale.is_finite() {
                    return domain("density scale must be finite");
                }
            }
            None => {}
        }
        Ok(Self { d, atoms, density })
    }

    /// Unit point mass at the origin.
    pub fn dirac(d: usize) -> Result<Self> {
        Self::new(
            d,
            vec![Atom {
                location: vec![0.0; d],
                weight: 1.0,
            }],
            None,
        )
    }

    /// Lebesgue measure.
    pub fn lebesgue(d: usize) -> Result<Self> {
        Self::new(d, vec![], Some(DensityFamily::Lebesgue { scale: 1.0 }))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&DensityFamily> {
        self.density.as_ref()
    }

    pub fn is_atomic(&self) -> bool {
        self.density.is_none()
    }

    pub fn is_nonnegative(&self) -> bool {
        let atoms_ok = self.atoms.iter().all(|a| a.weight >= 0.0);
        let dens_ok = match &self.density {
            None => true,
            Some(DensityFamily::Lebesgue { scale })
            | Some(DensityFamily::Polynomial { scale, .. })
            | Some(DensityFamily::Gaussian { scale, .. }) => *scale >= 0.0,
        };
        atoms_ok && dens_ok
    }

    fn flow(&self, t: f64, x: &[f64], absolute: bool) -> Result<f64> {
        check_time(t)?;
        if x.len() != self.d {
            return domain(format!("point has {} coordinates, expected {}", x.len(), self.d));
        }
        let w = |v: f64| if absolute { v.abs() } else { v };
        let mut diff = vec![0.0; self.d];
        let mut total = 0.0;
        for a in &self.atoms {
            for (j, dj) in diff.iter_mut().enumerate() {
                *dj = x[j] - a.location[j];
            }
            total += w(a.weight) * ln_g(t, &diff).exp();
        }
        if let Some(dens) = &self.density {
            total += match dens {
                DensityFamily::Lebesgue { scale } => w(*scale),
                DensityFamily::Polynomial { k, scale } => {
                    w(*scale) * gaussian_power_moment(*k, norm_sq(x), t, self.d)
                }
                DensityFamily::Gaussian { center, width, scale } => {
                    for (j, dj) in diff.iter_mut().enumerate() {
                        *dj = x[j] - center[j];
                    }
                    w(*scale) * ln_g(t + width * width, &diff).exp()
                }
            };
        }
        Ok(total)
    }

    /// `J₀(t, x) = ∫ G(t, x-y) u₀(dy)`.
    pub fn eval_j0(&self, t: f64, x: &[f64]) -> Result<f64> {
        self.flow(t, x, false)
    }

    /// `J₊(t, x) = ∫ G(t, x-y) |u₀|(dy)`.
    pub fn eval_jplus(&self, t: f64, x: &[f64]) -> Result<f64> {
        self.flow(t, x, true)
    }

    /// `∫ exp(-i ζ·y) G(t, x-y) u₀(dy)`.
    pub fn fourier_weighted(&self, t: f64, x: &[f64], zeta: &[f64]) -> Result<Complex<f64>> {
        check_time(t)?;
        if x.len() != self.d || zeta.len() != self.d {
            return domain("point and frequency must match the measure dimension");
        }
        let mut total = Complex::new(0.0, 0.0);
        let mut diff = vec![0.0; self.d];
        for a in &self.atoms {
            for (j, dj) in diff.iter_mut().enumerate() {
                *dj = x[j] - a.location[j];
            }
            let phase = -dot(zeta, &a.location);
            total += Complex::from_polar(a.weight * ln_g(t, &diff).exp(), phase);
        }
        if let Some(dens) = &self.density {
            let z2 = norm_sq(zeta);
            total += match dens {
                DensityFamily::Lebesgue { scale } => {
                    Complex::from_polar(scale * (-0.5 * t * z2).exp(), -dot(zeta, x))
                }
                DensityFamily::Polynomial { k, scale } => {
                    // Shift the Gaussian variable by -i t ζ: the moment formula
                    // is evaluated at the complex "squared norm" Σ (x_j - i t ζ_j)².
                    let a: Complex<f64> = x
                        .iter()
                        .zip(zeta)
                        .map(|(&xj, &zj)| {
                            let m = Complex::new(xj, -t * zj);
                            m * m
                        })
                        .sum();
                    let moment = complex_power_moment(*k, a, t, self.d);
                    Complex::from_polar(scale * (-0.5 * t * z2).exp(), -dot(zeta, x)) * moment
                }
                DensityFamily::Gaussian { center, width, scale } => {
                    let w2 = width * width;
                    let s = t + w2;
                    for (j, dj) in diff.iter_mut().enumerate() {
                        *dj = x[j] - center[j];
                    }
                    let amp = scale * ln_g(s, &diff).exp() * (-0.5 * (t * w2 / s) * z2).exp();
                    let phase: f64 = -zeta
                        .iter()
                        .enumerate()
                        .map(|(j, zj)| zj * (w2 * x[j] + t * center[j]) / s)
                        .sum::<f64>();
                    Complex::from_polar(amp, phase)
                }
            };
        }
        Ok(total)
    }

    /// Both families of integrability conditions hold for every supported measure.
    pub fn check_conditions(&self) -> InitialConditions {
        InitialConditions {
            init_ok: true,
            expo_ok: true,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `E|x + √t Z|^k` for a standard Gaussian `Z` in `R^d`, given `|x|²`.
pub fn gaussian_power_moment(k: u32, x_sq: f64, t: f64, d: usize) -> f64 {
    let dd = d as f64;
    match k {
        0 => 1.0,
        2 => x_sq + dd * t,
        4 => x_sq * x_sq + (4.0 + 2.0 * dd) * t * x_sq + dd * (dd + 2.0) * t * t,
        _ => f64::NAN,
    }
}

fn complex_power_moment(k: u32, a: Complex<f64>, t: f64, d: usize) -> Complex<f64> {
    let dd = d as f64;
    match k {
        0 => Complex::new(1.0, 0.0),
        2 => a + dd * t,
        4 => a * a + (4.0 + 2.0 * dd) * t * a + dd * (dd + 2.0) * t * t,
        _ => Complex::new(f64::NAN, f64::NAN),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_flow_is_kernel() {
        let m = InitialMeasure::dirac(1).unwrap();
        let v = m.eval_j0(0.5, &[0.3]).unwrap();
        assert!((v - crate::heat_kernel::g(0.5, &[0.3]).unwrap()).abs() < 1e-16);
    }

    #[test]
    fn lebesgue_flow_is_one() {
        let m = InitialMeasure::lebesgue(2).unwrap();
        assert_eq!(m.eval_j0(3.0, &[1.0, -2.0]).unwrap(), 1.0);
    }

    #[test]
    fn rejects_odd_or_large_exponent() {
        let odd = InitialMeasure::new(1, vec![], Some(DensityFamily::Polynomial { k: 3, scale: 1.0 }));
        assert!(matches!(odd, Err(PamError::Domain(_))));
        let big = InitialMeasure::new(1, vec![], Some(DensityFamily::Polynomial { k: 6, scale: 1.0 }));
        assert!(matches!(big, Err(PamError::Unsupported(_))));
    }

    #[test]
    fn empty_measure_rejected() {
        assert!(InitialMeasure::new(1, vec![], None).is_err());
    }
}
