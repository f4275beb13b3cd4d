//! The d-dimensional Gaussian heat kernel and identities built on it.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{domain, PamError, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 8;

/// A space-time point `(t, x)` with `t > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatPoint {
    t: f64,
    x: Vec<f64>,
}

impl HeatPoint {
    pub fn new(t: f64, x: Vec<f64>) -> Result<Self> {
        check_time(t)?;
        check_dim(x.len())?;
        Ok(Self { t, x })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn d(&self) -> usize {
        self.x.len()
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("time must be positive and finite, got {t}"));
    }
    Ok(())
}

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        return domain(format!("dimension must lie in 1..={MAX_DIM}, got {d}"));
    }
    Ok(())
}

pub(crate) fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `ln G(t, x)` without argument checks.
#[inline]
pub fn ln_g(t: f64, x: &[f64]) -> f64 {
    -0.5 * x.len() as f64 * (2.0 * PI * t).ln() - norm_sq(x) / (2.0 * t)
}

/// `ln G(t, r)` for a point at distance `r` from the origin in dimension `d`.
#[inline]
pub fn ln_g_radial(t: f64, r_sq: f64, d: usize) -> f64 {
    -0.5 * d as f64 * (2.0 * PI * t).ln() - r_sq / (2.0 * t)
}

/// `G(t, x) = (2πt)^{-d/2} exp(-|x|²/2t)`.
pub fn eval_g(p: &HeatPoint) -> f64 {
    ln_g(p.t, &p.x).exp()
}

/// Checked convenience form of [`eval_g`].
pub fn g(t: f64, x: &[f64]) -> Result<f64> {
    check_time(t)?;
    check_dim(x.len())?;
    Ok(ln_g(t, x).exp())
}

/// Spatial Fourier transform `exp(-t|ξ|²/2)` of `G(t, ·)`.
pub fn fourier_g(t: f64, xi: &[f64]) -> Result<f64> {
    check_time(t)?;
    Ok((-0.5 * t * norm_sq(xi)).exp())
}

/// Relative residual of `G(t,x)G(s,y) = G(ts/(t+s), (sx+ty)/(t+s)) G(t+s, x-y)`.
pub fn gg_identity_residual(t: f64, s: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    check_time(t)?;
    check_time(s)?;
    check_dim(x.len())?;
    if x.len() != y.len() {
        return domain("points must share a dimension");
    }
    let lhs = ln_g(t, x) + ln_g(s, y);
    let ts = t + s;
    let centre: Vec<f64> = x.iter().zip(y).map(|(a, b)| (s * a + t * b) / ts).collect();
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let rhs = ln_g(t * s / ts, &centre) + ln_g(ts, &diff);
    Ok((rhs - lhs).exp_m1().abs())
}

fn difference_terms(t: f64, x: &[f64], y: &[f64], theta: f64) -> Result<(f64, f64)> {
    check_time(t)?;
    check_dim(x.len())?;
    if x.len() != y.len() {
        return domain("points must share a dimension");
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return domain(format!("theta must lie in (0, 1], got {theta}"));
    }
    let lhs = (ln_g(t, x).exp() - ln_g(t, y).exp()).abs();
    let dist: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let rhs = t.powf(-0.5 * theta) * (ln_g(2.0 * t, x).exp() + ln_g(2.0 * t, y).exp()) * dist.powf(theta);
    Ok((lhs, rhs))
}

/// Whether `|G(t,x) - G(t,y)| ≤ t^{-θ/2} [G(2t,x) + G(2t,y)] |x-y|^θ`.
///
/// The inequality in this form (constant one) does not hold everywhere; see
/// [`kernel_difference_ratio`] for the constant that is actually needed.
pub fn kernel_difference_bound_check(t: f64, x: &[f64], y: &[f64], theta: f64) -> Result<bool> {
    let (lhs, rhs) = difference_terms(t, x, y, theta)?;
    Ok(lhs <= rhs)
}

/// Ratio of `|G(t,x) - G(t,y)|` to `t^{-θ/2} [G(2t,x) + G(2t,y)] |x-y|^θ`
/// (zero when `x = y`). Empirically bounded by `2^{d/2}`.
pub fn kernel_difference_ratio(t: f64, x: &[f64], y: &[f64], theta: f64) -> Result<f64> {
    let (lhs, rhs) = difference_terms(t, x, y, theta)?;
    if lhs == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs / rhs)
}

/// Upper cap on any domination radius the search will return.
pub const DOMINATION_RADIUS_CAP: f64 = 1e6;

/// Worst value of the two one-coordinate sufficient conditions at `|y| = big`.
///
/// Both conditions have the form `-(x'-y)²/τ + (x-y)²/σ ≤ R` with
/// `τ = t'-s ∈ (0, t+1/2]` and `σ = t+1-s ∈ [τ+1/2, t+1]`; the return value is
/// the maximum over a dense `(τ, σ)` grid of `LHS - R` (positive means violated).
fn subgoal_excess(t: f64, xj: f64, d: usize, big: f64) -> f64 {
    let dd = d as f64;
    let mut worst = f64::NEG_INFINITY;
    let n_tau = 160;
    let n_sigma = 80;
    let tau_max = t + 0.5;
    for sign in [1.0f64, -1.0] {
        let y = sign * big;
        let xp = xj + sign;
        for i in 0..=n_tau {
            let tau = tau_max * (1e-9f64).powf(i as f64 / n_tau as f64);
            let s_lo = tau + 0.5;
            let s_hi = t + 1.0;
            if s_lo > s_hi {
                continue;
            }
            for k in 0..=n_sigma {
                let sigma = s_lo + (s_hi - s_lo) * k as f64 / n_sigma as f64;
                // Past the vertex the quadratic is decreasing in |y|, so the
                // point itself is the supremum over the ray beyond it.
                let vertex = (xp * sigma - xj * tau) / (sigma - tau);
                let y_eff = if sign > 0.0 { y.max(vertex) } else { y.min(vertex) };
                let lhs = -(xp - y_eff).powi(2) / tau + (xj - y_eff).powi(2) / sigma;
                let r1 = 2.0 * dd * (tau / sigma).ln();
                let r2 = -4.0 * (dd - 1.0);
                worst = worst.max(lhs - r1).max(lhs - r2);
            }
        }
    }
    worst
}

/// One-coordinate radius `a₁` for coordinate value `xj` in dimension `d`.
pub fn domination_radius_1d(t: f64, xj: f64, d: usize) -> Result<f64> {
    check_time(t)?;
    check_dim(d)?;
    let ok = |a: f64| subgoal_excess(t, xj, d, a) <= 0.0;
    let mut hi = xj.abs() + 1.0;
    while !ok(hi) {
        hi *= 2.0;
        if hi > DOMINATION_RADIUS_CAP {
            return Err(PamError::NonConvergence {
                message: "domination radius search exceeded its cap".into(),
                achieved: hi,
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // Margin against the finite (τ, σ) grid.
    Ok(hi * 1.02 + 1e-9)
}

/// Radius `a` with `G(t'-s, x'-y) ≤ G(t+1-s, x-y)` whenever `0 < t' ≤ t+1/2`,
/// `|x'-x| ≤ 1`, `0 ≤ s ≤ t'` and `|y| ≥ a`.
pub fn domination_radius(t: f64, x: &[f64]) -> Result<f64> {
    check_time(t)?;
    let d = x.len();
    check_dim(d)?;
    let mut a1 = 0.0f64;
    for &xj in x {
        a1 = a1.max(domination_radius_1d(t, xj, d)?);
    }
    let a = a1 * (d as f64).sqrt();
    if a > DOMINATION_RADIUS_CAP {
        return Err(PamError::NonConvergence {
            message: "domination radius exceeds its cap".into(),
            achieved: a,
        });
    }
    Ok(a)
}

/// Count violations of the domination inequality over random draws of
/// `(t', x', s, y)` with `|y| ≥ a`; a tenth of the draws sit on `|y| = a`.
pub fn domination_violations(t: f64, x: &[f64], a: f64, draws: usize, seed: u64) -> usize {
    let d = x.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    let mut dir = vec![0.0; d];
    let mut xp = vec![0.0; d];
    let mut dy = vec![0.0; d];
    let mut dyp = vec![0.0; d];
    for i in 0..draws {
        let tp = (t + 0.5) * (1.0 - rng.random::<f64>());
        let s = tp * rng.random::<f64>();
        random_direction(&mut rng, &mut dir);
        let rad = rng.random::<f64>().powf(1.0 / d as f64);
        for j in 0..d {
            xp[j] = x[j] + rad * dir[j];
        }
        random_direction(&mut rng, &mut dir);
        let ry = if i % 10 == 0 {
            a
        } else {
            let e: f64 = Exp1.sample(&mut rng);
            a * (1.0 + 0.5 * e)
        };
        for j in 0..d {
            let y = ry * dir[j];
            dyp[j] = xp[j] - y;
            dy[j] = x[j] - y;
        }
        let lhs = ln_g(tp - s, &dyp);
        let rhs = ln_g(t + 1.0 - s, &dy);
        if lhs > rhs + 1e-12 * rhs.abs().max(1.0) {
            violations += 1;
        }
    }
    violations
}

fn random_direction<R: Rng>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut n2 = 0.0;
        for v in out.iter_mut() {
            *v = StandardNormal.sample(rng);
            n2 += *v * *v;
        }
        if n2 > 1e-24 {
            let n = n2.sqrt();
            for v in out.iter_mut() {
                *v /= n;
            }
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_values() {
        let g1 = eval_g(&HeatPoint::new(1.0, vec![0.0]).unwrap());
        assert!((g1 - (2.0 * PI).powf(-0.5)).abs() < 1e-16);
        let g2 = eval_g(&HeatPoint::new(1.0, vec![0.0, 0.0]).unwrap());
        assert!((g2 - 1.0 / (2.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn rejects_bad_time() {
        assert!(HeatPoint::new(0.0, vec![0.0]).is_err());
        assert!(fourier_g(-1.0, &[0.0]).is_err());
        assert!(gg_identity_residual(1.0, 0.0, &[0.0], &[0.0]).is_err());
    }

    #[test]
    fn gg_exact_at_origin() {
        assert!(gg_identity_residual(1.0, 1.0, &[0.0], &[0.0]).unwrap() < 1e-15);
    }

    #[test]
    fn difference_bound_zero_increment() {
        assert!(kernel_difference_bound_check(0.7, &[0.3], &[0.3], 0.5).unwrap());
    }

    #[test]
    fn difference_bound_fails_with_unit_constant() {
        // Far-apart points with a tiny exponent: the left side is G(1,0) while
        // the right side is roughly G(2,0).
        assert!(!kernel_difference_bound_check(1.0, &[0.0], &[10.0], 0.01).unwrap());
        let r = kernel_difference_ratio(1.0, &[0.0], &[10.0], 0.01).unwrap();
        assert!(r > 1.0 && r < 2f64.sqrt());
    }
}
