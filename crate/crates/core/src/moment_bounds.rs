//! The `h_n` recursion `h_n(t) = ∫₀ᵗ h_{n-1}(s) k(t-s) ds` and the moment
//! bounds built from it: the series `H` and `H̃`, the general `p`-th moment
//! bound, Lyapunov exponents, the critical coupling, Mittag-Leffler bounds for
//! Riesz kernels, and Hölder exponents.
//!
//! The convolution runs on a geometric time grid. On every grid cell away from
//! the evaluation time `h_{n-1}` is replaced by its local cubic interpolant and
//! integrated against `k` with an 8-point Gauss-Legendre rule. On the cell
//! touching the evaluation time, where `k` may blow up, the cubic is expanded
//! in monomials and integrated exactly against `k` (power-law families) or by
//! singularity-adapted quadrature (other families).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, PamError, Result};
use crate::model::Model;
use crate::noise_model::{SpectralMeasure, TemporalCovariance};
use crate::quadrature::{integrate_power_ends, Estimate, QuadOptions, GL8_W, GL8_X};
use crate::special_functions::{gamma, log_gamma, mittag_leffler, MittagLefflerParams};

/// Default number of grid points used by [`build_hn`].
pub const DEFAULT_GRID_SIZE: usize = 2400;
/// Default truncation order of the `H` series.
pub const DEFAULT_TRUNCATION: usize = 64;
/// Ratio between the first positive grid point and the horizon.
const FIRST_POINT: f64 = 1e-7;

/// Closed-form data `k(t) = c t^{-a}` for power-law spectral families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLaw {
    pub c: f64,
    pub a: f64,
}

impl PowerLaw {
    /// `κ = c Γ(1-a)`, so that `h_n(t) = κⁿ t^{n(1-a)}/Γ(n(1-a)+1)`.
    pub fn kappa(&self) -> f64 {
        self.c * gamma(1.0 - self.a).expect("a < 1")
    }

    /// `ln h_n(t)`.
    pub fn ln_h(&self, n: usize, t: f64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let nf = n as f64;
        let b = 1.0 - self.a;
        nf * self.kappa().ln() + nf * b * t.ln() - log_gamma(nf * b + 1.0).expect("positive")
    }
}

/// Values of `h_0, …, h_N` on a time grid, with the closed form when known.
#[derive(Debug, Clone)]
pub struct HnTable {
    grid: Vec<f64>,
    values: Vec<Vec<f64>>,
    order: usize,
    horizon: f64,
    closed_form: Option<PowerLaw>,
}

/// `k` evaluated through a log-log cubic table, for families without a closed form.
struct KTable {
    ln_s: Vec<f64>,
    ln_k: Vec<f64>,
    small_exponent: f64,
}

impl KTable {
    fn new(sm: &SpectralMeasure, lo: f64, hi: f64) -> Result<Self> {
        let per_decade = 60.0;
        let n = ((hi / lo).log10() * per_decade).ceil() as usize + 1;
        let step = (hi / lo).ln() / (n - 1) as f64;
        let ln_s: Vec<f64> = (0..n).map(|i| lo.ln() + step * i as f64).collect();
        let ln_k = ln_s
            .par_iter()
            .map(|&l| sm.k(l.exp()).map(f64::ln))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self {
            ln_s,
            ln_k,
            small_exponent: sm.k_small_time_exponent(),
        })
    }

    fn eval(&self, s: f64) -> f64 {
        let l = s.ln();
        let n = self.ln_s.len();
        if l <= self.ln_s[0] {
            return (self.ln_k[0] - self.small_exponent * (l - self.ln_s[0])).exp();
        }
        let step = self.ln_s[1] - self.ln_s[0];
        let pos = ((l - self.ln_s[0]) / step).floor() as usize;
        let start = pos.saturating_sub(1).min(n - 4);
        lagrange4(&self.ln_s[start..start + 4], &self.ln_k[start..start + 4], l).exp()
    }
}

/// Cubic Lagrange interpolation through four points.
fn lagrange4(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..4 {
        let mut w = ys[i];
        for j in 0..4 {
            if i != j {
                w *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        total += w;
    }
    total
}

fn lagrange4_basis(xs: &[f64], x: f64) -> [f64; 4] {
    let mut out = [1.0; 4];
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..4 {
            if i != j {
                *o *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
    }
    out
}

/// Monomial coefficients of the Lagrange basis polynomials through `us`.
fn lagrange4_monomials(us: &[f64; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        let mut poly = [1.0, 0.0, 0.0, 0.0];
        let mut deg = 0;
        let mut denom = 1.0;
        for j in 0..4 {
            if i == j {
                continue;
            }
            // poly *= (u - us[j])
            let mut next = [0.0; 4];
            for p in 0..=deg {
                next[p + 1] += poly[p];
                next[p] -= us[j] * poly[p];
            }
            poly = next;
            deg += 1;
            denom *= us[i] - us[j];
        }
        for p in 0..4 {
            out[i][p] = poly[p] / denom;
        }
    }
    out
}

/// Index of the first of four consecutive interpolation nodes around cell `[t_j, t_{j+1}]`.
fn stencil_start(j: usize, len: usize) -> usize {
    j.saturating_sub(1).min(len - 4)
}

/// Tabulate `h_0, …, h_N` on `[0, T]` with `grid_size` points.
pub fn build_hn(sm: &SpectralMeasure, horizon: f64, order: usize, grid_size: usize) -> Result<HnTable> {
    sm.check_dalang()?;
    if !(horizon > 0.0) || !horizon.is_finite() {
        return domain(format!("table horizon must be positive, got {horizon}"));
    }
    if order == 0 {
        return domain("table order must be at least 1");
    }
    if grid_size < 16 {
        return domain("grid size must be at least 16");
    }
    let closed_form = power_law(sm);
    let t1 = horizon * FIRST_POINT;
    let ratio = (1.0 / FIRST_POINT).powf(1.0 / (grid_size - 2) as f64);
    let mut grid = Vec::with_capacity(grid_size);
    grid.push(0.0);
    for i in 0..grid_size - 1 {
        grid.push(if i == grid_size - 2 { horizon } else { t1 * ratio.powi(i as i32) });
    }
    let ktab = match closed_form {
        Some(_) => None,
        None => Some(KTable::new(sm, t1 * 1e-3, 2.0 * horizon)?),
    };
    let kfun = |s: f64| match (closed_form, &ktab) {
        (Some(pl), _) => pl.c * s.powf(-pl.a),
        (None, Some(tab)) => tab.eval(s),
        _ => unreachable!(),
    };
    let kexp = match closed_form {
        Some(pl) => pl.a,
        None => sm.k_small_time_exponent(),
    };
    let len = grid.len();
    let weights: Vec<Vec<f64>> = (0..len)
        .into_par_iter()
        .map(|i| convolution_row(&grid, i, &kfun, kexp, closed_form))
        .collect::<Result<Vec<_>>>()?;
    let mut values = vec![vec![1.0; len]];
    for n in 1..=order {
        let prev = &values[n - 1];
        let row: Vec<f64> = weights
            .par_iter()
            .map(|w| w.iter().zip(prev).map(|(a, b)| a * b).sum::<f64>().max(0.0))
            .collect();
        values.push(row);
    }
    Ok(HnTable {
        grid,
        values,
        order,
        horizon,
        closed_form,
    })
}

fn power_law(sm: &SpectralMeasure) -> Option<PowerLaw> {
    let alpha = sm.power_alpha()?;
    Some(PowerLaw {
        c: sm.k_power_constant()?,
        a: 0.5 * alpha,
    })
}

/// Weights `w_m` with `∫₀^{t_i} h(s) k(t_i - s) ds ≈ Σ_m w_m h(t_m)`.
fn convolution_row<K: Fn(f64) -> f64>(
    grid: &[f64],
    i: usize,
    k: &K,
    kexp: f64,
    closed_form: Option<PowerLaw>,
) -> Result<Vec<f64>> {
    let len = grid.len();
    let mut w = vec![0.0; len];
    if i == 0 {
        return Ok(w);
    }
    let ti = grid[i];
    for j in 0..i - 1 {
        let (a, b) = (grid[j], grid[j + 1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let st = stencil_start(j, len);
        let nodes = &grid[st..st + 4];
        for q in 0..4 {
            for sign in [-1.0, 1.0] {
                let s = mid + sign * half * GL8_X[q];
                let kv = k(ti - s) * half * GL8_W[q];
                let basis = lagrange4_basis(nodes, s);
                for m in 0..4 {
                    w[st + m] += kv * basis[m];
                }
            }
        }
    }
    // Last cell [t_{i-1}, t_i], with s = t_i - δu.
    let delta = ti - grid[i - 1];
    let st = stencil_start(i - 1, len);
    let mut us = [0.0; 4];
    for m in 0..4 {
        us[m] = (ti - grid[st + m]) / delta;
    }
    let mono = lagrange4_monomials(&us);
    let mut moments = [0.0; 4];
    for (p, mp) in moments.iter_mut().enumerate() {
        *mp = match closed_form {
            Some(pl) => pl.c * delta.powf(1.0 - pl.a) / (p as f64 + 1.0 - pl.a),
            None => {
                integrate_power_ends(
                    |_u, du, _| if du > 0.0 { du.powi(p as i32) * k(delta * du) * delta } else { 0.0 },
                    0.0,
                    1.0,
                    -kexp,
                    0.0,
                    QuadOptions::rel(1e-12),
                )?
                .value
            }
        };
    }
    for m in 0..4 {
        w[st + m] += (0..4).map(|p| mono[m][p] * moments[p]).sum::<f64>();
    }
    Ok(w)
}

impl HnTable {
    /// Table with only the closed form, for power-law families; no grid is stored.
    pub fn closed_form_only(sm: &SpectralMeasure, horizon: f64, order: usize) -> Result<Self> {
        sm.check_dalang()?;
        let closed_form = power_law(sm).ok_or_else(|| {
            PamError::Unsupported("a closed-form table needs a power-law spectral family".into())
        })?;
        if !(horizon > 0.0) || order == 0 {
            return domain("closed-form table needs a positive horizon and order");
        }
        Ok(Self {
            grid: Vec::new(),
            values: Vec::new(),
            order,
            horizon,
            closed_form: Some(closed_form),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Tabulated values of `h_n` on the grid (empty for closed-form-only tables).
    pub fn values(&self, n: usize) -> &[f64] {
        self.values.get(n).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn closed_form(&self) -> Option<PowerLaw> {
        self.closed_form
    }

    fn check(&self, n: usize, t: f64) -> Result<()> {
        if n > self.order {
            return domain(format!("order {n} exceeds the table order {}", self.order));
        }
        if !(t >= 0.0) || t > self.horizon * (1.0 + 1e-12) {
            return domain(format!("time {t} lies outside [0, {}]", self.horizon));
        }
        Ok(())
    }

    /// `h_n(t)` from the numerical convolution.
    pub fn h_numeric(&self, n: usize, t: f64) -> Result<f64> {
        self.check(n, t)?;
        if self.values.is_empty() {
            return Err(PamError::Unsupported("this table stores no numerical values".into()));
        }
        if n == 0 {
            return Ok(1.0);
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        let len = self.grid.len();
        let j = self.grid.partition_point(|&g| g <= t).clamp(1, len - 1) - 1;
        let st = stencil_start(j, len);
        let v = lagrange4(&self.grid[st..st + 4], &self.values[n][st..st + 4], t);
        Ok(v.max(0.0))
    }

    /// `h_n(t)`, from the closed form when available.
    pub fn h(&self, n: usize, t: f64) -> Result<f64> {
        self.check(n, t)?;
        match self.closed_form {
            Some(pl) => Ok(if t == 0.0 && n > 0 { 0.0 } else { pl.ln_h(n, t).exp() }),
            None => self.h_numeric(n, t),
        }
    }

    fn ln_h(&self, n: usize, t: f64) -> Result<f64> {
        match self.closed_form {
            Some(pl) if t > 0.0 => {
                self.check(n, t)?;
                Ok(pl.ln_h(n, t))
            }
            _ => Ok(self.h(n, t)?.ln()),
        }
    }

    /// `∫₀^T e^{-βt} h_n(t) dt` from the numerical table.
    pub fn laplace(&self, n: usize, beta: f64) -> Result<f64> {
        if !(beta > 0.0) {
            return domain("laplace transform needs beta > 0");
        }
        if self.values.is_empty() {
            return Err(PamError::Unsupported("this table stores no numerical values".into()));
        }
        if n > self.order {
            return domain(format!("order {n} exceeds the table order {}", self.order));
        }
        let len = self.grid.len();
        let mut total = 0.0;
        for j in 0..len - 1 {
            let (a, b) = (self.grid[j], self.grid[j + 1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            let st = stencil_start(j, len);
            for q in 0..4 {
                for sign in [-1.0, 1.0] {
                    let s = mid + sign * half * GL8_X[q];
                    let h = lagrange4(&self.grid[st..st + 4], &self.values[n][st..st + 4], s);
                    total += half * GL8_W[q] * (-beta * s).exp() * h;
                }
            }
        }
        Ok(total)
    }
}

/// Partial sum of a moment series with its truncation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub terms_used: usize,
    pub truncation_bound: f64,
}

fn sum_series(tbl: &HnTable, t: f64, gamma_value: f64, sqrt_terms: bool, rel_tol: f64) -> Result<SeriesValue> {
    if !(gamma_value >= 0.0) || !gamma_value.is_finite() {
        return domain(format!("series parameter must be finite and nonnegative, got {gamma_value}"));
    }
    tbl.check(0, t)?;
    if gamma_value == 0.0 || t == 0.0 {
        return Ok(SeriesValue {
            value: 1.0,
            terms_used: 1,
            truncation_bound: 0.0,
        });
    }
    let lg = gamma_value.ln();
    let n_max = tbl.order;
    let mut ln_terms = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut l = n as f64 * lg + tbl.ln_h(n, t)?;
        if sqrt_terms {
            l *= 0.5;
        }
        ln_terms.push(l);
    }
    let top = ln_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &l in ln_terms.iter().rev() {
        let y = (l - top).exp() - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    let value = top.exp() * sum;
    let last = ln_terms[n_max];
    let tail = if n_max == 0 || last == f64::NEG_INFINITY {
        0.0
    } else {
        let ln_r = last - ln_terms[n_max - 1];
        if ln_r >= 0.0 {
            f64::INFINITY
        } else {
            let r = ln_r.exp();
            last.exp() * r / (1.0 - r)
        }
    };
    if !(tail <= rel_tol * value) {
        return Err(PamError::NonConvergence {
            message: format!(
                "series tail bound {tail:e} exceeds tolerance at order {n_max}; increase the truncation order N"
            ),
            achieved: tail / value,
        });
    }
    Ok(SeriesValue {
        value,
        terms_used: n_max + 1,
        truncation_bound: tail,
    })
}

/// `H(t; γ) = Σ γⁿ h_n(t)`, truncated at the table order with a geometric tail bound
/// that must stay below `rel_tol` times the sum.
#[allow(non_snake_case)]
pub fn H_series(tbl: &HnTable, t: f64, gamma_value: f64, rel_tol: f64) -> Result<SeriesValue> {
    sum_series(tbl, t, gamma_value, false, rel_tol)
}

/// `H̃(t; γ) = Σ (γⁿ h_n(t))^{1/2}`.
#[allow(non_snake_case)]
pub fn H_tilde_series(tbl: &HnTable, t: f64, gamma_value: f64, rel_tol: f64) -> Result<SeriesValue> {
    sum_series(tbl, t, gamma_value, true, rel_tol)
}

/// One `(t, x)` row of a moment report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEntry {
    pub t: f64,
    pub x: Vec<f64>,
    pub j_plus: f64,
    pub h_tilde_value: f64,
    /// Upper bound on `‖u(t,x)‖_p`.
    pub p_moment_bound: f64,
    pub terms_used: usize,
    pub truncation_bound: f64,
}

/// Moment bounds on a set of points, with the coupling and moment order used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub lambda: f64,
    pub p: f64,
    pub entries: Vec<MomentEntry>,
}

/// `‖u(t,x)‖_p ≤ J₊(t,x) H̃(t; 2λ²(p-1)Γ_t)`.
pub fn moment_bound_series(model: &Model, tbl: &HnTable, t: f64, x: &[f64], rel_tol: f64) -> Result<MomentEntry> {
    model.spectral.check_dalang()?;
    let j_plus = model.initial.eval_jplus(t, x)?;
    let arg = 2.0 * model.lambda * model.lambda * (model.p - 1.0) * model.temporal.big_gamma(t)?;
    let s = H_tilde_series(tbl, t, arg, rel_tol)?;
    Ok(MomentEntry {
        t,
        x: x.to_vec(),
        j_plus,
        h_tilde_value: s.value,
        p_moment_bound: j_plus * s.value,
        terms_used: s.terms_used,
        truncation_bound: s.truncation_bound,
    })
}

/// `∫₀ᵗ k(2(t-s)s/t) h_n(s) ds`, which never exceeds `2 h_{n+1}(t)`.
pub fn weighted_hn_integral(sm: &SpectralMeasure, tbl: &HnTable, n: usize, t: f64) -> Result<Estimate> {
    let kexp = sm.k_small_time_exponent();
    let failure = std::cell::Cell::new(None::<PamError>);
    let e = integrate_power_ends(
        |s, ds, dr| {
            let arg = 2.0 * ds * dr / t;
            match (sm.k(arg), tbl.h(n, s.min(tbl.horizon))) {
                (Ok(kv), Ok(hv)) => kv * hv,
                (Err(e), _) | (_, Err(e)) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        },
        0.0,
        t,
        -kexp,
        -kexp,
        QuadOptions::rel(1e-10),
    )?;
    match failure.take() {
        Some(e) => Err(e),
        None => Ok(e),
    }
}

/// `θ(γ) = inf{β > 0 : Υ(2β) < 1/(2γ)}`.
pub fn lyapunov_theta(sm: &SpectralMeasure, gamma_value: f64) -> Result<f64> {
    if !(gamma_value > 0.0) || !gamma_value.is_finite() {
        return domain(format!("lyapunov_theta needs a positive finite gamma, got {gamma_value}"));
    }
    sm.check_dalang()?;
    let target = 1.0 / (2.0 * gamma_value);
    if sm.upsilon(0.0)? <= target {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while sm.upsilon(2.0 * hi)? >= target {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(PamError::NonConvergence {
                message: "could not bracket the Lyapunov root".into(),
                achieved: hi,
            });
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sm.upsilon(2.0 * mid)? < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Large-time growth information for a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovReport {
    pub gamma_infinity: f64,
    /// `inf{β : Υ(2β) < [4λ²(p-1)Γ_∞]^{-1}}`, an upper bound on the `p`-th moment
    /// Lyapunov exponent divided by `p`; `None` when `Γ_∞ = ∞`.
    pub theta: Option<f64>,
    /// Below this coupling the moments stay bounded in time; `+∞` when no finite
    /// threshold is available.
    pub lambda_critical: f64,
}

/// Lyapunov bound and critical coupling for a model.
pub fn lyapunov_report(model: &Model) -> Result<LyapunovReport> {
    model.spectral.check_dalang()?;
    let gi = model.temporal.gamma_infinity();
    let theta = if gi.is_finite() {
        let g = 2.0 * model.lambda * model.lambda * (model.p - 1.0) * gi;
        if g == 0.0 {
            Some(0.0)
        } else {
            Some(lyapunov_theta(&model.spectral, g)?)
        }
    } else {
        None
    };
    Ok(LyapunovReport {
        gamma_infinity: gi,
        theta,
        lambda_critical: lambda_critical(&model.spectral, &model.temporal, model.p)?,
    })
}

/// `λ_c = [4(p-1)Γ_∞Υ(0)]^{-1/2}`, or `+∞` when `Γ_∞` or `Υ(0)` is infinite.
pub fn lambda_critical(sm: &SpectralMeasure, tc: &TemporalCovariance, p: f64) -> Result<f64> {
    if !(p >= 2.0) {
        return domain(format!("moment order p must be at least 2, got {p}"));
    }
    let gi = tc.gamma_infinity();
    if !gi.is_finite() || !sm.upsilon_zero_finite() {
        return Ok(f64::INFINITY);
    }
    let u0 = sm.upsilon(0.0)?;
    Ok((1.0 / (4.0 * (p - 1.0) * gi * u0)).sqrt())
}

/// Moment bounds for Riesz kernels in Mittag-Leffler form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszBound {
    pub p: f64,
    /// Bound on `E|u(t,x)|^p` from the exact Mittag-Leffler series.
    pub exact_ml_bound: f64,
    /// `J₊^p exp(C'' p^{(4-α)/(2-α)} |λ|^{4/(2-α)} Γ_t^{2/(2-α)} t)`.
    pub exponential_envelope: f64,
    /// `sup` over the scaling variable of the ratio of the two bounds.
    pub c_prime: f64,
    pub c_double_prime: f64,
    /// `C_{α,d} = (2π)^{-d} ∫ e^{-|ξ|²} |ξ|^{α-d} dξ`.
    pub c_alpha_d: f64,
    /// `sup_n Γ((n+1)b/2)/Γ((n+1)b)^{1/2}` with `b = 1 - α/2`, used for `p > 2`.
    pub k_alpha: f64,
}

/// Factor applied to the leading exponential rate to build the envelope constant.
pub const ENVELOPE_MARGIN: f64 = 1.05;

/// `sup_n Γ((n+1)b/2)/Γ((n+1)b)^{1/2}`.
pub fn k_alpha(alpha: f64) -> Result<f64> {
    let b = 1.0 - 0.5 * alpha;
    let mut best = f64::NEG_INFINITY;
    for n in 0..2000 {
        let m = (n + 1) as f64 * b;
        best = best.max(log_gamma(0.5 * m)? - 0.5 * log_gamma(m)?);
    }
    Ok(best.exp())
}

struct RieszConstants {
    alpha: f64,
    b: f64,
    c: f64,
    gb: f64,
    c2: f64,
    k_alpha: f64,
}

impl RieszConstants {
    fn new(alpha: f64, sm: &SpectralMeasure) -> Result<Self> {
        let c = sm.k(2.0)?;
        let b = 1.0 - 0.5 * alpha;
        let gb = gamma(b)?;
        Ok(Self {
            alpha,
            b,
            c,
            gb,
            c2: ENVELOPE_MARGIN * (c * gb).powf(1.0 / b),
            k_alpha: k_alpha(alpha)?,
        })
    }

    fn p_exponent(&self) -> f64 {
        (4.0 - self.alpha) / (2.0 - self.alpha)
    }

    /// `ln` of the exact bound divided by `J₊^p`, as a function of the scaling
    /// variable `x = |λ|^{4/(2-α)} Γ_t^{2/(2-α)} t`.
    fn ln_exact(&self, p: f64, x: f64) -> Result<f64> {
        if p == 2.0 {
            let z = self.c * self.gb * x.powf(self.b);
            let ml = MittagLefflerParams::new(self.b, self.b)?;
            Ok(self.gb.ln() + crate::special_functions::ln_mittag_leffler(ml, z)?)
        } else {
            let z = (p * self.c * self.gb).sqrt() * x.powf(0.5 * self.b);
            let ml = MittagLefflerParams::new(0.5 * self.b, 0.5 * self.b)?;
            let ln_norm = self.k_alpha.ln() + 0.5 * self.gb.ln() + crate::special_functions::ln_mittag_leffler(ml, z)?;
            Ok(p * ln_norm)
        }
    }

    fn ln_envelope(&self, p: f64, x: f64) -> f64 {
        self.c2 * p.powf(self.p_exponent()) * x
    }

    fn c_prime(&self, p: f64) -> Result<f64> {
        let mut best = f64::NEG_INFINITY;
        let n = 4000;
        for i in 0..=n {
            let x = 10f64.powf(-8.0 + 12.0 * i as f64 / n as f64);
            best = best.max(self.ln_exact(p, x)? - self.ln_envelope(p, x));
        }
        Ok(best.max(self.ln_exact(p, 0.0)?).exp())
    }
}

/// Mittag-Leffler moment bounds for a model with a Riesz spectral measure
/// (white noise in `d = 1` is the Riesz case `α = 1`).
pub fn riesz_moment_bound(model: &Model, t: f64, x: &[f64]) -> Result<RieszBound> {
    let alpha = model.spectral.power_alpha().ok_or_else(|| {
        PamError::Unsupported("Mittag-Leffler bounds need a riesz or white_space spectral measure".into())
    })?;
    model.spectral.check_dalang()?;
    let consts = RieszConstants::new(alpha, &model.spectral)?;
    let p = model.p;
    let j_plus = model.initial.eval_jplus(t, x)?;
    let gt = model.temporal.big_gamma(t)?;
    let scale = model.lambda.abs().powf(2.0 / consts.b) * gt.powf(1.0 / consts.b) * t;
    let ln_jp = p * j_plus.ln();
    Ok(RieszBound {
        p,
        exact_ml_bound: (ln_jp + consts.ln_exact(p, scale)?).exp(),
        exponential_envelope: (ln_jp + consts.ln_envelope(p, scale)).exp(),
        c_prime: consts.c_prime(p)?,
        c_double_prime: consts.c2,
        c_alpha_d: consts.c,
        k_alpha: consts.k_alpha,
    })
}

/// Hölder exponents of the solution paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderReport {
    /// `β* = inf{β : ∫ (1+|ξ|²)^{-β} μ(dξ) < ∞}`.
    pub sup_beta_complement: f64,
    /// Every time exponent below `(1-β*)/2` is attained.
    pub time_exponent_sup: f64,
    /// Every space exponent below `1-β*` is attained.
    pub space_exponent_sup: f64,
}

/// Bisection for the admissibility threshold `β*` of the Hölder condition.
pub fn holder_exponents(sm: &SpectralMeasure) -> Result<HolderReport> {
    sm.check_dalang()?;
    let decide = |beta: f64| -> Result<Option<bool>> {
        if sm.power_alpha().is_some() {
            return sm.holder_beta_admissible(beta).map(Some);
        }
        match sm.holder_sides(beta)? {
            (Some(a), Some(b)) if a == b => Ok(Some(a)),
            _ => Ok(None),
        }
    };
    let (mut lo, mut hi) = (0.0f64, 1.0 - 1e-9);
    match decide(hi)? {
        Some(true) => {}
        _ => {
            return Err(PamError::Model(
                "the Hölder condition fails for every beta < 1; no Hölder statement is available".into(),
            ))
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo < 1e-14 {
            break;
        }
        match decide(mid)? {
            Some(true) => hi = mid,
            Some(false) => lo = mid,
            None => {
                hi = mid;
                lo = mid;
                break;
            }
        }
    }
    let beta = if sm.power_alpha().is_some() { hi } else { 0.5 * (lo + hi) };
    Ok(HolderReport {
        sup_beta_complement: beta,
        time_exponent_sup: 0.5 * (1.0 - beta),
        space_exponent_sup: 1.0 - beta,
    })
}

/// `H(t;γ)` for power-law families as a Mittag-Leffler value,
/// `E_{1-a,1}(γ c Γ(1-a) t^{1-a})`.
pub fn h_series_mittag_leffler(pl: PowerLaw, t: f64, gamma_value: f64) -> Result<f64> {
    let b = 1.0 - pl.a;
    mittag_leffler(MittagLefflerParams::new(b, 1.0)?, gamma_value * pl.kappa() * t.powf(b))
}

/// Closed-form data for power-law spectral families.
pub fn power_law_data(sm: &SpectralMeasure) -> Option<PowerLaw> {
    power_law(sm)
}
