//! Wiener-chaos kernels `f_n`, their Fourier transforms, the exact first-chaos
//! second moment `α₁`, and the simplex integrals `I_t^{(n)}` and `J_t^{(n)}`.

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, Gamma as GammaDist, StandardNormal};

use crate::error::{domain, PamError, Result};
use crate::heat_kernel::{check_time, ln_g};
use crate::model::Model;
use crate::noise_model::SpectralMeasure;
use crate::quadrature::{integrate_power_ends, QuadOptions};
use crate::sampling::{chunked_mean, McEstimate};
use crate::special_functions::log_gamma;

/// Ordered times `0 < t₁ < … < t_n < t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSimplexPoint {
    times: Vec<f64>,
    horizon: f64,
}

impl TimeSimplexPoint {
    pub fn new(times: Vec<f64>, horizon: f64) -> Result<Self> {
        check_time(horizon)?;
        if times.is_empty() {
            return domain("a simplex point needs at least one time");
        }
        let mut prev = 0.0;
        for &s in &times {
            if !(s > prev) {
                return domain("simplex times must be strictly increasing and positive");
            }
            prev = s;
        }
        if !(prev < horizon) {
            return domain("simplex times must lie below the horizon");
        }
        Ok(Self { times, horizon })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn order(&self) -> usize {
        self.times.len()
    }

    /// `t_{k}` with the convention `t_{n+1} = t` (one-based `k`).
    fn at(&self, k: usize) -> f64 {
        if k == self.times.len() + 1 {
            self.horizon
        } else {
            self.times[k - 1]
        }
    }
}

/// Model, chaos order and target point for kernel evaluations.
#[derive(Debug, Clone, Copy)]
pub struct ChaosContext<'a> {
    pub model: &'a Model,
    pub order: usize,
    pub t: f64,
    pub x: &'a [f64],
}

impl<'a> ChaosContext<'a> {
    pub fn new(model: &'a Model, order: usize, t: f64, x: &'a [f64]) -> Result<Self> {
        if order == 0 {
            return domain("chaos order must be at least 1");
        }
        check_time(t)?;
        if x.len() != model.d {
            return domain("target point has the wrong dimension");
        }
        Ok(Self { model, order, t, x })
    }

    fn check_simplex(&self, s: &TimeSimplexPoint) -> Result<()> {
        if s.order() != self.order || s.horizon() != self.t {
            return domain("simplex point does not match the chaos order and horizon");
        }
        Ok(())
    }
}

/// `f_n` for a single atom at `x0`, through the rewritten product form.
pub fn fn_kernel_alt(ctx: &ChaosContext, s: &TimeSimplexPoint, xs: &[Vec<f64>], x0: &[f64]) -> Result<f64> {
    ctx.check_simplex(s)?;
    let n = ctx.order;
    let d = ctx.model.d;
    if xs.len() != n || xs.iter().any(|p| p.len() != d) || x0.len() != d {
        return domain("spatial arguments do not match the order and dimension");
    }
    let diff: Vec<f64> = ctx.x.iter().zip(x0).map(|(a, b)| a - b).collect();
    let mut ln_total = ln_g(ctx.t, &diff);
    let mut arg = vec![0.0; d];
    for j in 1..=n {
        let tj = s.at(j);
        let tn = s.at(j + 1);
        let rho = tj / tn;
        let next = if j == n { ctx.x } else { &xs[j][..] };
        for (i, a) in arg.iter_mut().enumerate() {
            *a = (1.0 - rho) * x0[i] + rho * next[i] - xs[j - 1][i];
        }
        ln_total += ln_g((1.0 - rho) * tj, &arg);
    }
    Ok(ctx.model.lambda.powi(n as i32) * ln_total.exp())
}

/// `f_n` for a single atom at `x0`, as the direct chain of heat kernels.
pub fn fn_kernel_product(ctx: &ChaosContext, s: &TimeSimplexPoint, xs: &[Vec<f64>], x0: &[f64]) -> Result<f64> {
    ctx.check_simplex(s)?;
    let n = ctx.order;
    let d = ctx.model.d;
    if xs.len() != n || xs.iter().any(|p| p.len() != d) || x0.len() != d {
        return domain("spatial arguments do not match the order and dimension");
    }
    let mut arg = vec![0.0; d];
    for (i, a) in arg.iter_mut().enumerate() {
        *a = xs[0][i] - x0[i];
    }
    let mut ln_total = ln_g(s.at(1), &arg);
    for j in 1..=n {
        let next = if j == n { ctx.x } else { &xs[j][..] };
        for (i, a) in arg.iter_mut().enumerate() {
            *a = next[i] - xs[j - 1][i];
        }
        ln_total += ln_g(s.at(j + 1) - s.at(j), &arg);
    }
    Ok(ctx.model.lambda.powi(n as i32) * ln_total.exp())
}

/// `f_n(t₁, x₁, …, t_n, x_n; t, x)` for atom-only initial data.
pub fn eval_fn_kernel(ctx: &ChaosContext, s: &TimeSimplexPoint, xs: &[Vec<f64>]) -> Result<f64> {
    if !ctx.model.initial.is_atomic() {
        return Err(PamError::Unsupported(
            "the spatial kernel form needs atom-only initial data".into(),
        ));
    }
    let mut total = 0.0;
    for atom in ctx.model.initial.atoms() {
        total += atom.weight * fn_kernel_alt(ctx, s, xs, &atom.location)?;
    }
    Ok(total)
}

/// Fourier transform of `f_n` in the spatial variables.
pub fn fourier_fn(ctx: &ChaosContext, s: &TimeSimplexPoint, xis: &[Vec<f64>]) -> Result<Complex<f64>> {
    ctx.check_simplex(s)?;
    let n = ctx.order;
    let d = ctx.model.d;
    if xis.len() != n || xis.iter().any(|p| p.len() != d) {
        return domain("frequency arguments do not match the order and dimension");
    }
    let t = ctx.t;
    let mut partial = vec![0.0; d];
    let mut exponent = 0.0;
    let mut zeta = vec![0.0; d];
    for k in 1..=n {
        let tk = s.at(k);
        for i in 0..d {
            partial[i] += tk * xis[k - 1][i];
            zeta[i] += (1.0 - tk / t) * xis[k - 1][i];
        }
        let tn = s.at(k + 1);
        let sq: f64 = partial.iter().map(|v| v * v).sum();
        exponent -= 0.5 * (tn - tk) / (tk * tn) * sq;
    }
    let phase: f64 = -partial.iter().zip(ctx.x).map(|(p, x)| p * x).sum::<f64>() / t;
    let weighted = ctx.model.initial.fourier_weighted(t, ctx.x, &zeta)?;
    Ok(Complex::from_polar(ctx.model.lambda.powi(n as i32) * exponent.exp(), phase) * weighted)
}

/// Order in which the two-dimensional `α₁` integral is nested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NestingOrder {
    /// Outer lag `u = t₁ - s₁`, inner base time `s₁`.
    LagOuter,
    /// Outer base time `s₁`, inner lag `u`.
    LagInner,
}

/// Result of a deterministic quadrature with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

/// `E|J₁(t,x)|² = α₁(t,x)` for a single atom at `x` and a power-law spectral family.
pub fn alpha_1_exact(ctx: &ChaosContext) -> Result<QuadResult> {
    alpha_1_with_order(ctx, NestingOrder::LagOuter, 1e-11)
}

/// [`alpha_1_exact`] with an explicit nesting order and relative tolerance.
pub fn alpha_1_with_order(ctx: &ChaosContext, order: NestingOrder, rel_tol: f64) -> Result<QuadResult> {
    if ctx.order != 1 {
        return domain("alpha_1 is defined at chaos order 1");
    }
    let model = ctx.model;
    let atoms = model.initial.atoms();
    if !model.initial.is_atomic() || atoms.len() != 1 || atoms[0].location != ctx.x {
        return Err(PamError::Unsupported(
            "alpha_1 needs a single atom located at the target point".into(),
        ));
    }
    let alpha = model.spectral.power_alpha().ok_or_else(|| {
        PamError::Unsupported("alpha_1 needs a power-law spectral family (riesz or white_space)".into())
    })?;
    model.spectral.check_dalang()?;
    if model.lambda == 0.0 {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }
    let c = model.spectral.k_power_constant().expect("power family");
    let a = 0.5 * alpha;
    let t = ctx.t;
    let k = |s: f64| c * s.powf(-a);
    // φ(s) = s(t-s)/t from the distances of s to 0 and to t.
    let phi = |from_zero: f64, from_t: f64| from_zero * from_t / t;
    let gam = model.temporal;
    let pg = gam.singularity_exponent();
    let inner_opts = QuadOptions::rel((rel_tol * 0.1).max(1e-12));
    let outer_opts = QuadOptions {
        max_intervals: 20_000,
        ..QuadOptions::rel(rel_tol)
    };
    let failure = std::cell::Cell::new(None::<PamError>);
    let record = |e: PamError| {
        let first = failure.take().unwrap_or(e);
        failure.set(Some(first));
    };
    let outer = match order {
        NestingOrder::LagOuter => integrate_power_ends(
            |_u, du, dur| {
                let inner = integrate_power_ends(
                    |_s, ds, dsr| k(phi(ds, t - ds) + phi(ds + du, dsr)),
                    0.0,
                    dur,
                    -a,
                    -a,
                    inner_opts,
                );
                match inner {
                    Ok(e) => gam.gamma_eval(du) * e.value,
                    Err(e) => {
                        record(e);
                        0.0
                    }
                }
            },
            0.0,
            t,
            pg,
            1.0 - a,
            outer_opts,
        ),
        NestingOrder::LagInner => integrate_power_ends(
            |_s, ds, dsr| {
                let inner = integrate_power_ends(
                    |_u, du, dur| gam.gamma_eval(du) * k(phi(ds, dsr) + phi(ds + du, dur)),
                    0.0,
                    dsr,
                    pg - a,
                    -a,
                    inner_opts,
                );
                match inner {
                    Ok(e) => e.value,
                    Err(e) => {
                        record(e);
                        0.0
                    }
                }
            },
            0.0,
            t,
            pg - a,
            pg + 1.0 - a,
            outer_opts,
        ),
    }?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let weight = atoms[0].weight;
    let pref = 2.0 * model.lambda * model.lambda * weight * weight * (2.0 * ln_g(t, &vec![0.0; model.d])).exp();
    Ok(QuadResult {
        value: pref * outer.value,
        error: pref * outer.error,
    })
}

/// `J_t^{(n)} = Π_k k(2(t_{k+1} - t_k) t_k / t_{k+1})`.
pub fn j_product_bound(sm: &SpectralMeasure, s: &TimeSimplexPoint) -> Result<f64> {
    let mut prod = 1.0;
    for k in 1..=s.order() {
        let tk = s.at(k);
        let tn = s.at(k + 1);
        prod *= sm.k(2.0 * (tn - tk) * tk / tn)?;
    }
    Ok(prod)
}

/// Smallest effective sample fraction accepted by [`i_n_estimate`].
pub const MIN_ESS_FRACTION: f64 = 0.01;

/// Importance-sampled estimate of
/// `I_t^{(n)} = (2π)^{-nd} ∫ exp(-Σ_k a_k |Σ_{j≤k} t_j ξ_j|²) μ(dξ₁)…μ(dξ_n)`
/// with `a_k = (t_{k+1} - t_k)/(t_k t_{k+1})`, for power-law spectral families.
///
/// The exponent is the quadratic form `ξᵀQξ` with
/// `Q_{jl} = t_j t_l Σ_{k ≥ max(j,l)} a_k`. Each `ξ_j` is drawn from the density
/// proportional to `|ξ|^{α-d} exp(-b_j|ξ|²)` with `b_j = λ Q_jj`, where `λ` is
/// the smallest eigenvalue of the diagonally normalised `Q`; the weight
/// `exp(-ξᵀ(Q - diag b)ξ)` then never exceeds one.
pub fn i_n_estimate(ctx: &ChaosContext, s: &TimeSimplexPoint, samples: usize, seed: u64) -> Result<McEstimate> {
    ctx.check_simplex(s)?;
    let sm = &ctx.model.spectral;
    i_n_estimate_for(sm, s, samples, seed)
}

/// [`i_n_estimate`] for a bare spectral measure.
pub fn i_n_estimate_for(sm: &SpectralMeasure, s: &TimeSimplexPoint, samples: usize, seed: u64) -> Result<McEstimate> {
    let alpha = sm
        .power_alpha()
        .ok_or_else(|| PamError::Unsupported("importance sampling needs a power-law spectral family".into()))?;
    let n = s.order();
    let d = sm.d();
    if n > 4 || d > 2 {
        return Err(PamError::Unsupported(
            "importance sampling is provided for n <= 4 and d <= 2".into(),
        ));
    }
    let a: Vec<f64> = (1..=n).map(|k| (s.at(k + 1) - s.at(k)) / (s.at(k) * s.at(k + 1))).collect();
    let mut q = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        for l in 0..n {
            let tail: f64 = a[j.max(l)..].iter().sum();
            q[(j, l)] = s.times()[j] * s.times()[l] * tail;
        }
    }
    let scale: Vec<f64> = (0..n).map(|j| q[(j, j)].sqrt()).collect();
    let normalized = DMatrix::from_fn(n, n, |j, l| q[(j, l)] / (scale[j] * scale[l]));
    let lam_min = SymmetricEigen::new(normalized).eigenvalues.min() * (1.0 - 1e-12);
    if !(lam_min > 0.0) {
        return Err(PamError::NonConvergence {
            message: "quadratic form is numerically singular".into(),
            achieved: lam_min,
        });
    }
    let b: Vec<f64> = (0..n).map(|j| lam_min * q[(j, j)]).collect();
    let mut resid = q.clone();
    for j in 0..n {
        resid[(j, j)] -= b[j];
    }
    // ∫ |ξ|^{α-d} e^{-b|ξ|²} dξ = π^{d/2} Γ(α/2)/Γ(d/2) b^{-α/2}
    let ln_z0 = 0.5 * d as f64 * std::f64::consts::PI.ln() + log_gamma(0.5 * alpha)? - log_gamma(0.5 * d as f64)?;
    let mut ln_norm = -((n * d) as f64) * (2.0 * std::f64::consts::PI).ln();
    for &bj in &b {
        ln_norm += ln_z0 - 0.5 * alpha * bj.ln();
    }
    let norm = ln_norm.exp();
    let radial = GammaDist::new(0.5 * alpha, 1.0).map_err(|e| PamError::Domain(e.to_string()))?;
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> f64 {
        let mut xi = [[0.0f64; 2]; 4];
        for j in 0..n {
            let r = (radial.sample(rng) / b[j]).sqrt();
            if d == 1 {
                xi[j][0] = if rng.random::<bool>() { r } else { -r };
            } else {
                let th = 2.0 * std::f64::consts::PI * rng.random::<f64>();
                xi[j][0] = r * th.cos();
                xi[j][1] = r * th.sin();
            }
        }
        let mut form = 0.0;
        for j in 0..n {
            for l in 0..n {
                let dot: f64 = (0..d).map(|i| xi[j][i] * xi[l][i]).sum();
                form += resid[(j, l)] * dot;
            }
        }
        (-form.max(0.0)).exp()
    };
    let w = chunked_mean(samples, seed, draw);
    // For weights in [0, 1] the effective sample size is at least n·mean²/E[w²].
    let second = w.std_error * w.std_error * samples as f64 + w.mean * w.mean;
    let ess = if second > 0.0 { samples as f64 * w.mean * w.mean / second } else { 0.0 };
    if ess < MIN_ESS_FRACTION * samples as f64 {
        return Err(PamError::NonConvergence {
            message: "importance sampling effective sample size below threshold".into(),
            achieved: ess / samples as f64,
        });
    }
    Ok(McEstimate {
        mean: norm * w.mean,
        std_error: norm * w.std_error,
        samples: w.samples,
    })
}

/// `∫_{0<t₁<…<t_n<t} Π_{j=1}^{n+1} (t_j - t_{j-1})^h dt = Γ(h+1)^{n+1}/Γ((n+1)(h+1)) t^{n(h+1)+h}`.
pub fn simplex_power_integral(n: usize, h: f64, t: f64) -> Result<f64> {
    if !(h > -1.0) {
        return domain(format!("simplex exponent must exceed -1, got {h}"));
    }
    if n == 0 {
        return domain("simplex order must be at least 1");
    }
    check_time(t)?;
    let nf = n as f64;
    let ln = (nf + 1.0) * log_gamma(h + 1.0)? - log_gamma((nf + 1.0) * (h + 1.0))? + (nf * (h + 1.0) + h) * t.ln();
    Ok(ln.exp())
}

fn uniform_simplex<R: Rng>(rng: &mut R, n: usize, t: f64, out: &mut [f64]) {
    for v in out.iter_mut().take(n) {
        *v = t * rng.random::<f64>();
    }
    out[..n].sort_by(|a, b| a.total_cmp(b));
}

/// Monte-Carlo estimate of `∫_simplex g(t₁, …, t_n)` using uniform simplex draws.
pub fn simplex_mc<G>(n: usize, t: f64, samples: usize, seed: u64, g: G) -> McEstimate
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let mut ln_vol = n as f64 * t.ln();
    for i in 1..=n {
        ln_vol -= (i as f64).ln();
    }
    let vol = ln_vol.exp();
    let est = chunked_mean(samples, seed, |rng| {
        let mut buf = [0.0f64; 8];
        uniform_simplex(rng, n, t, &mut buf);
        g(&buf[..n])
    });
    McEstimate {
        mean: vol * est.mean,
        std_error: vol * est.std_error,
        samples: est.samples,
    }
}

/// Monte-Carlo estimate of the simplex power integral.
pub fn simplex_power_mc(n: usize, h: f64, t: f64, samples: usize, seed: u64) -> McEstimate {
    simplex_mc(n, t, samples, seed, |ts| {
        let mut prev = 0.0;
        let mut prod = 1.0;
        for &s in ts {
            prod *= (s - prev).powf(h);
            prev = s;
        }
        prod * (t - prev).powf(h)
    })
}

/// Monte-Carlo estimate of `∫_simplex J_t^{(n)}`.
pub fn simplex_j_mc(sm: &SpectralMeasure, n: usize, t: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    let alpha = sm
        .power_alpha()
        .ok_or_else(|| PamError::Unsupported("simplex J integral needs a power-law family".into()))?;
    let c = sm.k_power_constant().expect("power family");
    let a = 0.5 * alpha;
    Ok(simplex_mc(n, t, samples, seed, |ts| {
        let mut prod = 1.0;
        for k in 0..n {
            let tk = ts[k];
            let tn = if k + 1 == n { t } else { ts[k + 1] };
            prod *= c * (2.0 * (tn - tk) * tk / tn).powf(-a);
        }
        prod
    }))
}

/// Standard normal draw, re-exported for samplers built on the same streams.
pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}
