//! Monte-Carlo oracle for the first chaos: sample the noise on a space-time
//! grid and estimate `E|J₁(t,x)|²`, which [`crate::chaos_engine::alpha_1_exact`]
//! computes deterministically.
//!
//! The grid covers `[τ₁, t] × [x - L, x + L]` in `d = 1` with `τ₁ = t/M`. The cell
//! integrals of the noise have covariance `C_t ⊗ C_s`, where both factors are
//! exact double integrals of `γ` and of the spatial correlation over cell pairs.
//! Each factor is Cholesky-decomposed once; replica `r` draws its standard
//! normals from ChaCha stream `r` of the seed.

use nalgebra::{Cholesky, DMatrix};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::chaos_engine::{alpha_1_exact, ChaosContext};
use crate::error::{domain, PamError, Result};
use crate::heat_kernel::ln_g;
use crate::model::Model;
use crate::noise_model::{SpectralFamily, SpectralMeasure, TemporalCovariance};
use crate::quadrature::{integrate_power_ends, QuadOptions};
use crate::sampling::{mean_of, stream_rng};

/// Largest diagonal jitter, relative to the mean diagonal entry, tried before
/// a factorization is declared failed.
pub const MAX_JITTER: f64 = 1e-10;

/// Space-time grid with factorized cell covariances.
#[derive(Debug, Clone)]
pub struct NoiseGrid {
    times: Vec<f64>,
    space: Vec<f64>,
    time_factor: DMatrix<f64>,
    space_factor: DMatrix<f64>,
    seed: u64,
    exact_cells: bool,
}

/// Spatial double antiderivative `Ψ` with `Ψ'' = f`, for `d = 1` families with a closed form.
fn spatial_antiderivative(sm: &SpectralMeasure) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    if sm.d() != 1 {
        return Err(PamError::Unsupported("the noise sampler is implemented for d = 1".into()));
    }
    match sm.family() {
        SpectralFamily::Riesz { alpha } => {
            let alpha = *alpha;
            let c = sm.riesz_correlation_constant().expect("riesz family");
            let denom = (1.0 - alpha) * (2.0 - alpha);
            Ok(Box::new(move |u: f64| c * u.abs().powf(2.0 - alpha) / denom))
        }
        SpectralFamily::WhiteSpace => Ok(Box::new(|u: f64| 0.5 * u.abs())),
        SpectralFamily::RadialDensity { .. } => Err(PamError::Unsupported(
            "the noise sampler needs a riesz or white_space spatial correlation".into(),
        )),
    }
}

/// `∫_a^b ∫_c^e g(u - v) dv du` from `Φ'' = g`.
fn cell_pair<F: Fn(f64) -> f64>(phi: &F, a: f64, b: f64, c: f64, e: f64) -> f64 {
    phi(b - c) - phi(a - c) - phi(b - e) + phi(a - e)
}

fn cell_covariance<F: Fn(f64) -> f64>(phi: &F, edges: &[f64]) -> DMatrix<f64> {
    let n = edges.len() - 1;
    DMatrix::from_fn(n, n, |i, j| cell_pair(phi, edges[i], edges[i + 1], edges[j], edges[j + 1]))
}

/// Lower Cholesky factor, adding diagonal jitter up to [`MAX_JITTER`] if needed.
pub fn cholesky_with_jitter(c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if let Some(ch) = Cholesky::new(c.clone()) {
        return Ok(ch.l());
    }
    let n = c.nrows().max(1);
    let scale = c.trace() / n as f64;
    let mut eps = 1e-16;
    while eps <= MAX_JITTER {
        let mut m = c.clone();
        for i in 0..c.nrows() {
            m[(i, i)] += eps * scale;
        }
        if let Some(ch) = Cholesky::new(m) {
            return Ok(ch.l());
        }
        eps *= 10.0;
    }
    Err(PamError::NonConvergence {
        message: "cell covariance is not positive definite even after maximal jitter; the grid is too fine".into(),
        achieved: eps,
    })
}

impl NoiseGrid {
    /// Grid with `m` time points `τ_i = i t/m`, `i = 1..m`, and `2m` space cells on
    /// `[x - half_width, x + half_width]`.
    pub fn new(
        sm: &SpectralMeasure,
        tc: &TemporalCovariance,
        t: f64,
        x: f64,
        m: usize,
        half_width: f64,
        seed: u64,
    ) -> Result<Self> {
        Self::with_space_cells(sm, tc, t, x, m, 2 * m, half_width, seed)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn with_space_cells(
        sm: &SpectralMeasure,
        tc: &TemporalCovariance,
        t: f64,
        x: f64,
        m: usize,
        space_cells: usize,
        half_width: f64,
        seed: u64,
    ) -> Result<Self> {
        if m < 2 || space_cells < 1 {
            return domain("the noise grid needs at least two time points and one space cell");
        }
        if !(t > 0.0) || !(half_width > 0.0) {
            return domain("the noise grid needs t > 0 and a positive half width");
        }
        tc.validate()?;
        let psi = spatial_antiderivative(sm)?;
        let times: Vec<f64> = (1..=m).map(|i| t * i as f64 / m as f64).collect();
        let h = 2.0 * half_width / space_cells as f64;
        let space: Vec<f64> = (0..=space_cells).map(|j| x - half_width + h * j as f64).collect();
        let ct = cell_covariance(&|u| tc.double_antiderivative(u), &times);
        let cs = cell_covariance(&psi, &space);
        Ok(Self {
            time_factor: cholesky_with_jitter(&ct)?,
            space_factor: cholesky_with_jitter(&cs)?,
            times,
            space,
            seed,
            exact_cells: true,
        })
    }

    /// Time points `τ₁ < … < τ_M = t`; the cells are `[τ_i, τ_{i+1}]`.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Space cell edges.
    pub fn space(&self) -> &[f64] {
        &self.space
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Whether the cell covariances are exact double integrals.
    pub fn exact_cells(&self) -> bool {
        self.exact_cells
    }

    pub fn time_cells(&self) -> usize {
        self.times.len() - 1
    }

    pub fn space_cells(&self) -> usize {
        self.space.len() - 1
    }

    /// Covariance of cells `(i, j)` and `(i2, j2)` (time index first).
    pub fn covariance(&self, i: usize, j: usize, i2: usize, j2: usize) -> f64 {
        let ct = self.time_factor.row(i).dot(&self.time_factor.row(i2));
        let cs = self.space_factor.row(j).dot(&self.space_factor.row(j2));
        ct * cs
    }

    fn normals(&self, replica: u64) -> DMatrix<f64> {
        let mut rng = stream_rng(self.seed, replica);
        let (nt, ns) = (self.time_cells(), self.space_cells());
        let mut z = DMatrix::<f64>::zeros(nt, ns);
        for i in 0..nt {
            for j in 0..ns {
                z[(i, j)] = StandardNormal.sample(&mut rng);
            }
        }
        z
    }
}

/// Cell integrals of the noise for `replicas` replicas, as time-major vectors.
pub fn sample_noise(grid: &NoiseGrid, replicas: usize) -> Vec<Vec<f64>> {
    (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let z = grid.normals(r);
            let w = &grid.time_factor * z * grid.space_factor.transpose();
            let (nt, ns) = (grid.time_cells(), grid.space_cells());
            let mut out = Vec::with_capacity(nt * ns);
            for i in 0..nt {
                for j in 0..ns {
                    out.push(w[(i, j)]);
                }
            }
            out
        })
        .collect()
}

/// Estimated `E|J₁(t,x)|²` on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct J1Estimate {
    /// Mean of `J₁²` over the replicas.
    pub mean: f64,
    pub std_error: f64,
    pub replicas: usize,
    /// Exact variance of the discretized `J₁`.
    pub discrete_variance: f64,
    pub time_points: usize,
}

/// Midpoint weights `λ G(t - s, x - y) J₀(s, y)` on the grid cells.
fn j1_weights(model: &Model, grid: &NoiseGrid, t: f64, x: f64) -> Result<DMatrix<f64>> {
    let (nt, ns) = (grid.time_cells(), grid.space_cells());
    let mut a = DMatrix::<f64>::zeros(nt, ns);
    for i in 0..nt {
        let s = 0.5 * (grid.times[i] + grid.times[i + 1]);
        for j in 0..ns {
            let y = 0.5 * (grid.space[j] + grid.space[j + 1]);
            a[(i, j)] = model.lambda * ln_g(t - s, &[x - y]).exp() * model.initial.eval_j0(s, &[y])?;
        }
    }
    Ok(a)
}

/// Sample `J₁(t,x) ≈ λ Σ_cells G(t - s_i, x - y_j) J₀(s_i, y_j) W(cell)` and
/// average its square.
pub fn estimate_j1_variance(model: &Model, grid: &NoiseGrid, t: f64, x: f64, replicas: usize) -> Result<J1Estimate> {
    if model.d != 1 {
        return Err(PamError::Unsupported("the noise sampler is implemented for d = 1".into()));
    }
    if replicas < 2 {
        return domain("at least two replicas are needed for a standard error");
    }
    let top = *grid.times.last().expect("nonempty grid");
    if (top - t).abs() > 1e-12 * t {
        return domain("the grid must end at the evaluation time");
    }
    let a = j1_weights(model, grid, t, x)?;
    // ⟨A, L_t Z L_sᵀ⟩ = ⟨L_tᵀ A L_s, Z⟩
    let b = grid.time_factor.transpose() * a * &grid.space_factor;
    let discrete_variance = b.norm_squared();
    let squares: Vec<f64> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let z = grid.normals(r);
            let v = b.dot(&z);
            v * v
        })
        .collect();
    let est = mean_of(&squares);
    Ok(J1Estimate {
        mean: est.mean,
        std_error: est.std_error,
        replicas,
        discrete_variance,
        time_points: grid.times.len(),
    })
}

/// `E|∫_{[0,τ₁)×R} G(t-s, x-y) G(s, y-x) W(ds dy)|²` for a single atom at `x`,
/// the second moment of the part of `J₁` left out of the grid.
pub fn omitted_second_moment(model: &Model, t: f64, tau1: f64) -> Result<f64> {
    let alpha = model.spectral.power_alpha().ok_or_else(|| {
        PamError::Unsupported("omitted-mass computation needs a power-law spectral family".into())
    })?;
    let atoms = model.initial.atoms();
    if !model.initial.is_atomic() || atoms.len() != 1 {
        return Err(PamError::Unsupported("omitted-mass computation needs a single atom".into()));
    }
    let c = model.spectral.k_power_constant().expect("power family");
    let a = 0.5 * alpha;
    let gam = model.temporal;
    let pg = gam.singularity_exponent();
    let phi = |s: f64| s * (t - s) / t;
    let opts = QuadOptions::rel(1e-9);
    let failure = std::cell::Cell::new(None::<PamError>);
    let outer = integrate_power_ends(
        |s, _, _| {
            let inner = integrate_power_ends(
                |_u, du, dr| gam.gamma_eval(du) * c * (phi(s) + phi(dr)).powf(-a),
                0.0,
                s,
                pg,
                -a,
                opts,
            );
            match inner {
                Ok(e) => e.value,
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        },
        0.0,
        tau1,
        pg - a,
        0.0,
        opts,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let w = atoms[0].weight;
    let g0 = (2.0 * ln_g(t, &[0.0])).exp();
    Ok(2.0 * model.lambda * model.lambda * w * w * g0 * outer.value)
}

/// One row of the grid-refinement study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefinementRow {
    pub time_points: usize,
    pub discrete_variance: f64,
    pub estimate: f64,
    pub std_error: f64,
}

/// Monte-Carlo check of `E|J₁|²` against the deterministic value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub exact: f64,
    pub estimate: f64,
    pub std_error: f64,
    /// `2 |v_M - v_{M/2}|` from the exact variances of the discretized `J₁`.
    pub discretization_allowance: f64,
    /// Bound on the change of `E|J₁|²` caused by leaving out `[0, τ₁)`.
    pub omitted_bound: f64,
    pub refinement: Vec<RefinementRow>,
    /// Whether the discrete variances approach the exact value monotonically.
    pub monotone: bool,
    pub within_tolerance: bool,
}

/// Compare the sampled `E|J₁(t,x)|²` at the finest grid in `ms` with
/// [`alpha_1_exact`], recording a refinement table for every `M` in `ms`.
pub fn mc_consistency(model: &Model, t: f64, x: f64, ms: &[usize], replicas: usize, seed: u64) -> Result<McReport> {
    if ms.is_empty() {
        return domain("the refinement study needs at least one grid size");
    }
    let xs = [x];
    let ctx = ChaosContext::new(model, 1, t, &xs)?;
    let exact = alpha_1_exact(&ctx)?.value;
    let half_width = 4.0 * t.sqrt();
    let mut rows = Vec::new();
    for &m in ms {
        let grid = NoiseGrid::new(&model.spectral, &model.temporal, t, x, m, half_width, seed)?;
        let e = estimate_j1_variance(model, &grid, t, x, replicas)?;
        rows.push(RefinementRow {
            time_points: m,
            discrete_variance: e.discrete_variance,
            estimate: e.mean,
            std_error: e.std_error,
        });
    }
    let finest = *rows.last().expect("nonempty");
    let m = finest.time_points;
    let coarse = NoiseGrid::new(&model.spectral, &model.temporal, t, x, (m / 2).max(2), half_width, seed)?;
    let coarse_var = estimate_j1_variance(model, &coarse, t, x, 2)?.discrete_variance;
    let allowance = 2.0 * (finest.discrete_variance - coarse_var).abs();
    let monotone = rows
        .windows(2)
        .all(|w| (w[1].discrete_variance - exact).abs() < (w[0].discrete_variance - exact).abs());
    let omitted = omitted_second_moment(model, t, t / m as f64)?;
    let omitted_bound = omitted + 2.0 * (omitted * exact).sqrt();
    let within = (finest.estimate - exact).abs() <= 3.0 * finest.std_error + allowance;
    Ok(McReport {
        exact,
        estimate: finest.estimate,
        std_error: finest.std_error,
        discretization_allowance: allowance,
        omitted_bound,
        refinement: rows,
        monotone,
        within_tolerance: within,
    })
}
