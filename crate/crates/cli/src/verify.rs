//! Self-check suites run by `pam verify`.
//!
//! Every check compares one number with a fixed threshold. Checks that fail to
//! evaluate are reported as failures with the error text.

use pam_core::chaos_engine::{
    alpha_1_with_order, i_n_estimate, j_product_bound, simplex_j_mc, simplex_power_integral, simplex_power_mc,
    ChaosContext, NestingOrder, TimeSimplexPoint,
};
use pam_core::heat_kernel::{domination_radius, domination_violations, gg_identity_residual, kernel_difference_ratio};
use pam_core::mc_verify::{estimate_j1_variance, mc_consistency, sample_noise, NoiseGrid};
use pam_core::model::Model;
use pam_core::moment_bounds::{
    build_hn, h_series_mittag_leffler, holder_exponents, lyapunov_theta, moment_bound_series, power_law_data,
    riesz_moment_bound, weighted_hn_integral, HnTable, H_series, H_tilde_series,
};
use pam_core::noise_model::{RadialDensity, SpectralMeasure, TemporalCovariance};
use pam_core::quadrature::{integrate_power_ends, QuadOptions};
use pam_core::sampling::stream_rng;
use pam_core::special_functions::{mittag_leffler, regime_overlap_discrepancy, MittagLefflerParams};
use pam_core::Result;
use rand::Rng;

use crate::output::{Cell, Table};

/// Which group of checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Identities,
    Inequalities,
    Mc,
    All,
}

/// Direction of the comparison between value and threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub passed: bool,
    pub detail: String,
}

struct Recorder {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Recorder {
    fn new(suite: &'static str) -> Self {
        Self {
            suite,
            checks: Vec::new(),
        }
    }

    fn at_most(&mut self, name: impl Into<String>, value: Result<f64>, threshold: f64) {
        self.record(name.into(), value, threshold, Relation::AtMost);
    }

    fn at_least(&mut self, name: impl Into<String>, value: Result<f64>, threshold: f64) {
        self.record(name.into(), value, threshold, Relation::AtLeast);
    }

    fn record(&mut self, name: String, value: Result<f64>, threshold: f64, relation: Relation) {
        let (value, passed, detail) = match value {
            Ok(v) => {
                let ok = match relation {
                    Relation::AtMost => v <= threshold,
                    Relation::AtLeast => v >= threshold,
                };
                (v, ok, String::new())
            }
            Err(e) => (f64::NAN, false, e.to_string()),
        };
        self.checks.push(Check {
            suite: self.suite,
            name,
            value,
            threshold,
            relation,
            passed,
            detail,
        });
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Run a suite with a base seed.
pub fn run(suite: Suite, seed: u64) -> Vec<Check> {
    match suite {
        Suite::Identities => identities(seed),
        Suite::Inequalities => inequalities(seed),
        Suite::Mc => mc(seed),
        Suite::All => {
            let mut all = identities(seed);
            all.extend(inequalities(seed));
            all.extend(mc(seed));
            all
        }
    }
}

/// Per-check table.
pub fn table(checks: &[Check]) -> Table {
    let mut t = Table::new(vec!["suite", "check", "value", "relation", "threshold", "status", "detail"]);
    for c in checks {
        t.push(vec![
            Cell::Text(c.suite.into()),
            Cell::Text(c.name.clone()),
            Cell::Float(c.value),
            Cell::Text(
                match c.relation {
                    Relation::AtMost => "<=",
                    Relation::AtLeast => ">=",
                }
                .into(),
            ),
            Cell::Float(c.threshold),
            Cell::Text(if c.passed { "PASS" } else { "FAIL" }.into()),
            Cell::Text(c.detail.clone()),
        ]);
    }
    t
}

fn riesz_half() -> SpectralMeasure {
    SpectralMeasure::riesz(0.5, 1).expect("valid")
}

fn gg_max_residual(d: usize, seed: u64) -> Result<f64> {
    let mut rng = stream_rng(seed, 100 + d as u64);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let t = 10f64.powf(rng.random_range(-2.0..1.0));
        let s = 10f64.powf(rng.random_range(-2.0..1.0));
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        let y: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        worst = worst.max(gg_identity_residual(t, s, &x, &y)?);
    }
    Ok(worst)
}

/// Identity checks: exact formulas evaluated two independent ways.
pub fn identities(seed: u64) -> Vec<Check> {
    let mut r = Recorder::new("identities");
    for d in 1..=3 {
        r.at_most(format!("heat kernel product identity d={d}"), gg_max_residual(d, seed), 1e-12);
    }
    for h in [-0.4, 0.0, 0.5] {
        let quad = integrate_power_ends(
            |_, dl, dr| dl.powf(h) * dr.powf(h),
            0.0,
            1.0,
            h,
            h,
            QuadOptions::rel(1e-12),
        )
        .and_then(|q| Ok(rel_err(q.value, simplex_power_integral(1, h, 1.0)?)));
        r.at_most(format!("simplex power integral n=1 h={h} quadrature"), quad, 1e-6);
        for n in [2usize, 3] {
            let mc = simplex_power_mc(n, h, 1.0, 1_000_000, seed.wrapping_add(n as u64));
            let dev = simplex_power_integral(n, h, 1.0).map(|c| (mc.mean - c).abs() / (mc.std_error + 1e-12 * c));
            r.at_most(format!("simplex power integral n={n} h={h} monte carlo (in SE)"), dev, 3.0);
        }
    }
    let sm = riesz_half();
    let hn = build_hn(&sm, 5.0, 10, 2400).and_then(|tbl| {
        let mut worst = 0.0f64;
        for n in 0..=10 {
            for i in 0..50 {
                let t = 0.1 + 4.9 * i as f64 / 49.0;
                worst = worst.max(rel_err(tbl.h_numeric(n, t)?, tbl.h(n, t)?));
            }
        }
        Ok(worst)
    });
    r.at_most("h_n numerical convolution vs closed form", hn, 1e-6);
    let laplace = build_hn(&sm, 80.0, 5, 2400).and_then(|tbl| {
        let mut worst = 0.0f64;
        for beta in [0.5, 1.0, 2.0] {
            for n in 1..=5 {
                let exact = (2.0 * sm.upsilon(2.0 * beta)?).powi(n as i32) / beta;
                worst = worst.max(rel_err(tbl.laplace(n, beta)?, exact));
            }
        }
        Ok(worst)
    });
    r.at_most("h_n laplace transform identity", laplace, 1e-4);
    let ml_exp = MittagLefflerParams::new(1.0, 1.0).and_then(|p| {
        let mut worst = 0.0f64;
        for i in 0..=3000 {
            let z = 30.0 * i as f64 / 3000.0;
            worst = worst.max(rel_err(mittag_leffler(p, z)?, z.exp()));
        }
        Ok(worst)
    });
    r.at_most("mittag-leffler E_{1,1} vs exp on [0,30]", ml_exp, 1e-12);
    for (a, b) in [(0.75, 0.75), (0.5, 0.5), (0.375, 0.375)] {
        let v = MittagLefflerParams::new(a, b).and_then(|p| regime_overlap_discrepancy(p, 200));
        r.at_most(format!("mittag-leffler regime overlap ({a},{b})"), v, 1e-8);
    }
    let h_ml = HnTable::closed_form_only(&sm, 5.0, 200).and_then(|tbl| {
        let pl = power_law_data(&sm).expect("power law");
        let mut worst = 0.0f64;
        for t in [0.1, 0.5, 1.0, 2.0, 5.0] {
            for g in [0.1, 1.0, 3.0] {
                let s = H_series(&tbl, t, g, 1e-12)?.value;
                worst = worst.max(rel_err(s, h_series_mittag_leffler(pl, t, g)?));
            }
        }
        Ok(worst)
    });
    r.at_most("H series vs mittag-leffler form", h_ml, 1e-8);
    let model = Model::standard();
    let x0 = [0.0];
    let orders = ChaosContext::new(&model, 1, 1.0, &x0).and_then(|ctx| {
        let a = alpha_1_with_order(&ctx, NestingOrder::LagOuter, 1e-11)?.value;
        let b = alpha_1_with_order(&ctx, NestingOrder::LagInner, 1e-11)?.value;
        Ok(rel_err(a, b))
    });
    r.at_most("alpha_1 nesting orders agree", orders, 1e-10);
    let theta = lyapunov_theta(&sm, 1.0).map(|t| (t - 2f64.sqrt().powf(4.0 / 3.0) / 2.0).abs());
    r.at_most("lyapunov theta bisection vs closed form", theta, 1e-10);
    let upsilon = (|| -> Result<f64> {
        let mut worst = 0.0f64;
        for d in 1..=3 {
            for alpha in [0.5, 0.9] {
                let s = SpectralMeasure::riesz(alpha, d)?;
                for b in [0.3, 1.0, 4.0] {
                    worst = worst.max(rel_err(s.upsilon_quadrature(b)?.value, s.upsilon(b)?));
                    worst = worst.max(rel_err(s.k_quadrature(b)?.value, s.k(b)?));
                }
            }
        }
        Ok(worst)
    })();
    r.at_most("riesz upsilon and k quadrature vs closed form", upsilon, 1e-9);
    r.checks
}

fn gaussian3() -> SpectralMeasure {
    SpectralMeasure::radial(RadialDensity::Gaussian { width: 1.0 }, 3).expect("valid")
}

/// Inequality checks: bounds that must hold with room to spare.
pub fn inequalities(seed: u64) -> Vec<Check> {
    let mut r = Recorder::new("inequalities");
    let model = Model::standard();
    let sm = model.spectral.clone();
    let x0 = [0.0];
    let t = 1.0;
    let chain = (|| -> Result<(f64, f64)> {
        let ctx = ChaosContext::new(&model, 1, t, &x0)?;
        let a1 = alpha_1_with_order(&ctx, NestingOrder::LagOuter, 1e-11)?.value;
        let tbl = HnTable::closed_form_only(&sm, t, 64)?;
        let jp = model.initial.eval_jplus(t, &x0)?;
        let j0 = model.initial.eval_j0(t, &x0)?;
        let gt = model.temporal.big_gamma(t)?;
        let first = a1 / (2.0 * gt * tbl.h(1, t)? * jp * jp);
        let h = H_series(&tbl, t, 2.0 * gt, 1e-12)?.value;
        let second = (j0 * j0 + a1) / (jp * jp * h);
        Ok((1.0 - first, 1.0 - second))
    })();
    r.at_least("first chaos below the chain bound (relative margin)", chain.clone().map(|c| c.0), 0.01);
    r.at_least("second moment below J+^2 H (relative margin)", chain.map(|c| c.1), 0.01);
    let maxp = (|| -> Result<f64> {
        let mut rng = stream_rng(seed, 200);
        let base = sm.shifted_gaussian_integral(0.7, 1.3, &[0.0])?;
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..100 {
            let eta = rng.random_range(-5.0..5.0);
            worst = worst.max(sm.shifted_gaussian_integral(0.7, 1.3, &[eta])? - base);
        }
        Ok(worst)
    })();
    r.at_most("shifted gaussian integral minus unshifted (max over 100 shifts)", maxp, 1e-8);
    for n in 1..=3usize {
        let v = (|| -> Result<(f64, f64)> {
            let times: Vec<f64> = (1..=n).map(|k| k as f64 / (n as f64 + 1.0)).collect();
            let point = TimeSimplexPoint::new(times, 1.0)?;
            let ctx = ChaosContext::new(&model, n, 1.0, &x0)?;
            let i_n = i_n_estimate(&ctx, &point, 200_000, seed + n as u64)?;
            let jn = j_product_bound(&sm, &point)?;
            let tbl = HnTable::closed_form_only(&sm, 1.0, 8)?;
            let sj = simplex_j_mc(&sm, n, 1.0, 1_000_000, seed + 10 + n as u64)?;
            let bound = 2f64.powi(n as i32) * tbl.h(n, 1.0)? * (1.0 + 1e-6);
            Ok((
                (i_n.mean - jn) / (i_n.std_error + 1e-12 * jn),
                (sj.mean - bound) / (sj.std_error + 1e-12 * bound),
            ))
        })();
        r.at_most(format!("I_n below J_n, n={n} (excess in SE)"), v.clone().map(|v| v.0), 3.0);
        r.at_most(format!("simplex integral of J_n below 2^n h_n, n={n} (excess in SE)"), v.map(|v| v.1), 3.0);
    }
    let proxy = (|| -> Result<f64> {
        let theta = lyapunov_theta(&sm, 1.0)?;
        let tbl = HnTable::closed_form_only(&sm, 80.0, 700)?;
        let mut prev = f64::INFINITY;
        let mut worst = f64::NEG_INFINITY;
        for t in [20.0, 40.0, 80.0] {
            let v = H_tilde_series(&tbl, t, 1.0, 1e-12)?.value.ln() / t;
            if v > prev {
                return Ok(f64::INFINITY);
            }
            prev = v;
            worst = worst.max(v - theta);
        }
        Ok(worst)
    })();
    r.at_most("finite-time lyapunov proxy minus theta (nonincreasing)", proxy, 0.05);
    let holder_known = (|| -> Result<f64> {
        let a = holder_exponents(&sm)?;
        let w = holder_exponents(&SpectralMeasure::white_space())?;
        Ok([
            (a.time_exponent_sup - 0.375).abs(),
            (a.space_exponent_sup - 0.75).abs(),
            (w.time_exponent_sup - 0.25).abs(),
            (w.space_exponent_sup - 0.5).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max))
    })();
    r.at_most("holder exponents for riesz 0.5 and white noise", holder_known, 1e-9);
    let holder_sides = (|| -> Result<f64> {
        let fams = [
            (riesz_half(), 0.25),
            (SpectralMeasure::white_space(), 0.5),
            (SpectralMeasure::radial(RadialDensity::Bessel { nu: 0.2 }, 1)?, 0.3),
        ];
        let mut disagreements = 0.0;
        for (s, beta_star) in &fams {
            for i in 0..20 {
                let beta = 0.025 + 0.05 * i as f64;
                match s.holder_sides(beta)? {
                    (Some(a), Some(b)) if a == b && a == (beta > *beta_star) => {}
                    _ => disagreements += 1.0,
                }
            }
        }
        Ok(disagreements)
    })();
    r.at_most("holder condition two-sided agreement (disagreements)", holder_sides, 0.0);
    let hn_ineq = (|| -> Result<f64> {
        let tbl = HnTable::closed_form_only(&sm, 3.0, 8)?;
        let mut worst = f64::NEG_INFINITY;
        for n in 0..=3 {
            for t in [0.5, 1.0, 3.0] {
                let lhs = weighted_hn_integral(&sm, &tbl, n, t)?.value;
                worst = worst.max(lhs / (2.0 * tbl.h(n + 1, t)?));
            }
        }
        Ok(worst)
    })();
    r.at_most("weighted h_n integral over 2 h_{n+1}", hn_ineq, 1.0);
    let g3 = gaussian3();
    let g_bounds = (|| -> Result<(f64, f64)> {
        let tbl = build_hn(&g3, 5.0, 64, 1200)?;
        let u0 = g3.upsilon(0.0)?;
        let mut worst_h = f64::NEG_INFINITY;
        for n in 1..=6 {
            for &t in tbl.grid().iter().skip(1) {
                worst_h = worst_h.max(tbl.h(n, t)? / (2.0 * u0).powi(n as i32));
            }
        }
        let gamma_value = 0.25 / u0;
        let mut worst_series = f64::NEG_INFINITY;
        for t in [0.5, 1.0, 2.0, 5.0] {
            let h = H_series(&tbl, t, gamma_value, 1e-10)?.value;
            let ht = H_tilde_series(&tbl, t, gamma_value, 1e-10)?.value;
            let q = 2.0 * gamma_value * u0;
            worst_series = worst_series.max(h * (1.0 - q)).max(ht * (1.0 - q.sqrt()));
        }
        Ok((worst_h, worst_series))
    })();
    r.at_most("gaussian d=3: h_n over [2 upsilon(0)]^n", g_bounds.clone().map(|v| v.0), 1.0);
    r.at_most("gaussian d=3: H and H~ times their geometric denominators", g_bounds.map(|v| v.1), 1.0);
    let envelope = (|| -> Result<f64> {
        let mut worst = f64::NEG_INFINITY;
        for i in 0..=40 {
            let t = 10f64.powf(-2.0 + 4.0 * i as f64 / 40.0);
            let b = riesz_moment_bound(&model, t, &x0)?;
            worst = worst.max(b.exact_ml_bound / (b.c_prime * b.exponential_envelope));
        }
        Ok(worst)
    })();
    r.at_most("riesz exact bound over C' times envelope, t in [0.01, 100]", envelope, 1.0 + 1e-9);
    let p_mono = (|| -> Result<f64> {
        let tbl = HnTable::closed_form_only(&sm, 1.0, 200)?;
        let mut prev = 0.0;
        let mut worst = f64::NEG_INFINITY;
        for p in [2.0, 3.0, 4.0, 6.0] {
            let m = Model::new(1.0, p, sm.clone(), model.temporal, model.initial.clone())?;
            let v = moment_bound_series(&m, &tbl, 1.0, &x0, 1e-10)?.p_moment_bound;
            worst = worst.max(prev - v);
            prev = v;
        }
        Ok(worst)
    })();
    r.at_most("moment bound decrease when p grows", p_mono, 0.0);
    let domination = (|| -> Result<f64> {
        let mut total = 0.0;
        for d in [1usize, 3] {
            let x = vec![0.0; d];
            let a = domination_radius(1.0, &x)?;
            total += domination_violations(1.0, &x, a, 200_000, seed + 300 + d as u64) as f64;
        }
        Ok(total)
    })();
    r.at_most("heat kernel domination violations", domination, 0.0);
    let kd = (|| -> Result<f64> {
        let mut rng = stream_rng(seed, 400);
        let mut worst = f64::NEG_INFINITY;
        for d in 1..=3usize {
            for _ in 0..2000 {
                let t = 10f64.powf(rng.random_range(-2.0..1.0));
                let x: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
                let y: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
                let th = rng.random_range(0.01..1.0);
                worst = worst.max(kernel_difference_ratio(t, &x, &y, th)? / 2f64.powf(0.5 * d as f64));
            }
        }
        Ok(worst)
    })();
    r.at_most("heat kernel difference ratio over 2^(d/2)", kd, 1.0);
    r.checks
}

/// Monte-Carlo checks of the noise sampler and of the first chaos.
pub fn mc(seed: u64) -> Vec<Check> {
    let mut r = Recorder::new("mc");
    let model = Model::standard();
    let report = mc_consistency(&model, 1.0, 0.0, &[16, 32, 64], 10_000, seed);
    match &report {
        Ok(rep) => {
            r.at_most(
                "sampled E|J1|^2 vs alpha_1 (deviation)",
                Ok((rep.estimate - rep.exact).abs()),
                3.0 * rep.std_error + rep.discretization_allowance,
            );
            r.at_least(
                "grid refinement approaches alpha_1 monotonically",
                Ok(if rep.monotone { 1.0 } else { 0.0 }),
                1.0,
            );
        }
        Err(e) => {
            r.at_most("sampled E|J1|^2 vs alpha_1 (deviation)", Err(e.clone()), 0.0);
        }
    }
    let cov = (|| -> Result<(f64, f64)> {
        let grid = NoiseGrid::new(&model.spectral, &model.temporal, 1.0, 0.0, 4, 4.0, seed)?;
        let n = 10_000;
        let samples = sample_noise(&grid, n);
        let cells = grid.time_cells() * grid.space_cells();
        let ns = grid.space_cells();
        let mut worst_diag = 0.0f64;
        let mut worst_corr = 0.0f64;
        for a in 0..cells {
            for b in a..cells {
                let emp = samples.iter().map(|s| s[a] * s[b]).sum::<f64>() / n as f64;
                let target = grid.covariance(a / ns, a % ns, b / ns, b % ns);
                if a == b {
                    worst_diag = worst_diag.max(rel_err(emp, target));
                } else {
                    let va = grid.covariance(a / ns, a % ns, a / ns, a % ns);
                    let vb = grid.covariance(b / ns, b % ns, b / ns, b % ns);
                    worst_corr = worst_corr.max((emp - target).abs() / (va * vb).sqrt());
                }
            }
        }
        Ok((worst_diag * (n as f64).sqrt() / 2f64.sqrt(), worst_corr * (n as f64).sqrt()))
    })();
    r.at_most("noise sample variances (relative error x sqrt(n/2))", cov.clone().map(|c| c.0), 4.0);
    r.at_most("noise sample correlations (error x sqrt(n))", cov.map(|c| c.1), 4.0);
    let scaling = (|| -> Result<(f64, f64)> {
        let grid = NoiseGrid::new(&model.spectral, &model.temporal, 1.0, 0.0, 16, 4.0, seed)?;
        let a = estimate_j1_variance(&model, &grid, 1.0, 0.0, 2000)?;
        let b = estimate_j1_variance(&model.with_lambda(2.0), &grid, 1.0, 0.0, 2000)?;
        let z = estimate_j1_variance(&model.with_lambda(0.0), &grid, 1.0, 0.0, 2000)?;
        Ok((rel_err(b.mean / a.mean, 4.0), z.mean.abs()))
    })();
    r.at_most("E|J1|^2 scales as lambda^2", scaling.clone().map(|s| s.0), 1e-12);
    r.at_most("E|J1|^2 vanishes at lambda = 0", scaling.map(|s| s.1), 0.0);
    let single = (|| -> Result<f64> {
        let sm = riesz_half();
        let tc = TemporalCovariance::Fractional { hurst: 0.75 };
        let grid = NoiseGrid::with_space_cells(&sm, &tc, 1.0, 0.0, 2, 1, 0.5, seed)?;
        let c = sm.riesz_correlation_constant().expect("riesz");
        // time cell [1/2, 1]: mass 2·(1/2)^{3/2}/2; space cell [-1/2, 1/2]: mass 2Ψ(1)
        let time_mass = 0.5f64.powf(1.5);
        let space_mass = 2.0 * c / (0.5 * 1.5);
        Ok(rel_err(grid.covariance(0, 0, 0, 0), time_mass * space_mass))
    })();
    r.at_most("single cell variance equals product of cell masses", single, 1e-12);
    r.checks
}
