//! Acceptance run: one PASS/FAIL line per criterion, each with pinned tolerances
//! and a wall-clock budget. Exits nonzero when any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use pam_core::chaos_engine::{
    alpha_1_with_order, i_n_estimate, j_product_bound, simplex_j_mc, simplex_power_integral, simplex_power_mc,
    ChaosContext, NestingOrder, TimeSimplexPoint,
};
use pam_core::heat_kernel::gg_identity_residual;
use pam_core::mc_verify::mc_consistency;
use pam_core::model::Model;
use pam_core::moment_bounds::{
    build_hn, h_series_mittag_leffler, holder_exponents, lyapunov_theta, power_law_data, HnTable, H_series,
    H_tilde_series,
};
use pam_core::noise_model::{RadialDensity, SpectralMeasure};
use pam_core::quadrature::{integrate_power_ends, QuadOptions};
use pam_core::sampling::stream_rng;
use pam_core::special_functions::{mittag_leffler, regime_overlap_discrepancy, MittagLefflerParams};
use pam_core::Result;
use rand::Rng;

const SEED: u64 = 42;

const GG_TOL: f64 = 1e-12;
const SIMPLEX_QUAD_TOL: f64 = 1e-6;
const MC_SE_FACTOR: f64 = 3.0;
const SIMPLEX_MC_SAMPLES: usize = 1_000_000;
const HN_CONV_TOL: f64 = 1e-6;
const HN_LAPLACE_TOL: f64 = 1e-4;
const ML_EXP_TOL: f64 = 1e-12;
const ML_OVERLAP_TOL: f64 = 1e-8;
const ML_CROSS_TOL: f64 = 1e-8;
const CHAIN_MARGIN: f64 = 0.01;
const MC_GRID: usize = 64;
const MC_REPLICAS: usize = 10_000;
const MAX_PRINCIPLE_TOL: f64 = 1e-8;
const SIMPLEX_BOUND_SLACK: f64 = 1e-6;
const THETA_TOL: f64 = 1e-10;
const PROXY_SLACK: f64 = 0.05;
const HOLDER_TOL: f64 = 1e-12;

struct Outcome {
    passed: bool,
    detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn heat_kernel_identity() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for d in 1..=3usize {
        let mut rng = stream_rng(SEED, 1000 + d as u64);
        for _ in 0..10_000 {
            let t = 10f64.powf(rng.random_range(-2.0..1.0));
            let s = 10f64.powf(rng.random_range(-2.0..1.0));
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
            let y: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
            worst = worst.max(gg_identity_residual(t, s, &x, &y)?);
        }
    }
    outcome(worst <= GG_TOL, format!("max relative residual {worst:.2e} <= {GG_TOL:.0e}"))
}

fn gamma_simplex_identity() -> Result<Outcome> {
    let mut worst_quad = 0.0f64;
    let mut worst_se = 0.0f64;
    for h in [-0.4, 0.0, 0.5] {
        let q = integrate_power_ends(
            |_, dl, dr| dl.powf(h) * dr.powf(h),
            0.0,
            1.0,
            h,
            h,
            QuadOptions::rel(1e-12),
        )?;
        worst_quad = worst_quad.max(rel(q.value, simplex_power_integral(1, h, 1.0)?));
        for n in [2usize, 3] {
            let exact = simplex_power_integral(n, h, 1.0)?;
            let mc = simplex_power_mc(n, h, 1.0, SIMPLEX_MC_SAMPLES, SEED + n as u64);
            let dev = (mc.mean - exact).abs();
            // h = 0 has a constant integrand, so the estimator is exact up to rounding
            let se = mc.std_error.max(1e-12 * exact);
            worst_se = worst_se.max(dev / se);
        }
    }
    outcome(
        worst_quad <= SIMPLEX_QUAD_TOL && worst_se <= MC_SE_FACTOR,
        format!("quadrature rel err {worst_quad:.2e}, worst MC deviation {worst_se:.2} SE"),
    )
}

fn hn_machinery() -> Result<Outcome> {
    let sm = SpectralMeasure::riesz(0.5, 1)?;
    let tbl = build_hn(&sm, 5.0, 10, 2400)?;
    let mut conv = 0.0f64;
    for n in 0..=10 {
        for i in 0..50 {
            let t = 0.1 + 4.9 * i as f64 / 49.0;
            conv = conv.max(rel(tbl.h_numeric(n, t)?, tbl.h(n, t)?));
        }
    }
    let long = build_hn(&sm, 80.0, 5, 2400)?;
    let mut lap = 0.0f64;
    for beta in [0.5, 1.0, 2.0] {
        for n in 1..=5 {
            let exact = (2.0 * sm.upsilon(2.0 * beta)?).powi(n as i32) / beta;
            lap = lap.max(rel(long.laplace(n, beta)?, exact));
        }
    }
    outcome(
        conv <= HN_CONV_TOL && lap <= HN_LAPLACE_TOL,
        format!("convolution rel err {conv:.2e}, laplace rel err {lap:.2e}"),
    )
}

fn mittag_leffler_checks() -> Result<Outcome> {
    let p = MittagLefflerParams::new(1.0, 1.0)?;
    let mut exp_err = 0.0f64;
    for i in 0..=3000 {
        let z = 30.0 * i as f64 / 3000.0;
        exp_err = exp_err.max(rel(mittag_leffler(p, z)?, z.exp()));
    }
    let mut overlap = 0.0f64;
    for (a, b) in [(0.75, 0.75), (0.5, 0.5), (0.375, 0.375)] {
        overlap = overlap.max(regime_overlap_discrepancy(MittagLefflerParams::new(a, b)?, 200)?);
    }
    let sm = SpectralMeasure::riesz(0.5, 1)?;
    let pl = power_law_data(&sm).expect("riesz is a power law");
    let tbl = HnTable::closed_form_only(&sm, 5.0, 200)?;
    let mut cross = 0.0f64;
    for t in [0.1, 0.5, 1.0, 2.0, 5.0] {
        for g in [0.1, 1.0, 3.0] {
            cross = cross.max(rel(H_series(&tbl, t, g, 1e-12)?.value, h_series_mittag_leffler(pl, t, g)?));
        }
    }
    outcome(
        exp_err <= ML_EXP_TOL && overlap <= ML_OVERLAP_TOL && cross <= ML_CROSS_TOL,
        format!("exp {exp_err:.2e}, overlap {overlap:.2e}, H series cross {cross:.2e}"),
    )
}

fn bound_chain() -> Result<Outcome> {
    let model = Model::standard();
    let x0 = [0.0];
    let t = 1.0;
    let ctx = ChaosContext::new(&model, 1, t, &x0)?;
    let a1 = alpha_1_with_order(&ctx, NestingOrder::LagOuter, 1e-11)?.value;
    let tbl = HnTable::closed_form_only(&model.spectral, t, 64)?;
    let jp = model.initial.eval_jplus(t, &x0)?;
    let j0 = model.initial.eval_j0(t, &x0)?;
    let gt = model.temporal.big_gamma(t)?;
    let lam2 = model.lambda * model.lambda;
    let first = 1.0 - a1 / (2.0 * lam2 * gt * tbl.h(1, t)? * jp * jp);
    let h = H_series(&tbl, t, 2.0 * lam2 * gt, 1e-12)?.value;
    let second = 1.0 - (j0 * j0 + a1) / (jp * jp * h);
    outcome(
        first >= CHAIN_MARGIN && second >= CHAIN_MARGIN,
        format!("alpha_1 = {a1:.6}, margins {first:.3} and {second:.3} (need >= {CHAIN_MARGIN})"),
    )
}

fn mc_check() -> Result<Outcome> {
    let model = Model::standard();
    let rep = mc_consistency(&model, 1.0, 0.0, &[16, 32, MC_GRID], MC_REPLICAS, SEED)?;
    let dev = (rep.estimate - rep.exact).abs();
    let allowed = MC_SE_FACTOR * rep.std_error + rep.discretization_allowance;
    let grids: Vec<usize> = rep.refinement.iter().map(|r| r.time_points).collect();
    outcome(
        dev <= allowed && rep.monotone && grids == [16, 32, MC_GRID],
        format!(
            "estimate {:.5} +- {:.5} vs {:.6}, deviation {dev:.2e} <= {allowed:.2e}, monotone {}",
            rep.estimate, rep.std_error, rep.exact, rep.monotone
        ),
    )
}

fn max_principle() -> Result<Outcome> {
    let sm = SpectralMeasure::riesz(0.5, 1)?;
    let mut rng = stream_rng(SEED, 7);
    let base = sm.shifted_gaussian_integral(0.7, 1.3, &[0.0])?;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let eta = rng.random_range(-5.0..5.0);
        worst = worst.max(sm.shifted_gaussian_integral(0.7, 1.3, &[eta])? - base);
    }
    outcome(
        worst <= MAX_PRINCIPLE_TOL,
        format!("max shifted minus unshifted {worst:.3e} <= {MAX_PRINCIPLE_TOL:.0e}"),
    )
}

fn simplex_bounds() -> Result<Outcome> {
    let model = Model::standard();
    let sm = &model.spectral;
    let x0 = [0.0];
    let tbl = HnTable::closed_form_only(sm, 1.0, 8)?;
    let mut worst_i = f64::NEG_INFINITY;
    let mut worst_j = f64::NEG_INFINITY;
    let mut passed = true;
    for n in 1..=3usize {
        let times: Vec<f64> = (1..=n).map(|k| k as f64 / (n as f64 + 1.0)).collect();
        let point = TimeSimplexPoint::new(times, 1.0)?;
        let ctx = ChaosContext::new(&model, n, 1.0, &x0)?;
        let i_n = i_n_estimate(&ctx, &point, 200_000, SEED + n as u64)?;
        let jn = j_product_bound(sm, &point)?;
        let sj = simplex_j_mc(sm, n, 1.0, SIMPLEX_MC_SAMPLES, SEED + 10 + n as u64)?;
        let bound = 2f64.powi(n as i32) * tbl.h(n, 1.0)? * (1.0 + SIMPLEX_BOUND_SLACK);
        // I_1 is computed exactly, so its standard error is pure rounding
        let slack_i = MC_SE_FACTOR * i_n.std_error + 1e-12 * jn;
        passed &= i_n.mean <= jn + slack_i && sj.mean <= bound + MC_SE_FACTOR * sj.std_error;
        worst_i = worst_i.max((i_n.mean - jn) / jn);
        worst_j = worst_j.max((sj.mean - bound) / bound);
    }
    outcome(
        passed,
        format!("max relative excess: I_n over J_n {worst_i:.3e}, simplex J over 2^n h_n {worst_j:.3e}"),
    )
}

fn lyapunov_proxy() -> Result<Outcome> {
    let sm = SpectralMeasure::riesz(0.5, 1)?;
    let theta = lyapunov_theta(&sm, 1.0)?;
    let closed = 2f64.sqrt().powf(4.0 / 3.0) / 2.0;
    let tbl = HnTable::closed_form_only(&sm, 80.0, 700)?;
    let mut values = Vec::new();
    for t in [20.0, 40.0, 80.0] {
        values.push(H_tilde_series(&tbl, t, 1.0, 1e-12)?.value.ln() / t);
    }
    let nonincreasing = values.windows(2).all(|w| w[1] <= w[0]);
    let below = values.iter().all(|v| *v <= theta + PROXY_SLACK);
    outcome(
        (theta - closed).abs() <= THETA_TOL && nonincreasing && below,
        format!("theta {theta:.12}, proxies {values:.5?}"),
    )
}

fn holder() -> Result<Outcome> {
    let a = holder_exponents(&SpectralMeasure::riesz(0.5, 1)?)?;
    let w = holder_exponents(&SpectralMeasure::white_space())?;
    let exponents_ok = (a.time_exponent_sup - 0.375).abs() <= HOLDER_TOL
        && (a.space_exponent_sup - 0.75).abs() <= HOLDER_TOL
        && (w.time_exponent_sup - 0.25).abs() <= HOLDER_TOL
        && (w.space_exponent_sup - 0.5).abs() <= HOLDER_TOL;
    let fams = [
        SpectralMeasure::riesz(0.5, 1)?,
        SpectralMeasure::white_space(),
        SpectralMeasure::radial(RadialDensity::Bessel { nu: 0.2 }, 1)?,
    ];
    let mut disagreements = 0;
    for s in &fams {
        for i in 0..20 {
            let beta = 0.025 + 0.05 * i as f64;
            match s.holder_sides(beta)? {
                (Some(l), Some(r)) if l == r => {}
                _ => disagreements += 1,
            }
        }
    }
    outcome(
        exponents_ok && disagreements == 0,
        format!(
            "riesz ({}, {}), white ({}, {}), {disagreements} two-sided disagreements",
            a.time_exponent_sup, a.space_exponent_sup, w.time_exponent_sup, w.space_exponent_sup
        ),
    )
}

fn cli_determinism() -> Result<Outcome> {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut outputs = Vec::new();
    let mut codes = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("verify{k}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_pam"))
            .args(["verify", "--suite", "all", "--seed", "42", "--out"])
            .arg(&path)
            .output()
            .expect("run pam");
        codes.push(status.status.code());
        outputs.push(std::fs::read(&path).unwrap_or_default());
    }
    let identical = !outputs[0].is_empty() && outputs[0] == outputs[1];
    outcome(
        codes.iter().all(|c| *c == Some(0)) && identical,
        format!("exit codes {codes:?}, byte-identical CSV {identical}"),
    )
}

type Criterion = (&'static str, fn() -> Result<Outcome>, Duration);

fn main() {
    let secs = Duration::from_secs;
    let criteria: [Criterion; 11] = [
        ("heat-kernel identity", heat_kernel_identity, secs(1)),
        ("gamma-simplex identity", gamma_simplex_identity, secs(30)),
        ("h_n machinery", hn_machinery, secs(30)),
        ("mittag-leffler", mittag_leffler_checks, secs(5)),
        ("bound chain", bound_chain, secs(10)),
        ("monte-carlo consistency", mc_check, secs(180)),
        ("maximum principle", max_principle, secs(5)),
        ("simplex bounds", simplex_bounds, secs(60)),
        ("lyapunov proxy", lyapunov_proxy, secs(30)),
        ("holder exponents", holder, secs(10)),
        ("cli determinism", cli_determinism, secs(600)),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= *budget, o.detail),
            Err(e) => (false, e.to_string()),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {:>2} {:<24} {}  {} [{:.2} s of {} s]",
            i + 1,
            name,
            if passed { "PASS" } else { "FAIL" },
            detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} criteria, {} failed", criteria.len(), failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
