//! Frozen reference values from independent high-precision computations.

use approx::assert_relative_eq;
use pam_core::chaos_engine::{alpha_1_exact, alpha_1_with_order, ChaosContext, NestingOrder};
use pam_core::model::Model;
use pam_core::moment_bounds::{
    build_hn, h_series_mittag_leffler, holder_exponents, lambda_critical, lyapunov_theta, power_law_data,
    riesz_moment_bound, HnTable, H_series,
};
use pam_core::noise_model::{RadialDensity, SpectralMeasure, TemporalCovariance};
use pam_core::special_functions::{beta_fn, gamma, log_gamma, mittag_leffler, MittagLefflerParams};
use pam_core::PamError;

const ALPHA_1_STANDARD: f64 = 0.147_531_549_731_102_566;
const THETA_ONE: f64 = 0.793_700_525_984_099_737;
const K_AT_ONE: f64 = 0.686_212_627_559_326_157;
const K_AT_TWO: f64 = 0.577_033_738_616_469_689;

fn riesz_half() -> SpectralMeasure {
    SpectralMeasure::riesz(0.5, 1).unwrap()
}

#[test]
fn gamma_family_values() {
    assert_relative_eq!(gamma(0.3).unwrap(), 2.991_568_987_687_590_6, max_relative = 1e-14);
    assert_relative_eq!(log_gamma(50.5).unwrap(), 146.519_255_490_720_627, max_relative = 1e-14);
    assert_relative_eq!(beta_fn(0.3, 0.7).unwrap(), 3.883_222_077_450_933_2, max_relative = 1e-13);
}

#[test]
fn mittag_leffler_values() {
    let cases = [
        (0.5, 1.0, 2.0, 108.940_904_389_977_972),
        (0.75, 0.75, 5.0, 11_778.623_429_457_295),
        (0.375, 0.375, 10.0, 4.723_644_106_396_244e203),
        (2.0, 1.0, 9.0, 10.067_661_995_777_766),
    ];
    for (a, b, z, want) in cases {
        let p = MittagLefflerParams::new(a, b).unwrap();
        assert_relative_eq!(mittag_leffler(p, z).unwrap(), want, max_relative = 1e-10);
    }
}

#[test]
fn riesz_upsilon_and_k() {
    let sm = riesz_half();
    assert_relative_eq!(sm.upsilon(1.0).unwrap(), std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-14);
    assert_relative_eq!(sm.upsilon(0.3).unwrap(), 1.744_391_898_986_842_6, max_relative = 1e-13);
    assert_relative_eq!(sm.k(1.0).unwrap(), K_AT_ONE, max_relative = 1e-14);
    assert_relative_eq!(sm.k(2.0).unwrap(), K_AT_TWO, max_relative = 1e-14);
    assert!(sm.upsilon(0.0).unwrap().is_infinite());
}

#[test]
fn hn_closed_form_values() {
    let tbl = HnTable::closed_form_only(&riesz_half(), 2.0, 4).unwrap();
    assert_relative_eq!(tbl.h(1, 1.0).unwrap(), 0.914_950_170_079_101_54, max_relative = 1e-13);
    assert_relative_eq!(tbl.h(3, 2.0).unwrap(), 1.109_510_403_098_757_0, max_relative = 1e-13);
    assert_eq!(tbl.h(0, 1.5).unwrap(), 1.0);
}

#[test]
fn hn_numeric_matches_closed_form() {
    let tbl = build_hn(&riesz_half(), 2.0, 4, 800).unwrap();
    for n in 1..=4 {
        for t in [0.2, 1.0, 2.0] {
            assert_relative_eq!(tbl.h_numeric(n, t).unwrap(), tbl.h(n, t).unwrap(), max_relative = 1e-6);
        }
    }
}

#[test]
fn h_series_at_standard_rate() {
    let sm = riesz_half();
    let tbl = HnTable::closed_form_only(&sm, 2.0, 200).unwrap();
    let pl = power_law_data(&sm).unwrap();
    assert_relative_eq!(H_series(&tbl, 1.0, 3.0, 1e-14).unwrap().value, 41.261_908_283_280_302, max_relative = 1e-12);
    assert_relative_eq!(H_series(&tbl, 2.0, 3.0, 1e-14).unwrap().value, 1_281.679_608_542_345_8, max_relative = 1e-12);
    assert_relative_eq!(h_series_mittag_leffler(pl, 1.0, 3.0).unwrap(), 41.261_908_283_280_302, max_relative = 1e-12);
}

#[test]
fn alpha_1_standard_config() {
    let model = Model::standard();
    let x = [0.0];
    let ctx = ChaosContext::new(&model, 1, 1.0, &x).unwrap();
    let outer = alpha_1_exact(&ctx).unwrap();
    let inner = alpha_1_with_order(&ctx, NestingOrder::LagInner, 1e-11).unwrap();
    assert_relative_eq!(outer.value, ALPHA_1_STANDARD, max_relative = 1e-10);
    assert_relative_eq!(inner.value, ALPHA_1_STANDARD, max_relative = 1e-10);
}

#[test]
fn lyapunov_theta_value() {
    assert!((lyapunov_theta(&riesz_half(), 1.0).unwrap() - THETA_ONE).abs() < 1e-12);
}

#[test]
fn critical_coupling() {
    let g3 = SpectralMeasure::radial(RadialDensity::Gaussian { width: 1.0 }, 3).unwrap();
    let tc = TemporalCovariance::Exponential { rate: 2.0 };
    assert_relative_eq!(g3.upsilon(0.0).unwrap(), 0.063_493_635_934_240_970, max_relative = 1e-9);
    assert_relative_eq!(lambda_critical(&g3, &tc, 2.0).unwrap(), 1.984_288_912_036_401_2, max_relative = 1e-9);
    assert_relative_eq!(lambda_critical(&g3, &tc, 3.0).unwrap(), 1.403_104_145_534_216_0, max_relative = 1e-9);
    let frac = TemporalCovariance::Fractional { hurst: 0.75 };
    assert!(lambda_critical(&g3, &frac, 2.0).unwrap().is_infinite());
    assert!(lambda_critical(&riesz_half(), &tc, 2.0).unwrap().is_infinite());
}

#[test]
fn holder_thresholds() {
    let r = holder_exponents(&riesz_half()).unwrap();
    assert_relative_eq!(r.sup_beta_complement, 0.25, epsilon = 1e-12);
    let w = holder_exponents(&SpectralMeasure::white_space()).unwrap();
    assert_relative_eq!(w.time_exponent_sup, 0.25, epsilon = 1e-12);
    assert_relative_eq!(w.space_exponent_sup, 0.5, epsilon = 1e-12);
    let b = holder_exponents(&SpectralMeasure::radial(RadialDensity::Bessel { nu: 0.2 }, 1).unwrap()).unwrap();
    assert!((b.sup_beta_complement - 0.3).abs() < 2e-3, "bessel threshold {}", b.sup_beta_complement);
}

#[test]
fn riesz_bound_dominates_second_moment_bound() {
    let model = Model::standard();
    let x = [0.0];
    for t in [0.1, 1.0, 3.0] {
        let r = riesz_moment_bound(&model, t, &x).unwrap();
        assert!(r.exact_ml_bound <= r.c_prime * r.exponential_envelope * (1.0 + 1e-9));
        assert!(r.c_prime >= 1.0);
    }
}

#[test]
fn domain_errors() {
    assert!(matches!(gamma(-2.0), Err(PamError::Domain(_))));
    assert!(matches!(MittagLefflerParams::new(0.0, 1.0), Err(PamError::Domain(_))));
    let sm = riesz_half();
    assert!(matches!(sm.upsilon(-1.0), Err(PamError::Domain(_))));
    assert!(matches!(lyapunov_theta(&sm, -1.0), Err(PamError::Domain(_))));
    assert!(matches!(HnTable::closed_form_only(&sm, -1.0, 3), Err(PamError::Domain(_))));
    let flat = SpectralMeasure::radial(RadialDensity::Bessel { nu: 0.0 }, 3).unwrap();
    match flat.check_dalang() {
        Err(PamError::Model(m)) => assert!(m.contains("Dalang")),
        other => panic!("expected a Dalang error, got {other:?}"),
    }
}
