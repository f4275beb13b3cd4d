use approx::assert_relative_eq;
use pam_core::chaos_engine::simplex_power_integral;
use pam_core::heat_kernel::{g, gg_identity_residual, kernel_difference_ratio};
use pam_core::moment_bounds::HnTable;
use pam_core::noise_model::SpectralMeasure;
use pam_core::special_functions::{log_gamma, mittag_leffler, MittagLefflerParams};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn heat_kernel_product_identity(
        t in 0.01f64..10.0,
        s in 0.01f64..10.0,
        x in prop::collection::vec(-3.0f64..3.0, 2),
        y in prop::collection::vec(-3.0f64..3.0, 2),
    ) {
        prop_assert!(gg_identity_residual(t, s, &x, &y).unwrap() <= 1e-12);
    }

    #[test]
    fn heat_kernel_is_even_and_positive(t in 0.01f64..10.0, x in -5.0f64..5.0) {
        let a = g(t, &[x]).unwrap();
        prop_assert!(a > 0.0);
        prop_assert_eq!(a, g(t, &[-x]).unwrap());
    }

    #[test]
    fn kernel_difference_bounded(t in 0.01f64..5.0, x in -5.0f64..5.0, y in -5.0f64..5.0, th in 0.01f64..1.0) {
        prop_assert!(kernel_difference_ratio(t, &[x], &[y], th).unwrap() <= 2f64.sqrt());
    }

    #[test]
    fn mittag_leffler_exp(z in 0.0f64..30.0) {
        let p = MittagLefflerParams::new(1.0, 1.0).unwrap();
        assert_relative_eq!(mittag_leffler(p, z).unwrap(), z.exp(), max_relative = 1e-12);
    }

    #[test]
    fn log_gamma_recurrence(x in 0.1f64..50.0) {
        let lhs = log_gamma(x + 1.0).unwrap();
        assert_relative_eq!(lhs, log_gamma(x).unwrap() + x.ln(), epsilon = 1e-12, max_relative = 1e-13);
    }

    #[test]
    fn simplex_integral_scales(n in 1usize..6, h in -0.45f64..1.0, t in 0.1f64..5.0) {
        let one = simplex_power_integral(n, h, 1.0).unwrap();
        let scaled = simplex_power_integral(n, h, t).unwrap();
        let exponent = n as f64 * (h + 1.0) + h;
        assert_relative_eq!(scaled, one * t.powf(exponent), max_relative = 1e-12);
    }

    #[test]
    fn hn_grows_in_time(alpha in 0.1f64..0.95, t in 0.05f64..2.0) {
        let sm = SpectralMeasure::riesz(alpha, 1).unwrap();
        let tbl = HnTable::closed_form_only(&sm, 4.0, 6).unwrap();
        for n in 1..=6 {
            prop_assert!(tbl.h(n, 2.0 * t).unwrap() > tbl.h(n, t).unwrap());
        }
    }
}
