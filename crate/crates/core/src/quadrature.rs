//! Adaptive Gauss–Kronrod quadrature with endpoint power maps.
//!
//! Integrands with algebraic endpoint behaviour `(x-a)^p` are flattened by the
//! substitution `x = a + h v^{1/(1+p)}` before the adaptive rule sees them, and
//! the integrand receives the exact distances to both endpoints so that no
//! precision is lost to cancellation near a singular endpoint.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{PamError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Eight-point Gauss–Legendre nodes on `[-1, 1]` (positive half).
pub const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
/// Weights matching [`GL8_X`].
pub const GL8_W: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Value of an integral together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Tolerances and limits for the adaptive rule.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-300,
            rel_tol: 1e-11,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, item) in fv.iter_mut().enumerate() {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        *item = (f1, f2);
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        resasc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = resk * h;
    resasc *= h.abs();
    resabs *= h.abs();
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

/// Adaptive 15-point Gauss–Kronrod integration of a smooth integrand on `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(PamError::Domain("integration limits must be finite".into()));
    }
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let (v0, e0) = kronrod(&f, a, b);
    if !v0.is_finite() {
        return Err(PamError::NonConvergence {
            message: "integrand produced a non-finite value".into(),
            achieved: f64::INFINITY,
        });
    }
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v0, error: e0 });
    let mut total = v0;
    let mut total_err = e0;
    let mut count = 1usize;
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if count >= opts.max_intervals {
            return Err(PamError::NonConvergence {
                message: format!("adaptive quadrature exhausted {} subintervals", count),
                achieved: total_err / total.abs().max(f64::MIN_POSITIVE),
            });
        }
        let seg = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            heap.push(seg);
            break;
        }
        let (v1, e1) = kronrod(&f, seg.a, mid);
        let (v2, e2) = kronrod(&f, mid, seg.b);
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
        count += 1;
    }
    // Re-sum from the pieces to shed accumulated drift in the running totals.
    let mut value = 0.0;
    let mut error = 0.0;
    for s in heap.iter() {
        value += s.value;
        error += s.error;
    }
    if !value.is_finite() {
        return Err(PamError::NonConvergence {
            message: "integrand produced a non-finite value".into(),
            achieved: f64::INFINITY,
        });
    }
    Ok(Estimate { value, error })
}

/// Integrate `f(x, x - a, b - x)` over `[a, b]` for an integrand that behaves like
/// `(x-a)^pa` near `a` and `(b-x)^pb` near `b` (both exponents `> -1`).
pub fn integrate_power_ends<F>(f: F, a: f64, b: f64, pa: f64, pb: f64, opts: QuadOptions) -> Result<Estimate>
where
    F: Fn(f64, f64, f64) -> f64,
{
    if pa <= -1.0 || pb <= -1.0 {
        return Err(PamError::Domain("endpoint exponents must exceed -1".into()));
    }
    if b <= a {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let half = 0.5 * (b - a);
    let qa = 1.0 / (1.0 + pa);
    let qb = 1.0 / (1.0 + pb);
    let left = integrate(
        |v: f64| {
            if v <= 0.0 {
                return 0.0;
            }
            let dl = half * v.powf(qa);
            let jac = half * qa * v.powf(qa - 1.0);
            f(a + dl, dl, (b - a) - dl) * jac
        },
        0.0,
        1.0,
        opts,
    )?;
    let right = integrate(
        |v: f64| {
            if v <= 0.0 {
                return 0.0;
            }
            let dr = half * v.powf(qb);
            let jac = half * qb * v.powf(qb - 1.0);
            f(b - dr, (b - a) - dr, dr) * jac
        },
        0.0,
        1.0,
        opts,
    )?;
    Ok(Estimate {
        value: left.value + right.value,
        error: left.error + right.error,
    })
}

/// Integrate a nonnegative radial profile `g` over `(0, ∞)`.
///
/// The integral is taken in the variable `v = ln r`, where power-law ends
/// become exponentially decaying tails. The window `[v_lo, v_hi]` is widened
/// until the integrand at the window edges is negligible, and the remaining
/// tails are added from the local exponential decay rate.
pub fn integrate_radial<F: Fn(f64) -> f64>(g: F, scales: &[f64], opts: QuadOptions) -> Result<Estimate> {
    let h = |v: f64| {
        let r = v.exp();
        let val = g(r) * r;
        if val.is_finite() {
            val
        } else {
            f64::INFINITY
        }
    };
    let mut lo_scale = 1.0f64;
    let mut hi_scale = 1.0f64;
    for &s in scales {
        if s.is_finite() && s > 0.0 {
            lo_scale = lo_scale.min(s);
            hi_scale = hi_scale.max(s);
        }
    }
    let centre_lo = lo_scale.ln() - 2.0;
    let centre_hi = hi_scale.ln() + 2.0;
    let peak = {
        let mut m = 0.0f64;
        let n = 64;
        for i in 0..=n {
            let v = centre_lo + (centre_hi - centre_lo) * i as f64 / n as f64;
            let x = h(v);
            if x.is_finite() {
                m = m.max(x.abs());
            } else {
                return Err(PamError::NonConvergence {
                    message: "radial integrand is not finite inside the window".into(),
                    achieved: f64::INFINITY,
                });
            }
        }
        m
    };
    let tiny = opts.rel_tol * 1e-3;
    // Walk outward until the integrand and its tail estimate are negligible.
    let tail = |start: f64, dir: f64| -> Result<(f64, f64)> {
        let mut v = start;
        for _ in 0..400 {
            let hv = h(v);
            let hn = h(v + dir);
            if !hv.is_finite() || !hn.is_finite() {
                return Err(PamError::NonConvergence {
                    message: "radial integrand diverges at the end of the window".into(),
                    achieved: f64::INFINITY,
                });
            }
            if hv == 0.0 {
                return Ok((v, 0.0));
            }
            let rate = (hv / hn.max(f64::MIN_POSITIVE)).ln();
            if rate > 0.05 {
                let rest = hv / rate;
                if rest <= tiny * peak && hv <= tiny * peak {
                    return Ok((v, rest));
                }
            }
            v += dir;
        }
        Err(PamError::NonConvergence {
            message: "radial integrand does not decay in the log variable".into(),
            achieved: f64::INFINITY,
        })
    };
    let (v_lo, tail_lo) = tail(centre_lo, -1.0)?;
    let (v_hi, tail_hi) = tail(centre_hi, 1.0)?;
    let mut value = tail_lo + tail_hi;
    let mut error = 0.05 * (tail_lo + tail_hi);
    // Unit-width panels keep each adaptive call well resolved.
    let panels = ((v_hi - v_lo).ceil() as usize).max(1);
    let width = (v_hi - v_lo) / panels as f64;
    let panel_opts = QuadOptions {
        abs_tol: opts.abs_tol.max(opts.rel_tol * peak * 1e-3),
        ..opts
    };
    for i in 0..panels {
        let a = v_lo + width * i as f64;
        let e = integrate(&h, a, a + width, panel_opts)?;
        value += e.value;
        error += e.error;
    }
    if error > opts.rel_tol * value.abs() * 10.0 && error > opts.abs_tol {
        return Err(PamError::NonConvergence {
            message: "radial quadrature error estimate above tolerance".into(),
            achieved: error / value.abs().max(f64::MIN_POSITIVE),
        });
    }
    Ok(Estimate { value, error })
}

/// Integrate over `[a, ∞)` via `x = a + s·u/(1-u)` for a decaying integrand.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, opts: QuadOptions) -> Result<Estimate> {
    integrate(
        |u: f64| {
            if u >= 1.0 {
                return 0.0;
            }
            let w = 1.0 - u;
            let x = a + scale * u / w;
            let val = f(x) * scale / (w * w);
            if val.is_finite() {
                val
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let e = integrate(|x| 3.0 * x * x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((e.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn power_ends_beta_integral() {
        let e = integrate_power_ends(
            |_, dl, dr| (dl * dr).powf(-0.5),
            0.0,
            1.0,
            -0.5,
            -0.5,
            QuadOptions::rel(1e-13),
        )
        .unwrap();
        assert!((e.value - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn radial_gamma_integral() {
        // ∫ r^{-1/2} e^{-r} dr = Γ(1/2)
        let e = integrate_radial(|r| r.powf(-0.5) * (-r).exp(), &[1.0], QuadOptions::rel(1e-12)).unwrap();
        assert!((e.value - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn radial_power_tail() {
        // ∫ r^{-1/2} / (1 + r^2) dr = π / (2 sin(π/4))
        let exact = std::f64::consts::PI / (2.0 * (std::f64::consts::PI / 4.0).sin());
        let e = integrate_radial(|r| r.powf(-0.5) / (1.0 + r * r), &[1.0], QuadOptions::rel(1e-12)).unwrap();
        assert!((e.value / exact - 1.0).abs() < 1e-10, "{}", e.value);
    }

    #[test]
    fn half_line_exponential() {
        let e = integrate_half_line(|x| (-x).exp(), 0.0, 1.0, QuadOptions::rel(1e-12)).unwrap();
        assert!((e.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn non_convergence_is_reported() {
        let opts = QuadOptions {
            max_intervals: 3,
            ..QuadOptions::rel(1e-14)
        };
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, opts);
        assert!(matches!(r, Err(PamError::NonConvergence { .. })));
    }
}
