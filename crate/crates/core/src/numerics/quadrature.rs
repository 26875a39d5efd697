//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! Each panel is evaluated with the 15-point Kronrod rule; the embedded
//! 7-point Gauss rule supplies the error estimate, rescaled the way QUADPACK
//! does it. The panel with the largest error is bisected until the summed
//! error estimate drops below the requested absolute tolerance. Known
//! singular points are declared as breakpoints so that no node ever lands on
//! them (the rule is open, endpoints are never evaluated).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Maximum number of bisections applied to any initial panel.
pub const MAX_DEPTH: u32 = 60;
/// Function-evaluation budget for one adaptive integration.
pub const MAX_EVALUATIONS: usize = 1_000_000;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute error estimate, always non-negative.
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod panel: (value, error estimate).
#[allow(clippy::needless_range_loop)]
fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut res_gauss = fc * WG[3];
    let mut res_kronrod = fc * WGK[7];
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let absc = half * XGK[jtw];
        let f1 = f(center - absc);
        let f2 = f(center + absc);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_gauss += WG[j] * (f1 + f2);
        res_kronrod += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let absc = half * XGK[jtwm1];
        let f1 = f(center - absc);
        let f2 = f(center + absc);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_kronrod += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_kronrod - res_gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, error)
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    integrate_adaptive_split(f, a, b, &[], tol)
}

/// Integrate `f` over `[a, b]`, starting from panels split at the given
/// breakpoints. Breakpoints outside `(a, b)` are ignored.
pub fn integrate_adaptive_split<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<QuadratureResult> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter {
            name: "b",
            value: b,
            reason: "integration interval must satisfy a < b with finite endpoints",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", value: tol, reason: "tolerance must be positive" });
    }

    let mut points = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    points.extend(inner);
    points.push(b);

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    let mut total_error = 0.0;
    for w in points.windows(2) {
        let (value, error) = kronrod15(&f, w[0], w[1]);
        evaluations += 15;
        total_error += error;
        heap.push(Panel { a: w[0], b: w[1], value, error, depth: 0 });
    }

    // Panels that may not be bisected further.
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;

    loop {
        if !total_error.is_finite() {
            break;
        }
        if total_error <= tol {
            break;
        }
        if evaluations + 30 > MAX_EVALUATIONS {
            break;
        }
        let Some(panel) = heap.pop() else { break };
        let mid = 0.5 * (panel.a + panel.b);
        if panel.depth >= MAX_DEPTH || !(mid > panel.a && mid < panel.b) {
            frozen_value += panel.value;
            frozen_error += panel.error;
            continue;
        }
        let (lv, le) = kronrod15(&f, panel.a, mid);
        let (rv, re) = kronrod15(&f, mid, panel.b);
        evaluations += 30;
        total_error += le + re - panel.error;
        heap.push(Panel { a: panel.a, b: mid, value: lv, error: le, depth: panel.depth + 1 });
        heap.push(Panel { a: mid, b: panel.b, value: rv, error: re, depth: panel.depth + 1 });

        // The running sum drifts; resynchronise before declaring success.
        if total_error <= tol {
            total_error = frozen_error + heap.iter().map(|p| p.error).sum::<f64>();
        }
    }

    let value = frozen_value + heap.iter().map(|p| p.value).sum::<f64>();
    let error_estimate = frozen_error + heap.iter().map(|p| p.error).sum::<f64>();

    if value.is_finite() && error_estimate <= tol {
        Ok(QuadratureResult { value, error_estimate, evaluations })
    } else {
        Err(Error::NonConvergence { a, b, error_estimate, tol, evaluations })
    }
}

/// Integrate `f` over the real line. `f` must satisfy
/// `|f(x)| <= C exp(-decay_rate |x - center|)` away from `center`.
///
/// The line is truncated to `center ± L` with
/// `L = (-ln(tol / 100) + 40) / decay_rate`, and the quadrature is split at
/// `0` and at `center`.
pub fn integrate_real_line<F: Fn(f64) -> f64>(
    f: F,
    center: f64,
    decay_rate: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    if !(decay_rate > 0.0) {
        return Err(Error::InvalidParameter {
            name: "decay_rate",
            value: decay_rate,
            reason: "decay rate must be positive",
        });
    }
    let half_width = truncation_half_width(decay_rate, tol);
    integrate_adaptive_split(f, center - half_width, center + half_width, &[0.0, center], tol)
}

/// Half-width of the truncated integration window used by [`integrate_real_line`].
pub fn truncation_half_width(decay_rate: f64, tol: f64) -> f64 {
    (-(tol * 1e-2).ln() + 40.0) / decay_rate
}

/// Five-point Gauss-Legendre rule on a single panel, for short panels where
/// the integrand is known to be smooth.
pub fn gauss_legendre5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    const X: [f64; 3] = [0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
    const W: [f64; 3] = [0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1];
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut sum = W[0] * f(c);
    for i in 1..3 {
        sum += W[i] * (f(c - h * X[i]) + f(c + h * X[i]));
    }
    sum * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn linear_on_unit_interval() {
        let r = integrate_adaptive(|x| x, 0.0, 1.0, 1e-14).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        assert!(r.evaluations >= 15);
        assert!(r.error_estimate >= 0.0);
    }

    #[test]
    fn log_singularity_at_endpoint() {
        let r = integrate_adaptive(|x: f64| -x.ln(), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn sine_half_period() {
        let r = integrate_adaptive(f64::sin, 0.0, PI, 1e-13).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
    }

    #[test]
    fn quintic_exact_in_one_panel() {
        let p = |x: f64| 3.0 - 2.0 * x + 0.5 * x.powi(2) + x.powi(3) - 0.25 * x.powi(4) + 0.1 * x.powi(5);
        let exact =
            |x: f64| 3.0 * x - x.powi(2) + x.powi(3) / 6.0 + x.powi(4) / 4.0 - 0.05 * x.powi(5) + x.powi(6) / 60.0;
        let r = integrate_adaptive(p, -1.5, 2.0, 1e-12).unwrap();
        let want = exact(2.0) - exact(-1.5);
        assert!(((r.value - want) / want).abs() < 1e-13);
    }

    #[test]
    fn interior_singularity_with_break() {
        // ∫_{-1}^{1} |x|^{-1/2} dx = 4
        // Without extrapolation the error near 0 only falls like √h per bisection.
        let r = integrate_adaptive_split(|x: f64| x.abs().powf(-0.5), -1.0, 1.0, &[0.0], 1e-7).unwrap();
        assert!((r.value - 4.0).abs() < 1e-7);
    }

    #[test]
    fn standard_normal_over_real_line() {
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        let r = integrate_real_line(phi, 0.0, 0.5, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_interval_and_tolerance() {
        assert!(integrate_adaptive(|x| x, 1.0, 0.0, 1e-8).is_err());
        assert!(integrate_adaptive(|x| x, 0.0, 1.0, 0.0).is_err());
        assert!(integrate_real_line(|x| x, 0.0, -1.0, 1e-8).is_err());
    }

    #[test]
    fn reports_non_convergence() {
        // 1/x is not integrable at 0.
        let err = integrate_adaptive(|x: f64| 1.0 / x, 0.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn gauss_legendre5_is_exact_for_degree_nine() {
        let v = gauss_legendre5(|x: f64| x.powi(9) + x.powi(8), 0.0, 1.0);
        assert!((v - (0.1 + 1.0 / 9.0)).abs() < 1e-14);
    }
}
