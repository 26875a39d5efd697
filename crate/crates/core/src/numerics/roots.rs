//! Bracketed scalar root finding.

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;

/// Find a root of `g` inside `[lo, hi]`, which must bracket a sign change.
///
/// Bisection safeguarded secant steps (Dekker/Brent style, without inverse
/// quadratic interpolation). On return the final bracket is no wider than
/// `xtol` (or a few ulps of the root, whichever is larger).
pub fn find_root_bracketed<G: FnMut(f64) -> f64>(mut g: G, lo: f64, hi: f64, xtol: f64) -> Result<f64> {
    if !(xtol > 0.0) {
        return Err(Error::InvalidParameter { name: "xtol", value: xtol, reason: "must be positive" });
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = g(a);
    let mut fb = g(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::InvalidBracket { lo, hi, g_lo: fa, g_hi: fb });
    }

    // `b` is the best estimate, `c` the contrapoint, `a` the previous iterate.
    let (mut c, mut fc) = (a, fa);
    let mut step = b - a;
    let mut prev_step = step;

    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            step = b - a;
            prev_step = step;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let tol1 = (0.5 * xtol).max(2.0 * f64::EPSILON * b.abs());
        let half_gap = 0.5 * (c - b);
        if half_gap.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }

        if prev_step.abs() >= tol1 && fa.abs() > fb.abs() {
            // Secant through (a, fa), (b, fb).
            let s = fb / fa;
            let mut p = 2.0 * half_gap * s;
            let mut q = 1.0 - s;
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * half_gap * q - (tol1 * q).abs()).min((prev_step * q).abs()) {
                prev_step = step;
                step = p / q;
            } else {
                step = half_gap;
                prev_step = step;
            }
        } else {
            step = half_gap;
            prev_step = step;
        }

        a = b;
        fa = fb;
        b += if step.abs() > tol1 { step } else { tol1.copysign(half_gap) };
        fb = g(b);
        if fb.is_nan() {
            return Err(Error::InvalidBracket { lo, hi, g_lo: fa, g_hi: fb });
        }
    }
    Err(Error::RootIterations { iterations: MAX_ITERATIONS, width: (c - b).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn linear_root() {
        let x = find_root_bracketed(|x| x - 1.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((x - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn cube_root_of_two() {
        let x = find_root_bracketed(|x| x * x * x - 2.0, 1.0, 2.0, 1e-13).unwrap();
        assert!((x - 2f64.cbrt()).abs() <= 1e-13);
    }

    #[test]
    fn exact_endpoint_roots() {
        assert_eq!(find_root_bracketed(|x| x, 0.0, 1.0, 1e-9).unwrap(), 0.0);
        assert_eq!(find_root_bracketed(|x| x - 1.0, 0.0, 1.0, 1e-9).unwrap(), 1.0);
    }

    #[test]
    fn rejects_unbracketed() {
        let err = find_root_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-9).unwrap_err();
        assert!(matches!(err, Error::InvalidBracket { .. }));
    }

    #[test]
    fn flat_function_still_shrinks_bracket() {
        // Very flat near the root; secant steps stall, bisection must take over.
        let x = find_root_bracketed(|x: f64| (x - 0.3).powi(9), -1.0, 2.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn monotone_functions_meet_bracket_postcondition(root in -50.0f64..50.0, slope in 0.01f64..100.0, cubic in 0.0f64..5.0) {
            let g = |x: f64| slope * (x - root) + cubic * (x - root).powi(3);
            let xtol = 1e-10;
            let x = find_root_bracketed(g, root - 60.0, root + 70.0, xtol).unwrap();
            prop_assert!((x - root).abs() <= xtol + 4.0 * f64::EPSILON * root.abs());
        }
    }
}
