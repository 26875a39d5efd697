//! Gamma and modified Bessel functions for the orders the density needs.
//!
//! Only integer and half-integer orders are supported. `K_ν` is built from
//! a base pair (`K_0, K_1` or `K_{1/2}, K_{3/2}`) by upward recurrence, which
//! is stable for `K`. The exponentially scaled `e^x K_ν(x)` is the primitive;
//! the unscaled function is derived from it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::integrate_adaptive;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;
/// Below this argument the ascending series is used for `K_0, K_1`.
const SERIES_CROSSOVER: f64 = 2.0;
const SERIES_REL_EPS: f64 = 1e-17;
const SERIES_MAX_TERMS: usize = 500;
const CF_MAX_ITERATIONS: usize = 100_000;

/// Order of a modified Bessel function, restricted to multiples of 1/2.
///
/// Stores `2ν` so both integer and half-integer orders are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BesselOrder {
    twice_nu: u32,
}

impl BesselOrder {
    pub const ZERO: BesselOrder = BesselOrder { twice_nu: 0 };
    pub const HALF: BesselOrder = BesselOrder { twice_nu: 1 };

    pub const fn from_twice(twice_nu: u32) -> Self {
        BesselOrder { twice_nu }
    }

    /// Order `ν` from a real value; it must be a non-negative multiple of 1/2.
    pub fn new(nu: f64) -> Result<Self> {
        let twice = 2.0 * nu;
        if !(nu >= 0.0) || twice.fract() != 0.0 || twice > f64::from(u32::MAX) {
            return Err(Error::InvalidParameter {
                name: "nu",
                value: nu,
                reason: "order must be a non-negative integer or half-integer",
            });
        }
        Ok(BesselOrder { twice_nu: twice as u32 })
    }

    /// The order `(n - 1) / 2` attached to the mean of `n` products.
    pub fn for_sample_size(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter { name: "n", value: 0.0, reason: "must be at least 1" });
        }
        Ok(BesselOrder { twice_nu: n - 1 })
    }

    pub const fn twice_nu(self) -> u32 {
        self.twice_nu
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice_nu) / 2.0
    }

    pub const fn is_half_integer(self) -> bool {
        self.twice_nu % 2 == 1
    }

    /// The order one higher.
    pub const fn succ(self) -> Self {
        BesselOrder { twice_nu: self.twice_nu + 2 }
    }
}

/// Natural logarithm of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(Error::Domain { function: "ln_gamma", value: x, reason: "requires 0 < x < inf" });
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

fn require_positive(function: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain { function, value: x, reason: "requires x > 0" })
    }
}

/// `e^x K_ν(x)` for `x > 0`.
pub fn bessel_k_scaled(nu: BesselOrder, x: f64) -> Result<f64> {
    require_positive("bessel_k_scaled", x)?;
    Ok(k_scaled_unchecked(nu, x))
}

/// `K_ν(x)` for `x > 0`. Underflows to zero for `x` beyond roughly 745.
pub fn bessel_k(nu: BesselOrder, x: f64) -> Result<f64> {
    require_positive("bessel_k", x)?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(k_scaled_unchecked(nu, x) * (-x).exp())
}

pub(crate) fn k_scaled_unchecked(nu: BesselOrder, x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    let (mut k_lo, mut k_hi) = k_base_pair_scaled(nu, x);

    // k_lo = K_mu, k_hi = K_{mu+1}; walk mu up to nu.
    let mut mu = if nu.is_half_integer() { 0.5 } else { 0.0 };
    let steps = nu.twice_nu() / 2;
    if steps == 0 {
        return k_lo;
    }
    for _ in 1..steps {
        let next = k_lo + (2.0 * (mu + 1.0) / x) * k_hi;
        k_lo = k_hi;
        k_hi = next;
        mu += 1.0;
    }
    k_hi
}

/// `ln(e^x K_ν(x))`, rescaling during the recurrence so that large orders at
/// small arguments do not overflow. Returns `+inf` only when `1/x` itself
/// overflows.
pub(crate) fn ln_k_scaled_unchecked(nu: BesselOrder, x: f64) -> f64 {
    if x.is_infinite() {
        return f64::NEG_INFINITY;
    }
    let (mut k_lo, mut k_hi) = k_base_pair_scaled(nu, x);
    let steps = nu.twice_nu() / 2;
    if steps == 0 {
        return k_lo.ln();
    }
    let mut ln_shift = 0.0;
    let mut mu = if nu.is_half_integer() { 0.5 } else { 0.0 };
    for _ in 1..steps {
        let factor = 2.0 * (mu + 1.0) / x;
        if !factor.is_finite() || !k_hi.is_finite() {
            return f64::INFINITY;
        }
        if k_hi > 1e280 / factor.max(1.0) {
            ln_shift += k_hi.ln();
            k_lo /= k_hi;
            k_hi = 1.0;
        }
        let next = k_lo + factor * k_hi;
        k_lo = k_hi;
        k_hi = next;
        mu += 1.0;
    }
    ln_shift + k_hi.ln()
}

/// `(K_mu, K_{mu+1})` scaled by `e^x`, with `mu = 0` or `mu = 1/2`.
fn k_base_pair_scaled(nu: BesselOrder, x: f64) -> (f64, f64) {
    if nu.is_half_integer() {
        let k_half = (PI / (2.0 * x)).sqrt();
        (k_half, k_half * (1.0 + 1.0 / x))
    } else if x <= SERIES_CROSSOVER {
        k01_series_scaled(x)
    } else {
        k01_continued_fraction_scaled(x)
    }
}

/// Ascending series for `K_0`, `K_1` (both scaled by `e^x`), valid for small `x`.
fn k01_series_scaled(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let ln_half = (0.5 * x).ln();

    let i0 = bessel_i_series(0.0, x);
    let i1 = bessel_i_series(1.0, x);

    // Σ_{k≥1} q^k / (k!)² H_k
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum0 = 0.0;
    for k in 1..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        let t = term * harmonic;
        sum0 += t;
        if t < SERIES_REL_EPS * sum0 {
            break;
        }
    }
    let k0 = -(ln_half + EULER_GAMMA) * i0 + sum0;

    // Σ_{k≥0} (ψ(k+1) + ψ(k+2)) q^k / (k!(k+1)!)
    let mut term = 1.0;
    let mut psi_k1 = -EULER_GAMMA;
    let mut psi_k2 = 1.0 - EULER_GAMMA;
    let mut sum1 = term * (psi_k1 + psi_k2);
    for k in 1..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        psi_k1 += 1.0 / kf;
        psi_k2 += 1.0 / (kf + 1.0);
        let t = term * (psi_k1 + psi_k2);
        sum1 += t;
        if t.abs() < SERIES_REL_EPS * sum1.abs() {
            break;
        }
    }
    let k1 = 1.0 / x + ln_half * i1 - 0.25 * x * sum1;

    let ex = x.exp();
    (k0 * ex, k1 * ex)
}

/// Steed's continued fraction (Temme's CF2) for `K_0`, `K_1`, scaled by `e^x`.
fn k01_continued_fraction_scaled(x: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..CF_MAX_ITERATIONS {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON * 0.5 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

/// `I_ν(x)` by its ascending series for `x >= 0`. Saturates to `+inf` once
/// the result leaves the floating-point range (around `x ≈ 700`).
pub fn bessel_i(nu: BesselOrder, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain { function: "bessel_i", value: x, reason: "requires x >= 0" });
    }
    Ok(bessel_i_series(nu.value(), x))
}

fn bessel_i_series(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }
    let q = 0.25 * x * x;
    // (x/2)^ν / Γ(ν + 1)
    let lead = if nu == 0.0 { 1.0 } else { (nu * (0.5 * x).ln() - statrs::function::gamma::ln_gamma(nu + 1.0)).exp() };
    let mut term = lead;
    let mut sum = lead;
    for k in 1..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term < SERIES_REL_EPS * sum || !sum.is_finite() {
            break;
        }
    }
    sum
}

/// `e^x K_ν(x)` from the defining integral
/// `∫_0^∞ exp(-x (cosh t - 1)) cosh(ν t) dt`, evaluated by adaptive
/// quadrature to relative tolerance `tol`.
///
/// Independent of the series/continued-fraction code paths; intended as a
/// reference, not for speed.
pub fn bessel_k_scaled_integral_oracle(nu: BesselOrder, x: f64, tol: f64) -> Result<f64> {
    require_positive("bessel_k_integral_oracle", x)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", value: tol, reason: "must be positive" });
    }
    let order = nu.value();
    // cosh t - 1 = 2 sinh²(t/2), avoiding cancellation near t = 0.
    let integrand = move |t: f64| {
        let s = (0.5 * t).sinh();
        (-2.0 * x * s * s).exp() * (order * t).cosh()
    };

    // Truncate where the log-integrand (with cosh(νt) ≤ e^{νt}) has fallen
    // below ln(tol·1e-3).
    let target = (1e3 / tol).ln();
    let log_decay = |t: f64| 2.0 * x * (0.5 * t).sinh().powi(2) - order * t;
    let mut upper = 1.0;
    while log_decay(upper) < target {
        upper *= 1.5;
    }

    // Relative tolerance: refine the absolute target from the previous estimate.
    let mut estimate = crate::numerics::gauss_legendre5(integrand, 0.0, upper).abs().max(f64::MIN_POSITIVE);
    for _ in 0..4 {
        let abs_tol = 0.25 * tol * estimate;
        let r = integrate_adaptive(integrand, 0.0, upper, abs_tol)?;
        let converged = r.error_estimate <= 0.25 * tol * r.value.abs();
        estimate = r.value;
        if converged {
            break;
        }
    }
    Ok(estimate)
}

/// `K_ν(x)` from its defining integral; see [`bessel_k_scaled_integral_oracle`].
pub fn bessel_k_integral_oracle(nu: BesselOrder, x: f64, tol: f64) -> Result<f64> {
    Ok(bessel_k_scaled_integral_oracle(nu, x, tol)? * (-x).exp())
}
