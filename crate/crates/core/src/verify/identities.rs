//! Normalization, the Bessel integral identity, and sampler-vs-CDF checks.

use std::f64::consts::PI;

use crate::distribution::ProductNormalParams;
use crate::error::{Error, Result};
use crate::numerics::integrate_real_line;
use crate::sampling::{sample_batch, SampleBatch, Seed};
use crate::special::{ln_gamma, ln_k_scaled_unchecked, BesselOrder};

use super::stein::label;
use super::CheckReport;

pub const DEFAULT_NORMALIZATION_TOL: f64 = 1e-8;
pub const DEFAULT_BESSEL_IDENTITY_TOL: f64 = 1e-8;
/// Asymptotic 1% critical value of `√N · D` for the one-sample KS statistic.
pub const KS_CRITICAL_1PCT: f64 = 1.63;

/// Closed form of `∫ e^{βx} |x|^ν K_ν(|x|) dx = √π Γ(ν + 1/2) 2^ν / (1 - β²)^{ν + 1/2}`.
pub fn bessel_identity_rhs(nu: BesselOrder, beta: f64) -> f64 {
    let v = nu.value();
    (0.5 * PI.ln() + ln_gamma(v + 0.5).expect("nu + 1/2 > 0") + v * std::f64::consts::LN_2
        - (v + 0.5) * ((1.0 - beta) * (1.0 + beta)).ln())
    .exp()
}

/// Quadrature of `∫ e^{βx} |x|^ν K_ν(|x|) dx` against its closed form;
/// the estimate is the relative difference.
pub fn bessel_integral_identity_check(nu: BesselOrder, beta: f64, tol: f64) -> Result<CheckReport> {
    if !(beta.abs() < 1.0) {
        return Err(Error::Domain {
            function: "bessel_integral_identity_check",
            value: beta,
            reason: "requires |beta| < 1",
        });
    }
    let v = nu.value();
    let integrand = |x: f64| {
        let ax = x.abs();
        (beta * x - ax + v * ax.ln() + ln_k_scaled_unchecked(nu, ax)).exp()
    };
    let rhs = bessel_identity_rhs(nu, beta);
    let r = integrate_real_line(integrand, 0.0, 1.0 - beta.abs(), 1e-2 * tol * rhs)?;
    Ok(CheckReport::new(
        format!("bessel_identity[nu={v},beta={beta}]"),
        (r.value - rhs) / rhs,
        r.error_estimate / rhs,
        tol,
        0.0,
    ))
}

/// `∫ pdf - 1` by quadrature over the line, split at 0.
pub fn normalization_check(params: &ProductNormalParams, tol: f64) -> Result<CheckReport> {
    let dist = params.distribution();
    let r = integrate_real_line(|x| dist.pdf(x), params.mean(), params.tail_decay_rate(), 1e-2 * tol)?;
    Ok(CheckReport::new(format!("normalization{}", label(params)), r.value - 1.0, r.error_estimate, tol, 0.0))
}

/// One-sample Kolmogorov–Smirnov statistic from ascending samples and the
/// model CDF evaluated at them.
pub fn ks_statistic(sorted: &[f64], cdf_values: &[f64]) -> f64 {
    debug_assert_eq!(sorted.len(), cdf_values.len());
    let n = cdf_values.len() as f64;
    cdf_values
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// KS distance between the batch and `cdf(x / scale)` of the standardized law.
pub fn sampler_vs_cdf_on(batch: &SampleBatch) -> Result<CheckReport> {
    let (unit, scale) = batch.params.standardize();
    let mut xs: Vec<f64> = batch.values.iter().map(|v| v / scale).collect();
    xs.sort_unstable_by(f64::total_cmp);
    let cdf = unit.distribution().cdf_sorted(&xs)?;
    let d = ks_statistic(&xs, &cdf);
    let critical = KS_CRITICAL_1PCT / (xs.len() as f64).sqrt();
    Ok(CheckReport::new(format!("ks{}", label(&batch.params)), d, 0.0, critical, 0.0))
}

pub fn sampler_vs_cdf_check(params: &ProductNormalParams, count: usize, seed: Seed) -> Result<CheckReport> {
    if count < 100_000 {
        return Err(Error::InvalidParameter {
            name: "count",
            value: count as f64,
            reason: "the KS check needs at least 10^5 draws",
        });
    }
    sampler_vs_cdf_on(&sample_batch(params, count, seed)?)
}
