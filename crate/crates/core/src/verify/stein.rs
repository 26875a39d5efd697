//! Stein operators for the normal law and for `Z̄`, and their Monte Carlo
//! and quadrature checks.
//!
//! For unit variances the operator for `Z̄` is
//!
//! ```text
//! (A f)(x) = (1 - ρ²) x f''(x) / n² + (1/n)((1 - ρ²) + 2ρx) f'(x) + (ρ - x) f(x),
//! ```
//!
//! and `E[(A f)(Z̄)] = 0` for every admissible `f`. It follows from the
//! operator `(1 - ρ²) w f''(w) + (n(1 - ρ²) + 2ρw) f'(w) + (nρ - w) f(w)` of
//! `W = nZ̄` by substituting `f(w) = g(w/n)` and dividing by `n`; the `1/n²`
//! on the second-order term comes from the chain rule.

use crate::distribution::{ProductNormal, ProductNormalParams};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::numerics::integrate_real_line;
use crate::sampling::{sample_batch, standard_normal_pair, stream, SampleBatch, Seed};

use super::test_function::TestFunction;
use super::{mean_and_standard_error, CheckReport, MC_SIGMAS};

/// Stein operator of `Z̄` for unit variances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductSteinOperator {
    n: f64,
    rho: f64,
}

impl ProductSteinOperator {
    /// Requires `σ_X σ_Y = 1`; other parameter sets must be standardized first.
    pub fn new(params: &ProductNormalParams) -> Result<Self> {
        if (params.scale() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "sigma_x * sigma_y",
                value: params.scale(),
                reason: "the Stein operator is defined for unit variances; standardize first",
            });
        }
        Ok(ProductSteinOperator { n: f64::from(params.n()), rho: params.rho() })
    }

    /// The same operator with `ρ` replaced by `ρ + delta`. Only useful as a
    /// negative control: it no longer annihilates the law of `Z̄`.
    pub fn with_rho_offset(self, delta: f64) -> Self {
        ProductSteinOperator { rho: self.rho + delta, ..self }
    }

    pub fn apply(&self, tf: &TestFunction, x: f64) -> f64 {
        let one_minus_rho2 = 1.0 - self.rho * self.rho;
        one_minus_rho2 * x * tf.second(x) / (self.n * self.n)
            + (one_minus_rho2 + 2.0 * self.rho * x) / self.n * tf.first(x)
            + (self.rho - x) * tf.value(x)
    }
}

/// Pointwise value of the `Z̄` Stein operator (unit variances only).
pub fn stein_operator_product(params: &ProductNormalParams, tf: &TestFunction, x: f64) -> Result<f64> {
    Ok(ProductSteinOperator::new(params)?.apply(tf, x))
}

/// Pointwise value of the normal Stein operator `σ² f'(x) - (x - μ) f(x)`.
pub fn stein_operator_normal(mu: f64, sigma2: f64, tf: &TestFunction, x: f64) -> f64 {
    sigma2 * tf.first(x) - (x - mu) * tf.value(x)
}

fn mc_report(name: String, values: &[f64], g: impl Fn(f64) -> f64 + Sync + Send) -> CheckReport {
    let (mean, se) = mean_and_standard_error(Execution::default(), values, g);
    CheckReport::new(name, mean, se, MC_SIGMAS * se, MC_SIGMAS)
}

/// Stein MC checks for several test functions on one batch. The batch is
/// divided by `σ_X σ_Y` before the unit-variance operator is applied.
pub fn stein_mc_checks_on(batch: &SampleBatch, tfs: &[TestFunction]) -> Result<Vec<CheckReport>> {
    let (unit, scale) = batch.params.standardize();
    let op = ProductSteinOperator::new(&unit)?;
    let values: Vec<f64> = batch.values.iter().map(|v| v / scale).collect();
    Ok(tfs
        .iter()
        .map(|tf| mc_report(format!("stein_mc[{}]{}", tf.name(), label(&batch.params)), &values, |x| op.apply(tf, x)))
        .collect())
}

/// Average the operator over `count` draws of `Z̄`; passes when the mean is
/// within four standard errors of zero.
pub fn stein_mc_check(
    params: &ProductNormalParams,
    tf: &TestFunction,
    count: usize,
    seed: Seed,
) -> Result<CheckReport> {
    check_mc_count(count)?;
    let batch = sample_batch(params, count, seed)?;
    Ok(stein_mc_checks_on(&batch, std::slice::from_ref(tf))?.remove(0))
}

/// Same as [`stein_mc_check`] with a caller-supplied operator, e.g. a
/// perturbed one for a negative control.
pub fn stein_mc_check_with_operator(
    name: &str,
    batch: &SampleBatch,
    op: ProductSteinOperator,
    tf: &TestFunction,
) -> CheckReport {
    let scale = batch.params.scale();
    let values: Vec<f64> = batch.values.iter().map(|v| v / scale).collect();
    mc_report(name.to_string(), &values, |x| op.apply(tf, x))
}

/// Normal Stein identity `E[σ² f'(X) - (X - μ) f(X)] = 0` by Monte Carlo.
pub fn normal_stein_mc_check(mu: f64, sigma2: f64, tf: &TestFunction, count: usize, seed: Seed) -> Result<CheckReport> {
    check_mc_count(count)?;
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidParameter { name: "sigma2", value: sigma2, reason: "must be positive" });
    }
    let sigma = sigma2.sqrt();
    let mut rng = stream(seed, 0);
    let mut draws = Vec::with_capacity(count + 1);
    while draws.len() < count {
        let (a, b) = standard_normal_pair(&mut rng);
        draws.push(mu + sigma * a);
        draws.push(mu + sigma * b);
    }
    draws.truncate(count);
    Ok(mc_report(format!("normal_stein_mc[{}][mu={mu},sigma2={sigma2}]", tf.name()), &draws, |x| {
        stein_operator_normal(mu, sigma2, tf, x)
    }))
}

fn check_mc_count(count: usize) -> Result<()> {
    if count < 10_000 {
        return Err(Error::InvalidParameter {
            name: "count",
            value: count as f64,
            reason: "Monte Carlo checks need at least 10^4 draws",
        });
    }
    Ok(())
}

/// `∫ (A f)(x) p(x) dx` by quadrature; passes when `|value| <= tol`.
pub fn stein_quadrature_check(params: &ProductNormalParams, tf: &TestFunction, tol: f64) -> Result<CheckReport> {
    let op = ProductSteinOperator::new(params)?;
    let dist = ProductNormal::new(*params);
    stein_quadrature_check_with_density(
        format!("stein_quad[{}]{}", tf.name(), label(params)),
        op,
        tf,
        |x| dist.pdf(x),
        params.mean(),
        params.tail_decay_rate(),
        tol,
    )
}

/// [`stein_quadrature_check`] against an arbitrary density, which must decay
/// at least like `exp(-decay_rate |x - center|)`.
pub fn stein_quadrature_check_with_density(
    name: String,
    op: ProductSteinOperator,
    tf: &TestFunction,
    density: impl Fn(f64) -> f64,
    center: f64,
    decay_rate: f64,
    tol: f64,
) -> Result<CheckReport> {
    let r = integrate_real_line(|x| op.apply(tf, x) * density(x), center, decay_rate, 1e-2 * tol)?;
    Ok(CheckReport::new(name, r.value, r.error_estimate, tol, 0.0))
}

pub(crate) fn label(p: &ProductNormalParams) -> String {
    if p.scale() == 1.0 {
        format!("[n={},rho={}]", p.n(), p.rho())
    } else {
        format!("[n={},rho={},sigma_x={},sigma_y={}]", p.n(), p.rho(), p.sigma_x(), p.sigma_y())
    }
}
