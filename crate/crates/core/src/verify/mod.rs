//! Numerical certification of the distribution's defining properties.
//!
//! Every check produces a [`CheckReport`]. Monte Carlo checks pass when the
//! estimate is within [`MC_SIGMAS`] standard errors of zero; quadrature checks
//! pass when the estimate is within an absolute (or relative, for the Bessel
//! identity) tolerance.

mod identities;
mod ode;
mod stein;
mod test_function;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distribution::ProductNormalParams;
use crate::error::Result;
use crate::exec::{map_range, map_slice, Execution};
use crate::sampling::{sample_batch, Seed, CHUNK_SIZE};
use crate::special::BesselOrder;

pub use identities::{
    bessel_identity_rhs, bessel_integral_identity_check, ks_statistic, normalization_check, sampler_vs_cdf_check,
    sampler_vs_cdf_on, DEFAULT_BESSEL_IDENTITY_TOL, DEFAULT_NORMALIZATION_TOL, KS_CRITICAL_1PCT,
};
pub use ode::{
    default_step, ode_check, ode_residual, ode_residual_terms, ode_residual_with, OdeResidual, DEFAULT_ODE_TOL,
};
pub use stein::{
    normal_stein_mc_check, stein_mc_check, stein_mc_check_with_operator, stein_mc_checks_on, stein_operator_normal,
    stein_operator_product, stein_quadrature_check, stein_quadrature_check_with_density, ProductSteinOperator,
};
pub use test_function::{Growth, TestFunction};

/// Pass band for Monte Carlo checks, in standard errors.
pub const MC_SIGMAS: f64 = 4.0;
pub const DEFAULT_STEIN_QUADRATURE_TOL: f64 = 1e-6;

/// Outcome of one verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub estimate: f64,
    pub uncertainty: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckReport {
    /// `passed = |estimate| <= max(tolerance, sigmas · uncertainty)`; NaN fails.
    pub fn new(name: impl Into<String>, estimate: f64, uncertainty: f64, tolerance: f64, sigmas: f64) -> Self {
        let bound = tolerance.max(sigmas * uncertainty);
        CheckReport { name: name.into(), estimate, uncertainty, tolerance, passed: estimate.abs() <= bound }
    }
}

/// Sample mean of `g` over `values` and its standard error. Partial sums are
/// formed per fixed-size chunk and combined in order, so the result does not
/// depend on the execution mode.
pub fn mean_and_standard_error<G>(exec: Execution, values: &[f64], g: G) -> (f64, f64)
where
    G: Fn(f64) -> f64 + Sync + Send,
{
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let chunks: Vec<&[f64]> = values.chunks(CHUNK_SIZE).collect();
    let mapped: Vec<Vec<f64>> = map_slice(exec, &chunks, |c| c.iter().map(|&x| g(x)).collect());
    let sum: f64 = map_range(exec, mapped.len(), |i| mapped[i].iter().sum::<f64>()).iter().sum();
    let mean = sum / n as f64;
    let ss: f64 =
        map_range(exec, mapped.len(), |i| mapped[i].iter().map(|y| (y - mean) * (y - mean)).sum::<f64>()).iter().sum();
    let var = if n > 1 { ss / (n - 1) as f64 } else { 0.0 };
    (mean, (var / n as f64).sqrt())
}

/// Sample variance of `values` and its standard error `√((m₄ - s⁴)/N)`.
pub fn variance_and_standard_error(exec: Execution, values: &[f64]) -> (f64, f64) {
    let (mean, _) = mean_and_standard_error(exec, values, |x| x);
    let n = values.len() as f64;
    let (m2, _) = mean_and_standard_error(exec, values, |x| (x - mean).powi(2));
    let (m4, _) = mean_and_standard_error(exec, values, |x| (x - mean).powi(4));
    let s2 = m2 * n / (n - 1.0);
    (s2, ((m4 - m2 * m2) / n).max(0.0).sqrt())
}

/// `(n, ρ) ∈ {1, 2, 3, 5, 10} × {0, ±0.3, ±0.8}` with unit variances.
pub fn acceptance_grid() -> Vec<ProductNormalParams> {
    let mut grid = Vec::with_capacity(25);
    for n in [1, 2, 3, 5, 10] {
        for rho in [0.0, 0.3, -0.3, 0.8, -0.8] {
            grid.push(ProductNormalParams::unit(n, rho).expect("grid parameters are valid"));
        }
    }
    grid
}

/// `(ν, β) ∈ {0, 1/2, 1, 3/2, 2} × {0, ±0.3, ±0.9}`.
pub fn bessel_identity_grid() -> Vec<(BesselOrder, f64)> {
    let mut grid = Vec::with_capacity(25);
    for twice in 0..=4 {
        for beta in [0.0, 0.3, -0.3, 0.9, -0.9] {
            grid.push((BesselOrder::from_twice(twice), beta));
        }
    }
    grid
}

/// Points at which the ODE residual is checked.
pub const ODE_POINTS: [f64; 6] = [-4.0, -1.0, -0.25, 0.25, 1.0, 4.0];

/// A group of checks runnable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Stein,
    Ode,
    Norm,
    Bessel,
    Ks,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Stein, Suite::Ode, Suite::Norm, Suite::Bessel, Suite::Ks];
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "stein" => Ok(Suite::Stein),
            "ode" => Ok(Suite::Ode),
            "norm" => Ok(Suite::Norm),
            "bessel" => Ok(Suite::Bessel),
            "ks" => Ok(Suite::Ks),
            other => Err(format!("unknown check suite `{other}` (expected stein, ode, norm, bessel or ks)")),
        }
    }
}

/// Run the selected suites over the acceptance grid.
///
/// Grid entry `i` draws its Monte Carlo batch with seed `seed + i`; the
/// Stein and KS suites share that batch.
pub fn run_battery(suites: &[Suite], count: usize, seed: Seed, exec: Execution) -> Result<Vec<CheckReport>> {
    let has = |s: Suite| suites.contains(&s);
    let grid = acceptance_grid();
    let family = TestFunction::damped_family();

    let per_params = map_range(exec, grid.len(), |i| -> Result<Vec<CheckReport>> {
        let params = &grid[i];
        let mut out = Vec::new();
        if has(Suite::Norm) {
            out.push(normalization_check(params, DEFAULT_NORMALIZATION_TOL)?);
        }
        if has(Suite::Ode) {
            for &x in &ODE_POINTS {
                out.push(ode_check(params, x, DEFAULT_ODE_TOL)?);
            }
        }
        if has(Suite::Stein) || has(Suite::Ks) {
            let batch = sample_batch(params, count, Seed(seed.0.wrapping_add(i as u64)))?;
            if has(Suite::Stein) {
                out.extend(stein_mc_checks_on(&batch, &family)?);
                for tf in &family {
                    out.push(stein_quadrature_check(params, tf, DEFAULT_STEIN_QUADRATURE_TOL)?);
                }
            }
            if has(Suite::Ks) {
                out.push(sampler_vs_cdf_on(&batch)?);
            }
        }
        Ok(out)
    });

    let mut reports = Vec::new();
    for r in per_params {
        reports.extend(r?);
    }
    if has(Suite::Bessel) {
        for r in map_slice(exec, &bessel_identity_grid(), |&(nu, beta)| {
            bessel_integral_identity_check(nu, beta, DEFAULT_BESSEL_IDENTITY_TOL)
        }) {
            reports.push(r?);
        }
    }
    Ok(reports)
}
