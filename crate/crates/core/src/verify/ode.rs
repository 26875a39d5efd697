//! Residual of the second-order ODE satisfied by the density (unit variances):
//!
//! ```text
//! (1 - ρ²) x p''(x) + ((2 - n)(1 - ρ²) - 2nρx) p'(x) + n(n(ρ - x) - 2ρ) p(x) = 0.
//! ```
//!
//! This is `n²` times the formal adjoint of the Stein operator in
//! [`super::stein`]. Both `x`-dependent coefficients are differentiated when
//! integrating by parts, which produces the `2 - n` and `-2ρ` terms. For
//! `n = 1, ρ = 0` it is Bessel's equation of order zero for `K_0(|x|)`.
//!
//! Derivatives come from central differences of the density, not from Bessel
//! derivative identities, so the check is independent of the `K_ν` layer.

use crate::distribution::ProductNormalParams;
use crate::error::{Error, Result};
use crate::numerics::finite_diff_derivatives;

use super::CheckReport;

pub const DEFAULT_ODE_TOL: f64 = 1e-5;

/// Raw residual together with the magnitude of its three terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeResidual {
    pub residual: f64,
    /// Sum of the absolute values of the three terms.
    pub scale: f64,
}

impl OdeResidual {
    pub fn relative(&self) -> f64 {
        self.residual.abs() / self.scale
    }
}

/// Default finite-difference step: `2e-4` times the smaller of `|x|` and
/// `(1 - |ρ|)/n`, the shortest length scale of the unit-variance density.
/// This balances truncation against rounding in the second difference.
pub fn default_step(n: u32, rho: f64, x: f64) -> f64 {
    2e-4 * x.abs().min((1.0 - rho.abs()) / f64::from(n))
}

/// ODE residual of an arbitrary density at `x`.
pub fn ode_residual_with(density: impl Fn(f64) -> f64, n: u32, rho: f64, x: f64, h: f64) -> Result<OdeResidual> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::Domain { function: "ode_residual", value: x, reason: "x must be finite and nonzero" });
    }
    if !(h > 0.0) || x.abs() <= 10.0 * h {
        return Err(Error::Domain {
            function: "ode_residual",
            value: x,
            reason: "requires |x| > 10h so the stencil avoids 0",
        });
    }
    let p = density(x);
    let (p1, p2) = finite_diff_derivatives(&density, x, h);
    let one_minus_rho2 = 1.0 - rho * rho;
    let n = f64::from(n);
    let t2 = one_minus_rho2 * x * p2;
    let t1 = ((2.0 - n) * one_minus_rho2 - 2.0 * n * rho * x) * p1;
    let t0 = n * (n * (rho - x) - 2.0 * rho) * p;
    Ok(OdeResidual { residual: t2 + t1 + t0, scale: t2.abs() + t1.abs() + t0.abs() })
}

/// Residual for the true density of `Z̄` (unit variances).
pub fn ode_residual_terms(params: &ProductNormalParams, x: f64, h: f64) -> Result<OdeResidual> {
    require_unit(params)?;
    let dist = params.distribution();
    ode_residual_with(|t| dist.pdf(t), params.n(), params.rho(), x, h)
}

/// Raw residual for the true density of `Z̄` (unit variances).
pub fn ode_residual(params: &ProductNormalParams, x: f64, h: f64) -> Result<f64> {
    Ok(ode_residual_terms(params, x, h)?.residual)
}

/// Relative residual at the default step; passes at `tol`.
pub fn ode_check(params: &ProductNormalParams, x: f64, tol: f64) -> Result<CheckReport> {
    let r = ode_residual_terms(params, x, default_step(params.n(), params.rho(), x))?;
    Ok(CheckReport::new(format!("ode[x={x}]{}", super::stein::label(params)), r.relative(), 0.0, tol, 0.0))
}

fn require_unit(params: &ProductNormalParams) -> Result<()> {
    if (params.scale() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter {
            name: "sigma_x * sigma_y",
            value: params.scale(),
            reason: "the ODE is stated for unit variances; standardize first",
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit(n: u32, rho: f64) -> ProductNormalParams {
        ProductNormalParams::unit(n, rho).unwrap()
    }

    #[test]
    fn true_density_satisfies_ode() {
        for &(n, rho, x) in &[(1, 0.0, 1.0), (4, 0.7, -2.5), (1, -0.8, 0.25), (10, 0.3, -4.0), (10, 0.8, -4.0)] {
            let r = ode_residual_terms(&unit(n, rho), x, default_step(n, rho, x)).unwrap();
            assert!(r.relative() <= DEFAULT_ODE_TOL, "n={n} rho={rho} x={x}: {}", r.relative());
        }
    }

    #[test]
    fn normal_impostor_fails() {
        let p = unit(2, 0.5);
        let (m, v) = (p.mean(), p.variance());
        let normal = |x: f64| (-(x - m) * (x - m) / (2.0 * v)).exp() / (2.0 * PI * v).sqrt();
        let r = ode_residual_with(normal, 2, 0.5, 1.0, default_step(2, 0.5, 1.0)).unwrap();
        assert!(r.relative() > 1e-2, "{}", r.relative());
    }

    #[test]
    fn halving_step_quarters_residual() {
        let p = unit(3, 0.4);
        let x = 1.3;
        let r1 = ode_residual(&p, x, 2e-2).unwrap().abs();
        let r2 = ode_residual(&p, x, 1e-2).unwrap().abs();
        let r3 = ode_residual(&p, x, 5e-3).unwrap().abs();
        for ratio in [r1 / r2, r2 / r3] {
            assert!((3.5..4.5).contains(&ratio), "{r1} {r2} {r3}");
        }
    }

    #[test]
    fn domain_errors() {
        let p = unit(1, 0.0);
        assert!(ode_residual(&p, 0.0, 1e-4).is_err());
        assert!(ode_residual(&p, 5e-4, 1e-4).is_err());
        let q = ProductNormalParams::new(1, 3.0, 1.0, 0.0).unwrap();
        assert!(ode_residual(&q, 1.0, 1e-4).is_err());
    }
}
