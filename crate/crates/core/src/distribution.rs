//! Law of the mean `Z̄ = (Z_1 + … + Z_n) / n` of i.i.d. products `Z_i = X_i Y_i`,
//! where `(X_i, Y_i)` is a zero-mean bivariate normal pair with standard
//! deviations `σ_X, σ_Y` and correlation `ρ`.
//!
//! With `s = σ_X σ_Y`, `ν = (n - 1)/2` and `c = n / (s (1 - ρ²))` the density is
//!
//! ```text
//! p(x) = A |x|^ν exp(ρ c x) K_ν(c |x|),
//! A    = n^{(n+1)/2} 2^{(1-n)/2} / (s^{(n+1)/2} sqrt(π (1 - ρ²)) Γ(n/2)).
//! ```
//!
//! Everything is evaluated in log space using the exponentially scaled `K_ν`.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::numerics::{find_root_bracketed, gauss_legendre5, integrate_adaptive, truncation_half_width};
use crate::special::{ln_gamma, ln_k_scaled_unchecked, BesselOrder};

/// Absolute tolerance the CDF table truncation is designed for.
const CDF_TRUNCATION_TOL: f64 = 1e-12;
/// Per-panel quadrature tolerance for CDF evaluation.
const CDF_PANEL_TOL: f64 = 1e-13;
/// CDF anchors are spaced by this multiple of the tail length scale.
const ANCHOR_SPACING: f64 = 0.5;

/// Parameters `(n, σ_X, σ_Y, ρ)` of the law of `Z̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductNormalParams {
    n: u32,
    sigma_x: f64,
    sigma_y: f64,
    rho: f64,
}

impl ProductNormalParams {
    /// Validate and build a parameter set. `ρ = ±1` is rejected: the law
    /// then degenerates and has no density of this form.
    pub fn new(n: u32, sigma_x: f64, sigma_y: f64, rho: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter { name: "n", value: 0.0, reason: "must be at least 1" });
        }
        if !(sigma_x > 0.0 && sigma_x.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sigma_x",
                value: sigma_x,
                reason: "must be positive and finite",
            });
        }
        if !(sigma_y > 0.0 && sigma_y.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sigma_y",
                value: sigma_y,
                reason: "must be positive and finite",
            });
        }
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::InvalidParameter {
                name: "rho",
                value: rho,
                reason: "must lie in the open interval (-1, 1)",
            });
        }
        Ok(ProductNormalParams { n, sigma_x, sigma_y, rho })
    }

    /// Unit variances, `σ_X = σ_Y = 1`.
    pub fn unit(n: u32, rho: f64) -> Result<Self> {
        Self::new(n, 1.0, 1.0, rho)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn sigma_x(&self) -> f64 {
        self.sigma_x
    }

    pub fn sigma_y(&self) -> f64 {
        self.sigma_y
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `σ_X σ_Y`, the only way the variances enter the law.
    pub fn scale(&self) -> f64 {
        self.sigma_x * self.sigma_y
    }

    /// Bessel order `(n - 1) / 2`.
    pub fn order(&self) -> BesselOrder {
        BesselOrder::from_twice(self.n - 1)
    }

    /// Split into unit-variance parameters and the scale `σ_X σ_Y`, so that
    /// `Z̄(self)` has the law of `scale · Z̄(unit)`.
    pub fn standardize(&self) -> (ProductNormalParams, f64) {
        (ProductNormalParams { sigma_x: 1.0, sigma_y: 1.0, ..*self }, self.scale())
    }

    pub fn mean(&self) -> f64 {
        self.rho * self.scale()
    }

    pub fn variance(&self) -> f64 {
        let s = self.scale();
        s * s * (1.0 + self.rho * self.rho) / f64::from(self.n)
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Logarithm of the density prefactor `A`.
    pub fn ln_normalizing_constant(&self) -> f64 {
        let n = f64::from(self.n);
        let one_minus_rho2 = (1.0 - self.rho) * (1.0 + self.rho);
        0.5 * (n + 1.0) * n.ln() + 0.5 * (1.0 - n) * LN_2
            - 0.5 * (n + 1.0) * self.scale().ln()
            - 0.5 * (PI * one_minus_rho2).ln()
            - ln_gamma(0.5 * n).expect("n/2 > 0")
    }

    pub fn normalizing_constant(&self) -> f64 {
        self.ln_normalizing_constant().exp()
    }

    /// Decay rate of the slower tail, `n / (σ_X σ_Y (1 + |ρ|))`.
    pub fn tail_decay_rate(&self) -> f64 {
        f64::from(self.n) / (self.scale() * (1.0 + self.rho.abs()))
    }

    pub fn distribution(&self) -> ProductNormal {
        ProductNormal::new(*self)
    }
}

/// Cumulative probabilities at evenly spaced anchors, one of which is 0.
#[derive(Debug)]
struct CdfTable {
    first: f64,
    spacing: f64,
    values: Vec<f64>,
}

impl CdfTable {
    fn anchor(&self, j: usize) -> f64 {
        self.first + j as f64 * self.spacing
    }

    fn last(&self) -> f64 {
        self.anchor(self.values.len() - 1)
    }

    /// Panel index `j` with `anchor(j) <= x < anchor(j + 1)`, for x inside the table.
    fn panel(&self, x: f64) -> usize {
        let j = ((x - self.first) / self.spacing).floor() as usize;
        let mut j = j.min(self.values.len() - 2);
        // Guard against rounding in the division.
        while j > 0 && self.anchor(j) > x {
            j -= 1;
        }
        while j + 2 < self.values.len() && self.anchor(j + 1) <= x {
            j += 1;
        }
        j
    }
}

/// The distribution of `Z̄` for one parameter set.
#[derive(Debug)]
pub struct ProductNormal {
    params: ProductNormalParams,
    order: BesselOrder,
    ln_a: f64,
    /// `c = n / (s (1 - ρ²))`
    rate: f64,
    /// `ρ c`
    drift: f64,
    pdf_at_zero: f64,
    ln_pdf_at_zero: f64,
    table: OnceLock<Result<CdfTable>>,
}

/// `p(0) = n (1-ρ²)^{(n-2)/2} Γ((n-1)/2) / (2 s √π Γ(n/2))` for `n ≥ 2`, with the
/// gamma ratio over `√π` built by the recurrence `r(n+2) = r(n) (n-1)/n`
/// from `r(2) = 1`, `r(3) = 2/π`. Exact at `n = 2`.
fn density_at_zero(params: &ProductNormalParams) -> f64 {
    let n = params.n;
    let mut k = if n.is_multiple_of(2) { 2 } else { 3 };
    let mut r = if k == 2 { 1.0 } else { 2.0 / PI };
    while k < n {
        r *= f64::from(k - 1) / f64::from(k);
        k += 2;
    }
    let one_minus_rho2 = (1.0 - params.rho) * (1.0 + params.rho);
    let nf = f64::from(n);
    nf * one_minus_rho2.powf(0.5 * (nf - 2.0)) * r / (2.0 * params.scale())
}

impl Clone for ProductNormal {
    fn clone(&self) -> Self {
        ProductNormal::new(self.params)
    }
}

impl ProductNormal {
    pub fn new(params: ProductNormalParams) -> Self {
        let order = params.order();
        let ln_a = params.ln_normalizing_constant();
        let rate = f64::from(params.n) / (params.scale() * (1.0 - params.rho) * (1.0 + params.rho));
        let drift = params.rho * rate;
        let (pdf_at_zero, ln_pdf_at_zero) = if order == BesselOrder::ZERO {
            (f64::INFINITY, f64::INFINITY)
        } else if params.n <= 64 {
            let p0 = density_at_zero(&params);
            (p0, p0.ln())
        } else {
            // |x|^ν K_ν(c|x|) → 2^{ν-1} Γ(ν) / c^ν as x → 0.
            let nu = order.value();
            let ln_p0 = ln_a + (nu - 1.0) * LN_2 + ln_gamma(nu).expect("nu > 0") - nu * rate.ln();
            (ln_p0.exp(), ln_p0)
        };
        ProductNormal { params, order, ln_a, rate, drift, pdf_at_zero, ln_pdf_at_zero, table: OnceLock::new() }
    }

    pub fn params(&self) -> &ProductNormalParams {
        &self.params
    }

    pub fn mean(&self) -> f64 {
        self.params.mean()
    }

    pub fn variance(&self) -> f64 {
        self.params.variance()
    }

    pub fn normalizing_constant(&self) -> f64 {
        self.ln_a.exp()
    }

    /// Log-density. `+inf` at `x = 0` when `n = 1`, where the density
    /// diverges logarithmically.
    pub fn log_pdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x.is_infinite() {
            return f64::NEG_INFINITY;
        }
        if x == 0.0 {
            return self.ln_pdf_at_zero;
        }
        let abs_x = x.abs();
        let u = self.rate * abs_x;
        let ln_k_scaled = ln_k_scaled_unchecked(self.order, u);
        if ln_k_scaled.is_finite() {
            self.ln_a + self.order.value() * abs_x.ln() + self.drift * x - u + ln_k_scaled
        } else {
            // Subnormal argument: the small-argument limit is exact here.
            self.ln_pdf_at_zero + self.drift * x
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x == 0.0 {
            return self.pdf_at_zero;
        }
        self.log_pdf(x).exp()
    }

    fn table(&self) -> Result<&CdfTable> {
        self.table.get_or_init(|| self.build_table(Execution::default())).as_ref().map_err(Clone::clone)
    }

    fn build_table(&self, exec: Execution) -> Result<CdfTable> {
        let decay = self.params.tail_decay_rate();
        let half_width = truncation_half_width(decay, CDF_TRUNCATION_TOL);
        let spacing = ANCHOR_SPACING / decay;
        let k = (half_width / spacing).ceil() as usize;
        let first = -(k as f64) * spacing;
        let anchor = |j: usize| first + j as f64 * spacing;

        let masses = map_range(exec, 2 * k, |j| {
            integrate_adaptive(|t| self.pdf(t), anchor(j), anchor(j + 1), CDF_PANEL_TOL).map(|r| r.value)
        });
        let mut values = Vec::with_capacity(2 * k + 1);
        let mut acc = 0.0;
        values.push(acc);
        for m in masses {
            acc += m?;
            values.push(acc);
        }
        Ok(CdfTable { first, spacing, values })
    }

    /// `P(Z̄ <= x)`, accurate to about 1e-11 absolute.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Ok(f64::NAN);
        }
        let table = self.table()?;
        if x <= table.first {
            return Ok(0.0);
        }
        if x >= table.last() {
            return Ok(table.values[table.values.len() - 1].min(1.0));
        }
        let j = table.panel(x);
        let start = table.anchor(j);
        let partial = if x > start { integrate_adaptive(|t| self.pdf(t), start, x, CDF_PANEL_TOL)?.value } else { 0.0 };
        Ok((table.values[j] + partial).clamp(0.0, 1.0))
    }

    /// CDF at each point of an ascending slice. Consecutive points are
    /// integrated incrementally, so the output is nondecreasing.
    pub fn cdf_sorted(&self, xs: &[f64]) -> Result<Vec<f64>> {
        self.cdf_sorted_with(xs, Execution::default())
    }

    pub fn cdf_sorted_with(&self, xs: &[f64], exec: Execution) -> Result<Vec<f64>> {
        if xs.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::InvalidParameter {
                name: "xs",
                value: f64::NAN,
                reason: "points must be finite and sorted ascending",
            });
        }
        let table = self.table()?;
        let last_value = table.values[table.values.len() - 1].min(1.0);

        // Group points by panel: [below table] [panel 0] ... [above table].
        let lo_end = xs.partition_point(|&x| x <= table.first);
        let hi_start = xs.partition_point(|&x| x < table.last());
        let inside = &xs[lo_end..hi_start];
        let mut groups: Vec<(usize, &[f64])> = Vec::new();
        let mut rest = inside;
        while let Some(&x) = rest.first() {
            let j = table.panel(x);
            let upper = table.anchor(j + 1);
            let len = rest.partition_point(|&y| y < upper).max(1);
            groups.push((j, &rest[..len]));
            rest = &rest[len..];
        }

        let per_group = map_range(exec, groups.len(), |g| {
            let (j, points) = groups[g];
            let mut prev = table.anchor(j);
            let mut acc = table.values[j];
            let mut out = Vec::with_capacity(points.len());
            for &x in points {
                if x > prev {
                    acc += self.integrate_segment(prev, x)?;
                    prev = x;
                }
                out.push(acc.clamp(0.0, 1.0));
            }
            Ok::<_, Error>(out)
        });

        let mut result = Vec::with_capacity(xs.len());
        result.resize(lo_end, 0.0);
        let mut running: f64 = 0.0;
        for g in per_group {
            for v in g? {
                // Quadrature noise between an anchor value and the tail of the
                // previous panel must not break monotonicity.
                running = running.max(v);
                result.push(running);
            }
        }
        result.resize(xs.len(), last_value.max(running));
        Ok(result)
    }

    /// Mass on `[a, b]`, using a fixed rule when the segment is short and
    /// far from the non-analytic point 0.
    fn integrate_segment(&self, a: f64, b: f64) -> Result<f64> {
        let width = b - a;
        let clearance = a.abs().min(b.abs());
        let short = width <= ANCHOR_SPACING / (16.0 * self.params.tail_decay_rate());
        if short && a * b > 0.0 && width <= 0.25 * clearance {
            Ok(gauss_legendre5(|t| self.pdf(t), a, b))
        } else {
            Ok(integrate_adaptive(|t| self.pdf(t), a, b, CDF_PANEL_TOL)?.value)
        }
    }

    /// Smallest `x` with `cdf(x) = p`, for `0 < p < 1`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter { name: "p", value: p, reason: "must lie in (0, 1)" });
        }
        if self.params.rho == 0.0 {
            // Symmetric law: the median is 0 and upper quantiles mirror lower ones.
            if p == 0.5 {
                return Ok(0.0);
            }
            if p > 0.5 {
                return self.lower_quantile(1.0 - p).map(|x| -x);
            }
        }
        self.lower_quantile(p)
    }

    fn lower_quantile(&self, p: f64) -> Result<f64> {
        let mean = self.mean();
        let sd = self.params.std_dev();

        let mut k = 1.0;
        let mut lo = mean - sd;
        while self.cdf(lo)? > p {
            k *= 2.0;
            lo = mean - k * sd;
            if k > 1e6 {
                return Err(Error::BracketFailure { p });
            }
        }
        k = 1.0;
        let mut hi = mean + sd;
        while self.cdf(hi)? < p {
            k *= 2.0;
            hi = mean + k * sd;
            if k > 1e6 {
                return Err(Error::BracketFailure { p });
            }
        }

        let mut failure = None;
        let root = find_root_bracketed(
            |x| match self.cdf(x) {
                Ok(v) => v - p,
                Err(e) => {
                    failure = Some(e);
                    f64::NAN
                }
            },
            lo,
            hi,
            1e-12 * sd,
        );
        match (failure, root) {
            (Some(e), _) => Err(e),
            (None, r) => r,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{bessel_k, bessel_k_integral_oracle};
    use proptest::prelude::*;

    fn unit(n: u32, rho: f64) -> ProductNormal {
        ProductNormalParams::unit(n, rho).unwrap().distribution()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn laplace_n2(rho: f64, x: f64) -> f64 {
        (-2.0 * (x.abs() - rho * x) / (1.0 - rho * rho)).exp()
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(ProductNormalParams::new(0, 1.0, 1.0, 0.0).is_err());
        assert!(ProductNormalParams::new(1, 0.0, 1.0, 0.0).is_err());
        assert!(ProductNormalParams::new(1, 1.0, -2.0, 0.0).is_err());
        assert!(ProductNormalParams::new(1, 1.0, 1.0, 1.0).is_err());
        assert!(ProductNormalParams::new(1, 1.0, 1.0, -1.0).is_err());
        assert!(ProductNormalParams::new(1, 1.0, 1.0, f64::NAN).is_err());
        assert!(ProductNormalParams::new(1, f64::INFINITY, 1.0, 0.0).is_err());
    }

    #[test]
    fn n1_rho0_is_k0_over_pi() {
        let d = unit(1, 0.0);
        let k0 = bessel_k_integral_oracle(BesselOrder::ZERO, 1.0, 1e-13).unwrap();
        assert!(rel(d.pdf(1.0), k0 / PI) < 1e-12);
        assert_eq!(d.pdf(0.0), f64::INFINITY);
        assert_eq!(d.log_pdf(0.0), f64::INFINITY);
    }

    #[test]
    fn n2_reduces_to_asymmetric_laplace() {
        let d = unit(2, 0.3);
        assert!((d.pdf(0.0) - 1.0).abs() < 1e-14);
        for i in -10..=10 {
            let x = 0.37 * f64::from(i);
            assert!(rel(d.pdf(x), laplace_n2(0.3, x)) < 1e-12, "x = {x}");
        }
        let want = -2.0 * (2.0 + 0.3 * 2.0) / (1.0 - 0.09);
        assert!((d.log_pdf(-2.0) - want).abs() < 1e-12);
    }

    #[test]
    fn sign_flip_symmetry() {
        let p = unit(1, 0.5);
        let m = unit(1, -0.5);
        for &x in &[0.3, 1.7] {
            assert!(rel(p.pdf(x), m.pdf(-x)) < 1e-15);
        }
    }

    #[test]
    fn log_pdf_matches_pdf() {
        let d = unit(3, 0.4);
        for &x in &[-10.0, -1.0, -0.1, 0.1, 1.0, 10.0] {
            assert!(rel(d.log_pdf(x).exp(), d.pdf(x)) < 1e-12);
        }
    }

    #[test]
    fn log_pdf_far_tail_is_finite_with_unit_slope() {
        let d = unit(1, 0.0);
        let x = 300.0;
        let v = d.log_pdf(x);
        assert!(v.is_finite());
        let asymptotic = ((PI / (2.0 * x)).sqrt() / PI).ln() - x;
        assert!((v - asymptotic).abs() < 1e-3);
        let slope = (d.log_pdf(x + 1e-3) - d.log_pdf(x - 1e-3)) / 2e-3;
        assert!((slope + 1.0).abs() < 1e-2);
        assert!(d.log_pdf(1e6).is_finite());
    }

    #[test]
    fn normalizing_constant_values() {
        assert!(rel(unit(1, 0.0).normalizing_constant(), 1.0 / PI) < 1e-15);
        assert!(rel(unit(2, 0.0).normalizing_constant(), 2.0 / PI.sqrt()) < 1e-15);
        for n in [1, 2, 7, 50, 300] {
            let a = unit(n, -0.9).normalizing_constant();
            assert!(a > 0.0 && a.is_finite());
        }
    }

    #[test]
    fn density_at_zero_closed_form() {
        assert_eq!(ProductNormalParams::unit(2, 0.3).unwrap().distribution().pdf(0.0), 1.0);
        assert_eq!(ProductNormalParams::new(2, 2.0, 0.25, -0.7).unwrap().distribution().pdf(0.0), 2.0);
        for n in 2..=64 {
            let p = ProductNormalParams::new(n, 1.3, 0.6, 0.45).unwrap();
            let nu = p.order().value();
            let rate = f64::from(n) / (p.scale() * (1.0 - 0.45f64.powi(2)));
            let ln_p0 = p.ln_normalizing_constant() + (nu - 1.0) * LN_2 + ln_gamma(nu).unwrap() - nu * rate.ln();
            let got = p.distribution().pdf(0.0);
            assert!((got - ln_p0.exp()).abs() < 1e-12 * got, "n={n}");
        }
    }

    #[test]
    fn continuity_at_zero_for_n_at_least_two() {
        for n in [2, 3, 5, 10] {
            let d = unit(n, 0.3);
            let p0 = d.pdf(0.0);
            let gaps: Vec<f64> =
                [1e-4, 1e-6, 1e-8].iter().map(|&h| (d.pdf(h) - p0).abs().max((d.pdf(-h) - p0).abs())).collect();
            assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "n = {n}: {gaps:?}");
            assert!(gaps[2] < 1e-6 * p0);
        }
    }

    #[test]
    fn small_argument_fallback_is_continuous() {
        // Large order: K overflows close to 0 and the limit takes over.
        let d = unit(401, 0.2);
        let at_zero = d.log_pdf(0.0);
        assert!(at_zero.is_finite());
        assert!((d.log_pdf(1e-300) - at_zero).abs() < 1e-9);
        assert!((d.log_pdf(1e-9) - at_zero).abs() < 1e-3);
    }

    #[test]
    fn standardize_identity() {
        let p = ProductNormalParams::new(1, 2.0, 3.0, 0.5).unwrap();
        let (u, scale) = p.standardize();
        assert_eq!(scale, 6.0);
        assert_eq!((u.sigma_x(), u.sigma_y(), u.n(), u.rho()), (1.0, 1.0, 1, 0.5));
        let (d, du) = (p.distribution(), u.distribution());
        assert!(rel(d.pdf(1.2), du.pdf(0.2) / 6.0) < 1e-12);
        let unit_params = ProductNormalParams::unit(3, 0.1).unwrap();
        assert_eq!(unit_params.standardize(), (unit_params, 1.0));
    }

    #[test]
    fn moments() {
        let p = ProductNormalParams::unit(1, 0.0).unwrap();
        assert_eq!((p.mean(), p.variance()), (0.0, 1.0));
        let p = ProductNormalParams::new(4, 2.0, 3.0, 0.5).unwrap();
        assert!((p.mean() - 3.0).abs() < 1e-15);
        assert!((p.variance() - 11.25).abs() < 1e-12);
        let q = ProductNormalParams::new(4, 2.0, 3.0, -0.5).unwrap();
        assert_eq!(p.mean(), -q.mean());
    }

    #[test]
    fn cdf_values() {
        assert!((unit(1, 0.0).cdf(0.0).unwrap() - 0.5).abs() < 1e-10);
        assert!((unit(2, 0.3).cdf(0.0).unwrap() - 0.35).abs() < 1e-10);
        assert!((unit(1, 0.5).cdf(50.0).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(unit(1, 0.5).cdf(-1e4).unwrap(), 0.0);
        // n = 2 closed form for x < 0: (1-ρ)/2 · exp(2x/(1-ρ))
        let d = unit(2, 0.3);
        for &x in &[-3.0, -0.7, -0.01] {
            let want = 0.35 * (2.0 * x / 0.7f64).exp();
            assert!((d.cdf(x).unwrap() - want).abs() < 1e-11);
        }
    }

    #[test]
    fn cdf_sign_flip() {
        for &(n, rho) in &[(1u32, 0.3), (3, 0.8), (10, -0.3)] {
            let (p, m) = (unit(n, rho), unit(n, -rho));
            for &x in &[-1.3, -0.2, 0.05, 0.9] {
                let s = p.cdf(x).unwrap() + m.cdf(-x).unwrap();
                assert!((s - 1.0).abs() < 2e-9, "n={n} rho={rho} x={x}: {s}");
            }
        }
    }

    #[test]
    fn cdf_sorted_agrees_with_pointwise() {
        let d = unit(1, -0.3);
        let xs: Vec<f64> = (-400..=400).map(|i| f64::from(i) * 0.0137).collect();
        let bulk = d.cdf_sorted(&xs).unwrap();
        for (i, &x) in xs.iter().enumerate().step_by(37) {
            assert!((bulk[i] - d.cdf(x).unwrap()).abs() < 1e-11, "x = {x}");
        }
        assert!(bulk.windows(2).all(|w| w[0] <= w[1]));
        let seq = d.cdf_sorted_with(&xs, Execution::Sequential).unwrap();
        assert_eq!(bulk, seq);
        assert!(d.cdf_sorted(&[1.0, 0.0]).is_err());
        assert_eq!(d.cdf_sorted(&[-1e9, 1e9]).unwrap()[0], 0.0);
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(unit(1, 0.0).quantile(0.5).unwrap(), 0.0);
        let sym = unit(4, 0.0);
        assert_eq!(sym.quantile(0.9).unwrap(), -sym.quantile(0.1).unwrap());
        assert!(unit(2, 0.3).quantile(0.35).unwrap().abs() < 1e-9);
        let d = unit(3, -0.6);
        let x = d.quantile(d.cdf(1.234).unwrap()).unwrap();
        assert!((x - 1.234).abs() < 1e-6);
        assert!(d.quantile(0.0).is_err());
        assert!(d.quantile(1.0).is_err());
        assert!(d.quantile(f64::NAN).is_err());
    }

    #[test]
    fn pdf_positive_off_zero() {
        let d = unit(5, 0.8);
        for &x in &[-20.0, -1e-3, 1e-12, 3.0, 40.0] {
            assert!(d.pdf(x) > 0.0);
        }
        assert!(bessel_k(BesselOrder::ZERO, 1.0).unwrap() > 0.0);
    }

    proptest! {
        #[test]
        fn pdf_sign_flip_pointwise(n in 1u32..12, rho in -0.95f64..0.95, x in -8.0f64..8.0) {
            let (p, m) = (unit(n, rho), unit(n, -rho));
            let (a, b) = (p.log_pdf(x), m.log_pdf(-x));
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn scale_identity(n in 1u32..8, rho in -0.9f64..0.9, sx in 0.2f64..5.0, sy in 0.2f64..5.0, x in -10.0f64..10.0) {
            let p = ProductNormalParams::new(n, sx, sy, rho).unwrap();
            let (u, s) = p.standardize();
            let lhs = p.distribution().log_pdf(x);
            let rhs = u.distribution().log_pdf(x / s) - s.ln();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
        }
    }
}
