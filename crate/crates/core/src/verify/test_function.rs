use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::numerics::finite_diff_derivatives;
use crate::sampling::{stream, Seed};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Why the moments `E|f(Z̄)|, E|Z̄ f(Z̄)|, E|f'(Z̄)|, E|Z̄ f'(Z̄)|, E|Z̄ f''(Z̄)|`
/// are finite. `Z̄` has exponential tails, so polynomial growth suffices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Growth {
    /// `|f|, |f'|, |f''|` bounded by a polynomial times `exp(-x²/2)`.
    GaussianDamped,
    /// `|f|, |f'|, |f''|` bounded by a polynomial of the given degree.
    Polynomial { degree: u32 },
}

/// A twice differentiable function with its first two derivatives.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    growth: Growth,
    f: RealFn,
    f1: RealFn,
    f2: RealFn,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction").field("name", &self.name).field("growth", &self.growth).finish()
    }
}

/// `c x^p`, with the convention that a zero coefficient kills the term even
/// where `x^p` is singular.
fn term(c: f64, x: f64, p: i32) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * x.powi(p)
    }
}

impl TestFunction {
    pub fn custom<F, F1, F2>(name: impl Into<String>, growth: Growth, f: F, f1: F1, f2: F2) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        F1: Fn(f64) -> f64 + Send + Sync + 'static,
        F2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        TestFunction { name: name.into(), growth, f: Arc::new(f), f1: Arc::new(f1), f2: Arc::new(f2) }
    }

    /// `x^k exp(-x²/2)`.
    pub fn damped_monomial(k: u32) -> Self {
        let p = k as i32;
        let kf = f64::from(k);
        TestFunction::custom(
            format!("f{k}"),
            Growth::GaussianDamped,
            move |x| term(1.0, x, p) * (-0.5 * x * x).exp(),
            move |x| (term(kf, x, p - 1) - term(1.0, x, p + 1)) * (-0.5 * x * x).exp(),
            move |x| {
                (term(kf * (kf - 1.0), x, p - 2) - term(2.0 * kf + 1.0, x, p) + term(1.0, x, p + 2))
                    * (-0.5 * x * x).exp()
            },
        )
    }

    /// The six functions `x^k exp(-x²/2)`, `k = 0..=5`.
    pub fn damped_family() -> Vec<Self> {
        (0..=5).map(Self::damped_monomial).collect()
    }

    /// `x^k` without damping.
    pub fn monomial(k: u32) -> Self {
        let p = k as i32;
        let kf = f64::from(k);
        TestFunction::custom(
            format!("x^{k}"),
            Growth::Polynomial { degree: k },
            move |x| term(1.0, x, p),
            move |x| term(kf, x, p - 1),
            move |x| term(kf * (kf - 1.0), x, p - 2),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn growth(&self) -> Growth {
        self.growth
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn first(&self, x: f64) -> f64 {
        (self.f1)(x)
    }

    pub fn second(&self, x: f64) -> f64 {
        (self.f2)(x)
    }

    /// Largest relative mismatch between the supplied derivatives and
    /// central differences of `f`, over the given points.
    pub fn derivative_mismatch(&self, points: &[f64]) -> f64 {
        let h = 1e-4;
        points
            .iter()
            .map(|&x| {
                let (d1, d2) = finite_diff_derivatives(|t| self.value(t), x, h);
                let e1 = (d1 - self.first(x)).abs() / self.first(x).abs().max(1e-2);
                let e2 = (d2 - self.second(x)).abs() / self.second(x).abs().max(1e-2);
                e1.max(e2)
            })
            .fold(0.0, f64::max)
    }

    /// Finite-difference consistency at 20 random points in `[-4, 4]`.
    pub fn derivatives_consistent(&self, seed: Seed) -> bool {
        let mut rng = stream(seed, 0);
        let points: Vec<f64> = (0..20).map(|_| rng.random_range(-4.0..4.0)).collect();
        self.derivative_mismatch(&points) <= 1e-4
    }
}
