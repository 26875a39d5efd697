//! Seed-reproducible sampling of the bivariate normal pair, of products and
//! of their means.
//!
//! Standard normals come from the Box–Muller transform, one pair of uniforms
//! per pair of normals, which is exact in law. The bivariate draw is
//!
//! ```text
//! X = σ_X U,   Y = σ_Y (ρ U + sqrt(1 - ρ²) V)
//! ```
//!
//! with `(U, V)` the two outputs of one Box–Muller step, `U` first. Each
//! product therefore consumes exactly two standard normals, and `Z_1 … Z_n`
//! are drawn in order.
//!
//! Batches are cut into chunks of [`CHUNK_SIZE`] draws. Chunk `i` uses a
//! ChaCha20 stream seeded with `seed` (via `SeedableRng::seed_from_u64`)
//! and stream id `i`, so a batch is identical whether its chunks run in
//! parallel or sequentially.

use std::f64::consts::TAU;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::distribution::ProductNormalParams;
use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};

/// Draws per independent random stream inside a batch.
pub const CHUNK_SIZE: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed(pub u64);

/// i.i.d. draws of `Z̄` along with what produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub params: ProductNormalParams,
    pub seed: Seed,
    pub values: Vec<f64>,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The random stream for chunk `index` of a batch seeded with `seed`.
pub fn stream(seed: Seed, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed.0);
    rng.set_stream(index);
    rng
}

/// Uniform on `[0, 1)` with 53 random bits.
fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Two independent standard normals via Box–Muller.
pub fn standard_normal_pair<R: RngCore + ?Sized>(rng: &mut R) -> (f64, f64) {
    // 1 - u lies in (0, 1], keeping the logarithm finite.
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (TAU * u2).sin_cos();
    (r * c, r * s)
}

/// One draw of the zero-mean bivariate normal with the given standard
/// deviations and correlation.
pub fn sample_bivariate<R: Rng + ?Sized>(sigma_x: f64, sigma_y: f64, rho: f64, rng: &mut R) -> (f64, f64) {
    debug_assert!(sigma_x > 0.0 && sigma_y > 0.0 && rho > -1.0 && rho < 1.0);
    let (u, v) = standard_normal_pair(rng);
    let x = sigma_x * u;
    let y = sigma_y * (rho * u + ((1.0 - rho) * (1.0 + rho)).sqrt() * v);
    (x, y)
}

/// One draw of `Z̄`, the mean of `n` independent products.
pub fn sample_mean<R: Rng + ?Sized>(params: &ProductNormalParams, rng: &mut R) -> f64 {
    let mut sum = 0.0;
    for _ in 0..params.n() {
        let (x, y) = sample_bivariate(params.sigma_x(), params.sigma_y(), params.rho(), rng);
        sum += x * y;
    }
    sum / f64::from(params.n())
}

/// `count` draws of `Z̄`, deterministic in `(params, count, seed)`.
pub fn sample_batch(params: &ProductNormalParams, count: usize, seed: Seed) -> Result<SampleBatch> {
    sample_batch_with(params, count, seed, Execution::default())
}

pub fn sample_batch_with(
    params: &ProductNormalParams,
    count: usize,
    seed: Seed,
    exec: Execution,
) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::InvalidParameter { name: "count", value: 0.0, reason: "must be at least 1" });
    }
    let chunks = count.div_ceil(CHUNK_SIZE);
    let parts = map_range(exec, chunks, |i| {
        let len = CHUNK_SIZE.min(count - i * CHUNK_SIZE);
        let mut rng = stream(seed, i as u64);
        (0..len).map(|_| sample_mean(params, &mut rng)).collect::<Vec<f64>>()
    });
    Ok(SampleBatch { params: *params, seed, values: parts.concat() })
}
