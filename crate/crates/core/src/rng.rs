//! Seeded randomness helpers.
//!
//! Everything stochastic in this crate draws from ChaCha8 streams created
//! here, or from the splitmix-style integer mix below, so results are
//! bit-reproducible across platforms for a fixed seed.

use rand::RngExt;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stateless 64-bit mix (splitmix64 finalizer). Used to derive independent
/// streams from (seed, stream tag, index) without instantiating an RNG.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(stream) ^ mix64(index).rotate_left(17))
}

/// Standard normal via Box-Muller on ChaCha uniforms.
pub fn gaussian<R: RngExt>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        if u1 > f64::MIN_POSITIVE {
            return (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        }
    }
}

pub fn gaussian_vec<R: RngExt>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| gaussian(rng)).collect()
}
