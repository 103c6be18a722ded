//! Counter-based deterministic randomness.
//!
//! Every randomized routine takes an explicit seed and derives one
//! independent stream per trial index, so trials can be evaluated in any
//! order (or in parallel) with identical results.

use crate::algebra::{Multivector, VectorRn};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream for trial `counter` of the run seeded with `seed`.
pub fn stream(seed: u64, counter: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(counter);
    rng
}

/// Multivector with integer coefficients drawn uniformly from [-bound, bound].
pub fn small_int_multivector(rng: &mut ChaCha8Rng, n: usize, bound: i32) -> Multivector {
    let coeffs = (0..(1usize << n))
        .map(|_| rng.gen_range(-bound..=bound) as f64)
        .collect();
    Multivector::from_coeffs(n, coeffs).unwrap()
}

/// Multivector with coefficients uniform in [-1, 1].
pub fn uniform_multivector(rng: &mut ChaCha8Rng, n: usize) -> Multivector {
    let coeffs = (0..(1usize << n)).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    Multivector::from_coeffs(n, coeffs).unwrap()
}

/// Point with coordinates uniform in [lo, hi]^n.
pub fn uniform_point(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> VectorRn {
    VectorRn::new((0..n).map(|_| rng.gen_range(lo..=hi)).collect())
}

/// Nonzero point: resampled until the norm exceeds `min_norm`.
pub fn nonzero_point(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64, min_norm: f64) -> VectorRn {
    loop {
        let p = uniform_point(rng, n, lo, hi);
        if p.norm() > min_norm {
            return p;
        }
    }
}
