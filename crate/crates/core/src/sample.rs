//! Seeded random vector systems for property checks and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{pointedness_certificate, rank, IntVector};

/// Shape of the random systems drawn by [`random_pointed_system`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemShape {
    pub dims: std::ops::RangeInclusive<usize>,
    pub max_vectors: usize,
    pub entry_bound: i64,
}

impl Default for SystemShape {
    fn default() -> Self {
        SystemShape {
            dims: 1..=3,
            max_vectors: 6,
            entry_bound: 3,
        }
    }
}

/// A random full-rank pointed system of nonzero vectors, by rejection
/// sampling. Deterministic in `seed`.
pub fn random_pointed_system(seed: u64, shape: &SystemShape) -> Vec<IntVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = rng.random_range(shape.dims.clone());
    let n = rng.random_range(s..=shape.max_vectors.max(s));
    loop {
        let x: Vec<IntVector> = (0..n)
            .map(|_| loop {
                let c: Vec<i64> = (0..s)
                    .map(|_| rng.random_range(-shape.entry_bound..=shape.entry_bound))
                    .collect();
                if c.iter().any(|&e| e != 0) {
                    break IntVector::from_i64s(&c);
                }
            })
            .collect();
        if rank(&x) == s && pointedness_certificate(&x).is_some() {
            return x;
        }
    }
}

/// `count` systems from consecutive seeds.
pub fn random_systems(seed: u64, count: usize, shape: &SystemShape) -> Vec<Vec<IntVector>> {
    (0..count as u64)
        .map(|k| random_pointed_system(seed.wrapping_add(k), shape))
        .collect()
}
