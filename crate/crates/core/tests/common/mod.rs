#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shnr_core::ensembles::{gen_instance, EnsembleSpec, Family, Instance};
use shnr_core::{CMatrix, C64};

/// `(dim, rank, seed)` with `1 <= rank <= dim <= max_dim`.
pub fn shape(max_dim: usize) -> impl Strategy<Value = (usize, usize, u64)> {
    (1..=max_dim).prop_flat_map(|n| (Just(n), 1..=n, any::<u64>()))
}

pub fn instance(dim: usize, rank: usize, seed: u64, family: Family) -> Instance {
    let spec = EnsembleSpec { dim, rank, trials: 1, seed, family };
    gen_instance(&spec, 0).unwrap()
}

pub fn generic(dim: usize, rank: usize, seed: u64) -> Instance {
    instance(dim, rank, seed, Family::Generic)
}

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CMatrix::from_fn(rows, cols, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_vector(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

/// `||x - y||_F / max(1, ||y||_F)`.
pub fn rel(x: &CMatrix, y: &CMatrix) -> f64 {
    (x - y).frobenius_norm() / y.frobenius_norm().max(1.0)
}
