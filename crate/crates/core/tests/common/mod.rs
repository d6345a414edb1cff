#![allow(dead_code)]

use matpoly_core::linalg::{c64, identity};
use matpoly_core::oracle::{random_regular, PlantedSpectrum};
use matpoly_core::{fixtures, ComplexMatrix, MatrixPolynomial, Tolerance, C64};
use proptest::test_runner::{Config, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn tol() -> Tolerance {
    Tolerance::default()
}

/// Proptest configuration with a pinned RNG seed.
pub fn seeded(seed: u64, cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// A matrix close to the identity, hence comfortably invertible.
pub fn random_gauge(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    identity(n) + random_matrix(rng, n, n) * c64(0.3)
}

pub fn random_point(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    C64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius))
}

pub fn shape(seed: u64) -> (usize, usize) {
    let mut r = rng(seed.wrapping_mul(0x9e37_79b9));
    (r.gen_range(1..=3), r.gen_range(1..=3))
}

pub fn planted(seed: u64) -> (MatrixPolynomial, PlantedSpectrum) {
    let (n, k) = shape(seed);
    let plan = PlantedSpectrum::random(n, k, seed);
    let (p, _) = random_regular(&plan).expect("feasible plan");
    (p, plan)
}

pub fn planted_semisimple(seed: u64) -> (MatrixPolynomial, PlantedSpectrum) {
    let (n, k) = shape(seed);
    let plan = PlantedSpectrum::semisimple(n, k, seed);
    let (p, _) = random_regular(&plan).expect("feasible plan");
    (p, plan)
}

pub fn examples() -> Vec<MatrixPolynomial> {
    vec![
        fixtures::example3(),
        fixtures::example4(),
        fixtures::example5(),
        fixtures::example6(),
    ]
}
