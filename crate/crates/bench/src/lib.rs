//! Seeded fixtures shared by the benchmarks.

use gptcheck_core::{EntangledEffect, EntangledState, Matrix, MatrixSet, Scalar, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::new(rng.gen_range(-2..=2), rng.gen_range(1..=3))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_rows((0..rows).map(|_| (0..cols).map(|_| small_rational(rng)).collect()).collect()).unwrap()
}

pub fn random_set(seed: u64, k: usize, d: usize) -> MatrixSet {
    let mut r = rng(seed);
    MatrixSet::new((0..k).map(|_| random_matrix(&mut r, d, d)).collect()).unwrap()
}

/// Column-stochastic matrices with entries `x / column sum`, `x` in `1..=4`.
pub fn stochastic_set(seed: u64, k: usize, d: usize) -> MatrixSet {
    let mut r = rng(seed);
    let mut one = || {
        let mut m = Matrix::zeros(d, d);
        for j in 0..d {
            let col: Vec<i64> = (0..d).map(|_| r.gen_range(1..=4)).collect();
            let total: i64 = col.iter().sum();
            for (i, x) in col.into_iter().enumerate() {
                m.set(i, j, Scalar::new(x, total));
            }
        }
        m
    };
    MatrixSet::new((0..k).map(|_| one()).collect()).unwrap()
}

pub fn teleport_instance(seed: u64, d: usize) -> (EntangledState, EntangledEffect, State) {
    let mut r = rng(seed);
    let omega = EntangledState::new(random_matrix(&mut r, d, d)).unwrap();
    let h = EntangledEffect::new(Scalar::new(1, 4), random_matrix(&mut r, d, d)).unwrap();
    let w = State::new((0..d).map(|_| small_rational(&mut r)).collect());
    (omega, h, w)
}
