#![allow(dead_code)]

use gausskin_core::linalg::{expm, omega, symmetrize};
use gausskin_core::{iwasawa, Constants, GaussianState, HamiltonianSpec, SymplecticMatrix};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal by Box–Muller.
pub fn normal<R: Rng>(r: &mut R) -> f64 {
    let u1: f64 = r.gen_range(f64::EPSILON..1.0);
    let u2: f64 = r.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_matrix<R: Rng>(r: &mut R, rows: usize, cols: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| scale * normal(r))
}

pub fn random_symmetric<R: Rng>(r: &mut R, n: usize, scale: f64) -> DMatrix<f64> {
    symmetrize(&random_matrix(r, n, n, scale))
}

pub fn random_spd<R: Rng>(r: &mut R, n: usize, scale: f64, floor: f64) -> DMatrix<f64> {
    let m = random_matrix(r, n, n, scale);
    symmetrize(&(&m * m.transpose() + DMatrix::identity(n, n) * floor))
}

/// Product of exponentials of random Hamiltonian matrices.
pub fn random_symplectic<R: Rng>(r: &mut R, n: usize, factors: usize, scale: f64) -> SymplecticMatrix {
    let w = omega(n);
    let mut s = DMatrix::identity(2 * n, 2 * n);
    for _ in 0..factors {
        let k = random_symmetric(r, 2 * n, scale);
        let l = w.transpose() * k;
        s = expm(&l).unwrap() * s;
    }
    SymplecticMatrix::from_matrix(s).unwrap()
}

/// A squeezed coherent state built from a random symplectic propagator and random means.
pub fn random_state<R: Rng>(r: &mut R, n: usize) -> GaussianState {
    let s = random_symplectic(r, n, 3, 0.5);
    let f = iwasawa(&s).unwrap();
    let s2 = symmetrize(&(&f.s * &f.s));
    let q = DVector::from_fn(n, |_, _| normal(r));
    let p = DVector::from_fn(n, |_, _| normal(r));
    let alpha = r.gen_range(-10.0..10.0);
    GaussianState::from_parts(Constants::default(), r.gen_range(0.0..3.0), q, p, s2, f.g, alpha, 0.0).unwrap()
}

/// Constant-coefficient spec with positive definite `a`, `c` and a general `b`.
pub fn random_spec<R: Rng>(r: &mut R, n: usize) -> HamiltonianSpec {
    let a = random_spd(r, n, 0.6, 0.2);
    let c = random_spd(r, n, 0.6, 0.2);
    let b = random_matrix(r, n, n, 0.3);
    HamiltonianSpec::constant(&a, &b, &c).unwrap()
}

pub fn v(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}
