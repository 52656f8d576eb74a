//! Seeded random streams and random test objects.
//!
//! Every randomized procedure derives its generator from a `(seed, index)`
//! pair through [`substream`], so a trial's randomness does not depend on how
//! trials are scheduled across threads.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::opalg::{ComplexVector, HermitianOperator, Matrix, PureState};

/// Independent ChaCha8 stream number `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-random pure state in dimension `dim`.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| complex_normal(rng)).collect();
        if let Ok(state) = ComplexVector::new(v).and_then(PureState::normalized) {
            return state;
        }
    }
}

/// Haar-random unitary: Gram-Schmidt on a complex Gaussian matrix.
/// Column `k` is the k-th basis vector.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    let mut columns: Vec<ComplexVector> = Vec::with_capacity(dim);
    while columns.len() < dim {
        let mut v = ComplexVector::new((0..dim).map(|_| complex_normal(rng)).collect()).expect("dim >= 1");
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for u in &columns {
                let overlap = u.inner(&v);
                v = v.sub(&u.scale(overlap));
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            columns.push(v.scale(Complex64::new(1.0 / norm, 0.0)));
        }
    }
    let mut u = Matrix::zeros(dim);
    for (j, col) in columns.iter().enumerate() {
        for i in 0..dim {
            u[(i, j)] = col[i];
        }
    }
    u
}

/// U·diag(eigenvalues)·U†, the observable diagonal in the basis given by the
/// columns of `basis`.
pub fn operator_in_basis(basis: &Matrix, eigenvalues: &[f64]) -> HermitianOperator {
    assert_eq!(basis.dim(), eigenvalues.len(), "basis and spectrum sizes differ");
    let m = basis.matmul(&Matrix::from_diagonal(eigenvalues)).matmul(&basis.adjoint());
    HermitianOperator::from_hermitian_part(m)
}

/// Small-integer spectrum in `[-range, range]`, so degeneracies are common.
pub fn random_integer_spectrum<R: Rng + ?Sized>(dim: usize, range: i32, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| f64::from(rng.random_range(-range..=range))).collect()
}

/// Random observable: a random integer spectrum in a Haar-random basis.
pub fn random_observable<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    let basis = random_unitary(dim, rng);
    let spectrum = random_integer_spectrum(dim, 2, rng);
    operator_in_basis(&basis, &spectrum)
}

/// Gaussian-unitary-ensemble matrix (almost surely nondegenerate).
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    let mut m = Matrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = complex_normal(rng);
        }
    }
    HermitianOperator::from_hermitian_part(m)
}

/// Uniform angle in [0, 2π).
pub fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>() * core::f64::consts::TAU
}
