use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
// f64 math comes from std's inherent methods in test builds
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on ‖ψ‖₂ − 1 accepted when building a [`PureState`].
pub const NORM_TOL: f64 = 1e-12;

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexVector {
    amplitudes: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyDimension);
        }
        Ok(Self { amplitudes })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { amplitudes: vec![Complex64::new(0.0, 0.0); dim.max(1)] }
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// ⟨self|other⟩, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { amplitudes: self.amplitudes.iter().map(|a| a * factor).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { amplitudes: self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a - b).collect() }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self { amplitudes }
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.amplitudes[i]
    }
}

/// A unit vector in ℂⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexVector", into = "ComplexVector")]
pub struct PureState {
    vector: ComplexVector,
}

impl PureState {
    /// Wraps `vector`, rejecting it unless ‖vector‖₂ = 1 within [`NORM_TOL`].
    pub fn new(vector: ComplexVector) -> Result<Self> {
        let norm = vector.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { vector })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(vector: ComplexVector) -> Result<Self> {
        let norm = vector.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { vector: vector.scale(Complex64::new(1.0 / norm, 0.0)) })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::new(ComplexVector::new(amplitudes)?)
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.vector
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.vector.amplitudes()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { vector: self.vector.kron(&other.vector) }
    }

    /// Multiplies by the global phase e^{iφ}.
    pub fn with_phase(&self, phi: f64) -> Self {
        Self { vector: self.vector.scale(Complex64::from_polar(1.0, phi)) }
    }

    /// |⟨self|other⟩|², which is 1 exactly when the two rays coincide.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.vector.inner(&other.vector).norm_sqr()
    }

    /// Distance between the two rays: min over φ of ‖self − e^{iφ}·other‖₂.
    pub fn phase_distance(&self, other: &Self) -> f64 {
        let overlap = other.vector.inner(&self.vector);
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
        self.vector.sub(&other.vector.scale(phase)).norm()
    }

    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim() && self.phase_distance(other) <= tol
    }
}

impl TryFrom<ComplexVector> for PureState {
    type Error = Error;
    fn try_from(vector: ComplexVector) -> Result<Self> {
        Self::new(vector)
    }
}

impl From<PureState> for ComplexVector {
    fn from(state: PureState) -> Self {
        state.vector
    }
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries; the length must be a perfect square.
    pub fn from_row_major(data: Vec<Complex64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if dim * dim != data.len() {
            return Err(Error::NotSquare { len: data.len() });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        Self { dim: N, data: rows.iter().flat_map(|r| r.iter().copied()).collect() }
    }

    /// |v⟩⟨v|
    pub fn outer(v: &ComplexVector) -> Self {
        let n = v.dim();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "add dimension mismatch");
        Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "sub dimension mismatch");
        Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * factor).collect() }
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim, v.dim(), "apply dimension mismatch");
        let n = self.dim;
        let amplitudes = (0..n).map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum()).collect();
        ComplexVector { amplitudes }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "distance dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise |Mᵢⱼ − conj(Mⱼᵢ)|.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// (M + M†)/2
    pub fn hermitian_part(&self) -> Self {
        self.add(&self.adjoint()).scale(Complex64::new(0.5, 0.0))
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector { amplitudes: (0..self.dim).map(|i| self[(i, j)]).collect() }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_unnormalized_state() {
        let v = ComplexVector::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(PureState::new(v.clone()), Err(Error::NotNormalized { .. })));
        let s = PureState::normalized(v).unwrap();
        assert!((s.vector().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_vector_cannot_be_normalized() {
        assert!(PureState::normalized(ComplexVector::zeros(3)).is_err());
        assert!(ComplexVector::new(Vec::new()).is_err());
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let s = PureState::from_amplitudes(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let t = s.with_phase(1.234);
        assert!(s.phase_distance(&t) < 1e-15);
        let u = PureState::from_amplitudes(vec![c(0.8, 0.0), c(0.0, 0.6)]).unwrap();
        assert!(s.phase_distance(&u) > 0.1);
    }

    #[test]
    fn from_row_major_requires_square() {
        assert!(matches!(Matrix::from_row_major(vec![c(1.0, 0.0); 3]), Err(Error::NotSquare { len: 3 })));
        assert_eq!(Matrix::from_row_major(vec![c(1.0, 0.0); 9]).unwrap().dim(), 3);
    }

    #[test]
    fn kron_of_basis_vectors() {
        let zero = ComplexVector::from_real(&[1.0, 0.0]).unwrap();
        let one = ComplexVector::from_real(&[0.0, 1.0]).unwrap();
        let v = zero.kron(&one);
        assert_eq!(v.amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn state_json_is_list_of_pairs() {
        let s = PureState::from_amplitudes(vec![c(0.6, 0.0), c(0.0, -0.8)]).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "[[0.6,0.0],[0.0,-0.8]]");
        let back: PureState = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<PureState>("[[1.0,0.0],[1.0,0.0]]").is_err());
    }
}
