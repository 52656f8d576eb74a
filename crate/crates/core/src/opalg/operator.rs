use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use core::fmt;

use num_complex::Complex64;
use once_cell::race::OnceBox;

use super::matrix::{ComplexVector, Matrix, PureState};
use super::spectral::{default_degeneracy_tol, SpectralDecomposition};
use crate::error::{Error, Result};

/// Entrywise tolerance on M − M† accepted at construction.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Frobenius distance below which two unlabeled operators are the same observable.
pub const OPERATOR_EQ_TOL: f64 = 1e-10;

/// A Hermitian observable. The spectral decomposition at the default
/// degeneracy tolerance is computed on first use and cached.
pub struct HermitianOperator {
    matrix: Matrix,
    label: Option<String>,
    spectrum: OnceBox<Result<SpectralDecomposition>>,
}

impl HermitianOperator {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if matrix.dim() == 0 {
            return Err(Error::EmptyDimension);
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::new_unchecked(matrix))
    }

    /// Replaces `matrix` by its Hermitian part (M + M†)/2 without any check.
    /// Meant for matrices that are Hermitian up to rounding, e.g. U·D·U†.
    pub fn from_hermitian_part(matrix: Matrix) -> Self {
        Self::new_unchecked(matrix.hermitian_part())
    }

    fn new_unchecked(matrix: Matrix) -> Self {
        Self { matrix, label: None, spectrum: OnceBox::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new_unchecked(Matrix::identity(dim)).with_label("I")
    }

    pub fn from_diagonal(values: &[f64]) -> Self {
        Self::new_unchecked(Matrix::from_diagonal(values))
    }

    /// Σ λ·P over explicit (eigenvalue, projector) pairs.
    pub fn from_projectors<'a>(terms: impl IntoIterator<Item = (f64, &'a Matrix)>) -> Result<Self> {
        let mut acc: Option<Matrix> = None;
        for (value, p) in terms {
            let term = p.scale(Complex64::new(value, 0.0));
            acc = Some(match acc {
                Some(m) => m.add(&term),
                None => term,
            });
        }
        Self::new(acc.ok_or(Error::EmptyDimension)?)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// The label, or a placeholder for unlabeled operators.
    pub fn display_label(&self) -> String {
        self.label.clone().unwrap_or_else(|| String::from("<unlabeled>"))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Spectral decomposition at the default tolerance 1e−9·max(1, ‖A‖_F), cached.
    pub fn spectral(&self) -> Result<&SpectralDecomposition> {
        self.spectrum
            .get_or_init(|| {
                let tol = default_degeneracy_tol(self.matrix.frobenius_norm());
                Box::new(SpectralDecomposition::compute(&self.matrix, tol))
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Spectral decomposition with an explicit degeneracy tolerance (not cached).
    pub fn spectral_with_tol(&self, degeneracy_tol: f64) -> Result<SpectralDecomposition> {
        SpectralDecomposition::compute(&self.matrix, degeneracy_tol)
    }

    /// Kronecker product `self ⊗ other`; labels combine as `a⊗b`.
    pub fn tensor(&self, other: &Self) -> Self {
        let op = Self::new_unchecked(self.matrix.kron(&other.matrix));
        match (&self.label, &other.label) {
            (Some(a), Some(b)) => op.with_label(alloc::format!("{a}⊗{b}")),
            _ => op,
        }
    }

    /// Real multiple of the operator.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::new_unchecked(self.matrix.scale(Complex64::new(factor, 0.0)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self::new_unchecked(self.matrix.add(&other.matrix)))
    }

    /// ‖AB − BA‖_F
    pub fn commutator_norm(&self, other: &Self) -> Result<f64> {
        check_dims(self, other)?;
        let ab = self.matrix.matmul(&other.matrix);
        let ba = other.matrix.matmul(&self.matrix);
        Ok(ab.frobenius_distance(&ba))
    }

    /// True iff ‖AB − BA‖_F ≤ `tol`.
    pub fn commutes(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(self.commutator_norm(other)? <= tol)
    }

    /// Observable identity: labels when both carry one, else Frobenius distance ≤ 1e−10.
    pub fn same_observable(&self, other: &Self) -> bool {
        match (&self.label, &other.label) {
            (Some(a), Some(b)) => a == b,
            _ => self.dim() == other.dim() && self.matrix.frobenius_distance(&other.matrix) <= OPERATOR_EQ_TOL,
        }
    }

    /// ‖Aψ − λψ‖₂ for the Rayleigh quotient λ = ⟨ψ|A|ψ⟩; zero iff ψ is an eigenvector.
    pub fn eigen_residual(&self, psi: &PureState) -> Result<(f64, f64)> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi.dim() });
        }
        let a_psi = self.matrix.apply(psi.vector());
        let lambda = psi.vector().inner(&a_psi).re;
        let residual = a_psi.sub(&psi.vector().scale(Complex64::new(lambda, 0.0))).norm();
        Ok((lambda, residual))
    }
}

fn check_dims(a: &HermitianOperator, b: &HermitianOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(())
}

impl Clone for HermitianOperator {
    fn clone(&self) -> Self {
        let spectrum = OnceBox::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(Box::new(s.clone()));
        }
        Self { matrix: self.matrix.clone(), label: self.label.clone(), spectrum }
    }
}

impl fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermitianOperator").field("label", &self.label).field("matrix", &self.matrix).finish()
    }
}

/// Tensor product of two operators.
pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    a.tensor(b)
}

/// See [`HermitianOperator::commutes`].
pub fn commutes(a: &HermitianOperator, b: &HermitianOperator, tol: f64) -> Result<bool> {
    a.commutes(b, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// The Pauli matrix σ_axis.
pub fn pauli(axis: Axis) -> HermitianOperator {
    let (o, l, i) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
    let (rows, label) = match axis {
        Axis::X => ([[o, l], [l, o]], "σx"),
        Axis::Y => ([[o, -i], [i, o]], "σy"),
        Axis::Z => ([[l, o], [o, -l]], "σz"),
    };
    HermitianOperator::new_unchecked(Matrix::from_rows(rows)).with_label(label)
}

/// Computational basis vector |index⟩ in dimension `dim`.
pub fn basis_ket(dim: usize, index: usize) -> Result<PureState> {
    if dim == 0 {
        return Err(Error::EmptyDimension);
    }
    if index >= dim {
        return Err(Error::IndexOutOfRange { index, dim });
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    amplitudes[index] = Complex64::new(1.0, 0.0);
    PureState::new(ComplexVector::new(amplitudes)?)
}

/// Projector |ψ⟩⟨ψ| onto a basis ket, handy for spelling out operators in
/// projector form.
pub fn basis_projector(dim: usize, index: usize) -> Result<Matrix> {
    Ok(Matrix::outer(basis_ket(dim, index)?.vector()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_matrices() {
        let z = pauli(Axis::Z);
        assert_eq!(z.matrix().as_slice(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let y = pauli(Axis::Y);
        assert_eq!(y.matrix().as_slice(), &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let x = pauli(Axis::X);
        assert_eq!(x.matrix().as_slice(), &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn basis_ket_values_and_range() {
        let k = basis_ket(4, 0).unwrap();
        let expected: Vec<Complex64> = [1.0, 0.0, 0.0, 0.0].iter().map(|&v| c(v, 0.0)).collect();
        assert_eq!(k.amplitudes(), expected.as_slice());
        assert_eq!(basis_ket(4, 4), Err(Error::IndexOutOfRange { index: 4, dim: 4 }));
    }

    #[test]
    fn tensor_identities() {
        let i2 = HermitianOperator::identity(2);
        assert_eq!(i2.tensor(&i2).matrix(), &Matrix::identity(4));
        let zz = pauli(Axis::Z).tensor(&pauli(Axis::Z));
        assert_eq!(zz.matrix(), &Matrix::from_diagonal(&[1.0, -1.0, -1.0, 1.0]));
        assert_eq!(zz.label(), Some("σz⊗σz"));
    }

    #[test]
    fn yy_on_bell_state() {
        // σy|0⟩ = i|1⟩, σy|1⟩ = −i|0⟩, so σy⊗σy(|00⟩+|11⟩) = −(|00⟩+|11⟩).
        let yy = pauli(Axis::Y).tensor(&pauli(Axis::Y));
        let h = 1.0 / 2f64.sqrt();
        let bell = PureState::from_amplitudes(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap();
        let out = yy.matrix().apply(bell.vector());
        let diff = out.sub(&bell.vector().scale(c(-1.0, 0.0)));
        assert!(diff.norm() < 1e-15);
    }

    #[test]
    fn commutation_examples() {
        let i = HermitianOperator::identity(2);
        let (x, y, z) = (pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z));
        assert!(x.tensor(&i).commutes(&i.tensor(&x), 1e-12).unwrap());
        assert!(!x.commutes(&z, 1e-12).unwrap());
        assert!(x.tensor(&x).commutes(&y.tensor(&y), 1e-12).unwrap());
        assert!(matches!(x.commutes(&x.tensor(&x), 1e-12), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Matrix::from_rows([[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]]);
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn same_observable_by_label_or_matrix() {
        let a = pauli(Axis::X);
        let b = HermitianOperator::new(a.matrix().clone()).unwrap();
        assert!(a.same_observable(&b));
        assert!(!a.same_observable(&pauli(Axis::Z)));
    }

    #[test]
    fn spectrum_is_cached_and_survives_clone() {
        let z = pauli(Axis::Z);
        let first = z.spectral().unwrap() as *const _;
        let second = z.spectral().unwrap() as *const _;
        assert_eq!(first, second);
        let zc = z.clone();
        assert_eq!(zc.spectral().unwrap(), z.spectral().unwrap());
    }
}
