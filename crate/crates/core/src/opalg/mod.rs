//! Dense complex linear algebra for small Hilbert spaces: states, Hermitian
//! observables, Kronecker products, Pauli matrices and projector-valued
//! spectral decompositions.

mod matrix;
mod operator;
mod spectral;

pub use matrix::{ComplexVector, Matrix, PureState, NORM_TOL};
pub use operator::{
    basis_ket, basis_projector, commutes, pauli, tensor, Axis, HermitianOperator, HERMITIAN_TOL, OPERATOR_EQ_TOL,
};
pub use spectral::{default_degeneracy_tol, eigh, Branch, Eigen, SpectralDecomposition};

/// Spectral decomposition of `a` with an explicit degeneracy tolerance.
pub fn spectral(a: &HermitianOperator, degeneracy_tol: f64) -> crate::Result<SpectralDecomposition> {
    a.spectral_with_tol(degeneracy_tol)
}
