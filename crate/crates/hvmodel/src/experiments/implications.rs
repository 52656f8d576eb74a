use hvmodel_core::expr::implications_operators;
use hvmodel_core::model::{measure_at, predict_operator, HiddenState};
use hvmodel_core::opalg::{HermitianOperator, PureState};
use serde::Serialize;

use super::bell_psi_plus;
use crate::error::Result;

const VALUE_TOL: f64 = 1e-9;

/// Commonly quoted values for c < 0.5, M₁(B̂₁) = M₁(B̂₂) = M₁(Ĉ) = 1. The
/// ascending-eigenvalue rule does not reproduce them; the report only flags
/// the difference.
const REFERENCE: DirectValues = DirectValues { b1: 1.0, b2: 1.0, c: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectValues {
    pub b1: f64,
    pub b2: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PostCollapseValue {
    pub c: f64,
    pub b1: f64,
    pub b2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImplicationsReport {
    pub c: f64,
    pub state: PureState,
    /// M₁ of B̂₁, B̂₂, Ĉ at the same [ψ, c].
    pub direct: DirectValues,
    /// Eigenvector of Ĉ selected by the measured value.
    pub c_eigenvector: PureState,
    /// B̂₁, B̂₂ values read off the Ĉ eigenvector.
    pub deduced_b1: f64,
    pub deduced_b2: f64,
    pub b1_mismatch: bool,
    pub b2_mismatch: bool,
    /// Direct and deduced values disagree somewhere.
    pub non_fc: bool,
    /// M₂(B̂₁), M₂(B̂₂) after collapsing onto the Ĉ eigenvector, on a grid of c.
    pub post_collapse: Vec<PostCollapseValue>,
    pub post_collapse_consistent: bool,
    pub reference: DirectValues,
    pub matches_reference: bool,
}

/// The deduce-from-Ĉ example on (|10⟩ + |01⟩)/√2.
pub fn implications_demo(c: f64) -> Result<ImplicationsReport> {
    implications_demo_with(&bell_psi_plus(), c)
}

/// The deduce-from-Ĉ example on an arbitrary two-qubit state.
pub fn implications_demo_with(state: &PureState, c: f64) -> Result<ImplicationsReport> {
    let (b1, b2, c_op) = implications_operators();
    let hs = HiddenState::new(state.clone(), c)?;
    let direct = DirectValues {
        b1: predict_operator(&b1, &hs)?,
        b2: predict_operator(&b2, &hs)?,
        c: predict_operator(&c_op, &hs)?,
    };

    // Ĉ is nondegenerate, so the collapsed state is its eigenvector
    let (_, eigenvector) = measure_at(&c_op, &hs)?;
    let deduced_b1 = eigenvalue_on(&b1, &eigenvector)?;
    let deduced_b2 = eigenvalue_on(&b2, &eigenvector)?;
    let b1_mismatch = (direct.b1 - deduced_b1).abs() > VALUE_TOL;
    let b2_mismatch = (direct.b2 - deduced_b2).abs() > VALUE_TOL;

    let post_collapse = (1..100)
        .map(|k| {
            let c2 = k as f64 / 100.0;
            let next = HiddenState::new(eigenvector.clone(), c2)?;
            Ok(PostCollapseValue { c: c2, b1: predict_operator(&b1, &next)?, b2: predict_operator(&b2, &next)? })
        })
        .collect::<hvmodel_core::Result<Vec<_>>>()?;
    let post_collapse_consistent =
        post_collapse.iter().all(|p| (p.b1 - deduced_b1).abs() <= VALUE_TOL && (p.b2 - deduced_b2).abs() <= VALUE_TOL);

    Ok(ImplicationsReport {
        c,
        state: state.clone(),
        direct,
        c_eigenvector: eigenvector,
        deduced_b1,
        deduced_b2,
        b1_mismatch,
        b2_mismatch,
        non_fc: b1_mismatch || b2_mismatch,
        post_collapse,
        post_collapse_consistent,
        reference: REFERENCE,
        matches_reference: direct == REFERENCE,
    })
}

fn eigenvalue_on(op: &HermitianOperator, psi: &PureState) -> Result<f64> {
    let (lambda, residual) = op.eigen_residual(psi)?;
    if residual > VALUE_TOL {
        return Err(hvmodel_core::Error::NotAnEigenstate { residual }.into());
    }
    Ok(lambda)
}
