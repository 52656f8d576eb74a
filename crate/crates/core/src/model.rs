//! The hidden-variable model proper.
//!
//! A measurement event on observable `A = Σ a·P_a` (eigenvalues ascending)
//! with hidden variable `c ∈ (0, 1)` and state `ψ`:
//!
//! 1. `c` is drawn uniformly from the open unit interval,
//! 2. the outcome is the smallest `a` with `c ≤ Σ_{a' ≤ a} ‖P_{a'} ψ‖²`,
//! 3. the state collapses to `P_a ψ / ‖P_a ψ‖`.
//!
//! [`predict`] and [`update`] are pure. Randomness enters only through a
//! [`HiddenSource`], one draw per measurement event.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
// f64 math comes from std's inherent methods in test builds
#[allow(unused_imports)]
use num_traits::Float;
use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::{HermitianOperator, PureState, SpectralDecomposition};

/// Branch weights below this are treated as exactly zero.
pub const ZERO_WEIGHT: f64 = 1e-12;

/// Smallest cumulative total accepted before a decomposition is declared malformed.
pub const MIN_TOTAL_WEIGHT: f64 = 1.0 - 1e-8;

/// Quantum state together with the hidden variable of the next measurement event.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HiddenState {
    state: PureState,
    c: f64,
}

impl HiddenState {
    pub fn new(state: PureState, c: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::HiddenOutOfRange { c });
        }
        Ok(Self { state, c })
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn with_c(&self, c: f64) -> Result<Self> {
        Self::new(self.state.clone(), c)
    }

    pub fn with_state(&self, state: PureState) -> Self {
        Self { state, c: self.c }
    }

    pub fn into_state(self) -> PureState {
        self.state
    }
}

/// Uniform sample from the open interval (0, 1).
pub fn draw_hidden<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

/// Supplier of hidden-variable values, one per measurement event.
pub trait HiddenSource {
    fn next_hidden(&mut self) -> Result<f64>;
}

impl<R: Rng> HiddenSource for R {
    fn next_hidden(&mut self) -> Result<f64> {
        Ok(draw_hidden(self))
    }
}

/// Replays a fixed sequence of hidden-variable values.
#[derive(Debug, Clone)]
pub struct Injected {
    values: Vec<f64>,
    next: usize,
}

impl Injected {
    pub fn new(values: impl Into<Vec<f64>>) -> Self {
        Self { values: values.into(), next: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.values.len() - self.next
    }
}

impl HiddenSource for Injected {
    fn next_hidden(&mut self) -> Result<f64> {
        let c = *self.values.get(self.next).ok_or(Error::HiddenExhausted)?;
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::HiddenOutOfRange { c });
        }
        self.next += 1;
        Ok(c)
    }
}

/// Branch weights ‖P_a ψ‖² in ascending eigenvalue order, with weights below
/// [`ZERO_WEIGHT`] set to zero.
pub fn branch_weights(obs: &SpectralDecomposition, state: &PureState) -> Result<Vec<f64>> {
    if obs.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: obs.dim(), found: state.dim() });
    }
    Ok(obs
        .branches()
        .iter()
        .map(|b| {
            let w = b.weight(state.vector());
            if w < ZERO_WEIGHT {
                0.0
            } else {
                w
            }
        })
        .collect())
}

/// Index of the branch selected for `c`: the first whose cumulative weight
/// reaches `c`.
pub fn predict_branch(obs: &SpectralDecomposition, state: &PureState, c: f64) -> Result<usize> {
    let weights = branch_weights(obs, state)?;
    let total: f64 = weights.iter().sum();
    if total < MIN_TOTAL_WEIGHT {
        return Err(Error::MalformedDecomposition { total });
    }
    let mut cumulative = 0.0;
    for (i, w) in weights.iter().enumerate() {
        cumulative += w;
        if *w > 0.0 && c <= cumulative {
            return Ok(i);
        }
    }
    // c above a total that rounded just below 1: the last branch carrying weight.
    weights.iter().rposition(|&w| w > 0.0).ok_or(Error::MalformedDecomposition { total })
}

/// The value M(A, [ψ, c]) assigned by the model.
pub fn predict(obs: &SpectralDecomposition, hs: &HiddenState) -> Result<f64> {
    let i = predict_branch(obs, hs.state(), hs.c())?;
    Ok(obs.branches()[i].eigenvalue)
}

/// [`predict`] through the operator's cached spectral decomposition.
pub fn predict_operator(op: &HermitianOperator, hs: &HiddenState) -> Result<f64> {
    predict(op.spectral()?, hs)
}

/// Collapse P_a ψ / ‖P_a ψ‖ onto the branch with eigenvalue `value`.
pub fn update(obs: &SpectralDecomposition, hs: &HiddenState, value: f64) -> Result<PureState> {
    collapse(obs, hs.state(), value)
}

/// [`update`] without the hidden variable, which collapse does not use.
pub fn collapse(obs: &SpectralDecomposition, state: &PureState, value: f64) -> Result<PureState> {
    if obs.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: obs.dim(), found: state.dim() });
    }
    let branch = obs.branch_for(value).ok_or(Error::NotAnEigenvalue { value })?;
    let projected = branch.projector.apply(state.vector());
    let probability = projected.norm_sqr();
    if probability <= ZERO_WEIGHT {
        return Err(Error::ZeroProbabilityCollapse { value, probability });
    }
    PureState::new(projected.scale(Complex64::new(1.0 / probability.sqrt(), 0.0)))
}

/// One entry of a measurement sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    #[serde(rename = "label")]
    pub observable_label: String,
    #[serde(rename = "c")]
    pub c_used: f64,
    pub value: f64,
    pub pre_state: PureState,
    pub post_state: PureState,
}

/// Predicts and collapses at the hidden variable already held by `hs`.
/// Consumes no randomness.
pub fn measure_at(op: &HermitianOperator, hs: &HiddenState) -> Result<(MeasurementRecord, PureState)> {
    let sd = op.spectral()?;
    let value = predict(sd, hs)?;
    let post = update(sd, hs, value)?;
    let record = MeasurementRecord {
        observable_label: op.display_label(),
        c_used: hs.c(),
        value,
        pre_state: hs.state().clone(),
        post_state: post.clone(),
    };
    Ok((record, post))
}

/// A full measurement event: predicts and collapses at `hs.c`, then draws a
/// fresh hidden variable from `source` for the next event.
pub fn measure<S: HiddenSource + ?Sized>(
    op: &HermitianOperator,
    hs: &HiddenState,
    source: &mut S,
) -> Result<(MeasurementRecord, HiddenState)> {
    let (record, post) = measure_at(op, hs)?;
    let next = HiddenState::new(post, source.next_hidden()?)?;
    Ok((record, next))
}

/// Ordered measurement records of one run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasurementTrace {
    pub seed: u64,
    pub records: Vec<MeasurementRecord>,
}

impl MeasurementTrace {
    pub fn new(seed: u64) -> Self {
        Self { seed, records: Vec::new() }
    }

    pub fn push(&mut self, record: MeasurementRecord) {
        self.records.push(record);
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.value)
    }

    /// Whether each record starts from the previous record's post-measurement
    /// state (up to global phase, within `tol`).
    pub fn is_chained(&self, tol: f64) -> bool {
        self.records.windows(2).all(|w| w[1].pre_state.approx_eq_up_to_phase(&w[0].post_state, tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::{basis_ket, pauli, Axis};
    use crate::random::substream;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell() -> PureState {
        let h = 1.0 / 2f64.sqrt();
        PureState::from_amplitudes(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap()
    }

    fn ket00() -> PureState {
        basis_ket(4, 0).unwrap()
    }

    #[test]
    fn hidden_state_rejects_closed_endpoints() {
        assert!(HiddenState::new(ket00(), 0.0).is_err());
        assert!(HiddenState::new(ket00(), 1.0).is_err());
        assert!(HiddenState::new(ket00(), f64::NAN).is_err());
        assert!(HiddenState::new(ket00(), 0.5).is_ok());
    }

    #[test]
    fn draw_hidden_is_reproducible_and_open() {
        let a = draw_hidden(&mut substream(11, 0));
        let b = draw_hidden(&mut substream(11, 0));
        assert_eq!(a, b);
        let mut rng = substream(12, 0);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = draw_hidden(&mut rng);
            assert!(x > 0.0 && x < 1.0);
            sum += x;
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() <= 0.005, "mean {mean}");
    }

    #[test]
    fn injected_source_replays_then_exhausts() {
        let mut src = Injected::new(vec![0.4, 0.1]);
        assert_eq!(src.next_hidden(), Ok(0.4));
        assert_eq!(src.next_hidden(), Ok(0.1));
        assert_eq!(src.next_hidden(), Err(Error::HiddenExhausted));
        assert!(Injected::new(vec![1.0]).next_hidden().is_err());
    }

    #[test]
    fn zz_on_00_is_plus_one() {
        let zz = pauli(Axis::Z).tensor(&pauli(Axis::Z));
        let hs = HiddenState::new(ket00(), 0.4).unwrap();
        assert_eq!(predict_operator(&zz, &hs).unwrap(), 1.0);
    }

    #[test]
    fn ix_on_00_at_c_04_is_minus_one() {
        let ix = HermitianOperator::identity(2).tensor(&pauli(Axis::X));
        let hs = HiddenState::new(ket00(), 0.4).unwrap();
        assert_eq!(predict_operator(&ix, &hs).unwrap(), -1.0);
        let hs = HiddenState::new(ket00(), 0.6).unwrap();
        assert_eq!(predict_operator(&ix, &hs).unwrap(), 1.0);
    }

    #[test]
    fn xx_on_bell_is_plus_one_for_every_c() {
        let xx = pauli(Axis::X).tensor(&pauli(Axis::X));
        for &cv in &[1e-9, 0.1, 0.5, 0.7, 1.0 - 1e-9] {
            let hs = HiddenState::new(bell(), cv).unwrap();
            assert_eq!(predict_operator(&xx, &hs).unwrap(), 1.0);
        }
    }

    #[test]
    fn update_yy_minus_one_from_00_gives_bell() {
        let yy = pauli(Axis::Y).tensor(&pauli(Axis::Y));
        let hs = HiddenState::new(ket00(), 0.1).unwrap();
        let sd = yy.spectral().unwrap();
        let post = update(sd, &hs, -1.0).unwrap();
        assert!(post.approx_eq_up_to_phase(&bell(), 1e-12));
    }

    #[test]
    fn update_ix_minus_one_from_00() {
        let ix = HermitianOperator::identity(2).tensor(&pauli(Axis::X));
        let hs = HiddenState::new(ket00(), 0.3).unwrap();
        let post = update(ix.spectral().unwrap(), &hs, -1.0).unwrap();
        // |0⟩ ⊗ (|0⟩ − |1⟩)/√2, worked by hand
        let h = 1.0 / 2f64.sqrt();
        let expected = PureState::from_amplitudes(vec![c(h, 0.0), c(-h, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(post.approx_eq_up_to_phase(&expected, 1e-12));
    }

    #[test]
    fn update_errors() {
        let zz = pauli(Axis::Z).tensor(&pauli(Axis::Z));
        let sd = zz.spectral().unwrap();
        let hs = HiddenState::new(ket00(), 0.5).unwrap();
        assert!(matches!(update(sd, &hs, 0.5), Err(Error::NotAnEigenvalue { .. })));
        assert!(matches!(update(sd, &hs, -1.0), Err(Error::ZeroProbabilityCollapse { .. })));
        let z = pauli(Axis::Z);
        assert!(matches!(predict_operator(&z, &hs), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn eigenstate_update_is_identity_up_to_phase() {
        let xx = pauli(Axis::X).tensor(&pauli(Axis::X));
        let hs = HiddenState::new(bell().with_phase(0.7), 0.2).unwrap();
        let post = update(xx.spectral().unwrap(), &hs, 1.0).unwrap();
        assert!(post.approx_eq_up_to_phase(hs.state(), 1e-12));
    }

    #[test]
    fn measure_replays_table_step_two() {
        let yy = pauli(Axis::Y).tensor(&pauli(Axis::Y));
        let hs = HiddenState::new(ket00(), 0.1).unwrap();
        let mut src = Injected::new(vec![0.7]);
        let (rec, next) = measure(&yy, &hs, &mut src).unwrap();
        assert_eq!(rec.value, -1.0);
        assert_eq!(rec.c_used, 0.1);
        assert!(next.state().approx_eq_up_to_phase(&bell(), 1e-12));
        assert_eq!(next.c(), 0.7);
    }

    #[test]
    fn sigma_z_twice_repeats() {
        let z = pauli(Axis::Z);
        for seed in 0..50 {
            let mut rng = substream(seed, 0);
            let state = crate::random::random_state(2, &mut rng);
            let hs = HiddenState::new(state, draw_hidden(&mut rng)).unwrap();
            let (r1, hs) = measure(&z, &hs, &mut rng).unwrap();
            let (r2, _) = measure(&z, &hs, &mut rng).unwrap();
            assert_eq!(r1.value, r2.value);
        }
    }

    #[test]
    fn trace_serializes_with_stable_field_names() {
        let yy = pauli(Axis::Y).tensor(&pauli(Axis::Y));
        let hs = HiddenState::new(ket00(), 0.1).unwrap();
        let (rec, _) = measure_at(&yy, &hs).unwrap();
        let mut trace = MeasurementTrace::new(9);
        trace.push(rec);
        let json = serde_json::to_value(&trace).unwrap();
        assert_eq!(json["seed"], 9);
        let r = &json["records"][0];
        assert_eq!(r["label"], "σy⊗σy");
        assert_eq!(r["c"], 0.1);
        assert_eq!(r["value"], -1.0);
        assert_eq!(r["pre_state"][0][0], 1.0);
        assert_eq!(r["pre_state"].as_array().unwrap().len(), 4);
        let back: MeasurementTrace = serde_json::from_value(json).unwrap();
        assert_eq!(back, trace);
    }
}
