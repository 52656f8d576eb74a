//! End-to-end scenarios built on the core model: the Peres-Mermin replay,
//! Born-rule statistics, the deduce-from-Ĉ example, CHSH and line products.
//!
//! Randomized experiments give trial `t` of setting `s` its own generator
//! [`substream`]`(seed, stream_index(s, t))`, and trials run in parallel with
//! results collected in trial order, so output does not depend on the thread
//! count.

mod batteries;
mod born;
mod chsh;
mod implications;
mod lines;
mod table1;

use hvmodel_core::opalg::PureState;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ExperimentError, Result};

pub use batteries::{born_battery, compatibility_battery, repeatability_battery, strong_fc_battery, BatterySummary};
pub use born::{born_experiment, born_experiment_with_trials, spin_half_state, OutcomeStat, StatReport};
pub use chsh::{chsh_experiment, ChshReport, Correlator, CHSH_TOLERANCE, TSIRELSON};
pub use implications::{implications_demo, implications_demo_with, DirectValues, ImplicationsReport};
pub use lines::{line_name, line_product_experiment, weak_fc_exhaustion, LineProductSummary};
pub use table1::{replay_table1, run_table1, Table1Iteration, Table1Replay, TABLE1_C, TABLE1_GRIDS, TABLE1_MEASURED};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    /// Polar angle of the spin-half state cos θ|0⟩ + sin θ|1⟩, radians.
    pub theta: f64,
    pub tolerance_sigma: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self { seed: 0, trials: 100_000, theta: std::f64::consts::FRAC_PI_3, tolerance_sigma: 5.0 }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(ExperimentError::Config("trials must be at least 1".into()));
        }
        if !(self.tolerance_sigma > 0.0 && self.tolerance_sigma.is_finite()) {
            return Err(ExperimentError::Config("tolerance_sigma must be positive".into()));
        }
        if !self.theta.is_finite() {
            return Err(ExperimentError::Config("theta must be finite".into()));
        }
        Ok(())
    }
}

/// One measurement in a per-trial CSV dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub setting: String,
    pub c: f64,
    pub value: f64,
}

/// Stream number of trial `trial` under setting `setting`.
pub fn stream_index(setting: usize, trial: usize) -> u64 {
    ((setting as u64) << 40) | trial as u64
}

/// (|00⟩ + |11⟩)/√2
pub fn bell_phi_plus() -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    PureState::from_amplitudes(vec![Complex64::new(h, 0.0), z, z, Complex64::new(h, 0.0)]).expect("normalized")
}

/// (|01⟩ + |10⟩)/√2
pub fn bell_psi_plus() -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    PureState::from_amplitudes(vec![z, Complex64::new(h, 0.0), Complex64::new(h, 0.0), z]).expect("normalized")
}

/// Computational basis state of `bits.len()` qubits, e.g. `ket(&[0, 1])` = |01⟩.
pub fn ket(bits: &[u8]) -> PureState {
    let index = bits.iter().fold(0usize, |acc, &b| acc * 2 + usize::from(b & 1));
    hvmodel_core::opalg::basis_ket(1 << bits.len(), index).expect("index in range")
}
