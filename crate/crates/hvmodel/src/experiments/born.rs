use hvmodel_core::model::{branch_weights, draw_hidden, predict, HiddenState};
use hvmodel_core::opalg::{HermitianOperator, PureState};
use hvmodel_core::random::substream;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{stream_index, ExperimentConfig, TrialRow};
use crate::error::{ExperimentError, Result};

/// Frequency and Born probability of one eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutcomeStat {
    pub value: f64,
    pub count: usize,
    pub frequency: f64,
    pub probability: f64,
    /// |frequency − probability| in units of √(p(1−p)/N); zero when both agree exactly.
    pub sigma_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatReport {
    pub trials: usize,
    pub tolerance_sigma: f64,
    /// `[value, frequency]` pairs in ascending eigenvalue order.
    pub outcome_frequencies: Vec<[f64; 2]>,
    /// `[value, ‖P_a ψ‖²]` pairs in ascending eigenvalue order.
    pub expected_probabilities: Vec<[f64; 2]>,
    pub outcomes: Vec<OutcomeStat>,
    pub max_sigma_deviation: f64,
    pub pass: bool,
    #[serde(skip)]
    pub rows: Vec<TrialRow>,
}

impl StatReport {
    pub fn frequency_of(&self, value: f64) -> Option<f64> {
        self.outcomes.iter().find(|o| (o.value - value).abs() < 1e-9).map(|o| o.frequency)
    }

    pub fn probability_of(&self, value: f64) -> Option<f64> {
        self.outcomes.iter().find(|o| (o.value - value).abs() < 1e-9).map(|o| o.probability)
    }
}

/// cos θ|0⟩ + sin θ|1⟩
pub fn spin_half_state(theta: f64) -> PureState {
    PureState::from_amplitudes(vec![Complex64::new(theta.cos(), 0.0), Complex64::new(theta.sin(), 0.0)])
        .expect("unit norm")
}

/// Single-shot measurements of `obs` on fresh copies of `state`, one hidden
/// variable per trial, compared against the Born probabilities.
pub fn born_experiment(cfg: &ExperimentConfig, state: &PureState, obs: &HermitianOperator) -> Result<StatReport> {
    born_experiment_with_trials(cfg, state, obs, 0, false)
}

/// [`born_experiment`] under stream setting `setting`, optionally keeping
/// the per-trial rows.
pub fn born_experiment_with_trials(
    cfg: &ExperimentConfig,
    state: &PureState,
    obs: &HermitianOperator,
    setting: usize,
    keep_rows: bool,
) -> Result<StatReport> {
    cfg.validate()?;
    if obs.dim() != state.dim() {
        return Err(hvmodel_core::Error::DimensionMismatch { expected: obs.dim(), found: state.dim() }.into());
    }
    let sd = obs.spectral()?;
    let probabilities = branch_weights(sd, state)?;

    let samples = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(cfg.seed, stream_index(setting, t));
            let c = draw_hidden(&mut rng);
            let hs = HiddenState::new(state.clone(), c)?;
            Ok((c, predict(sd, &hs)?))
        })
        .collect::<std::result::Result<Vec<_>, hvmodel_core::Error>>()?;

    let mut counts = vec![0usize; sd.branches().len()];
    for &(_, value) in &samples {
        let i = sd
            .branches()
            .iter()
            .position(|b| b.eigenvalue == value)
            .ok_or_else(|| ExperimentError::Config(format!("outcome {value} is not an eigenvalue")))?;
        counts[i] += 1;
    }

    let n = cfg.trials as f64;
    let outcomes: Vec<OutcomeStat> = sd
        .branches()
        .iter()
        .zip(&probabilities)
        .zip(&counts)
        .map(|((b, &p), &count)| {
            let frequency = count as f64 / n;
            let diff = (frequency - p).abs();
            let sigma = (p * (1.0 - p) / n).sqrt();
            let sigma_deviation = if diff == 0.0 {
                0.0
            } else if sigma > 0.0 {
                diff / sigma
            } else {
                f64::INFINITY
            };
            OutcomeStat { value: b.eigenvalue, count, frequency, probability: p, sigma_deviation }
        })
        .collect();

    let max_sigma_deviation = outcomes.iter().map(|o| o.sigma_deviation).fold(0.0, f64::max);
    let pass = outcomes.iter().all(|o| {
        let bound = cfg.tolerance_sigma * (o.probability * (1.0 - o.probability) / n).sqrt();
        (o.frequency - o.probability).abs() <= bound
    });
    let rows = if keep_rows {
        let label = obs.display_label();
        samples
            .iter()
            .enumerate()
            .map(|(trial, &(c, value))| TrialRow { trial, setting: label.clone(), c, value })
            .collect()
    } else {
        Vec::new()
    };

    Ok(StatReport {
        trials: cfg.trials,
        tolerance_sigma: cfg.tolerance_sigma,
        outcome_frequencies: outcomes.iter().map(|o| [o.value, o.frequency]).collect(),
        expected_probabilities: outcomes.iter().map(|o| [o.value, o.probability]).collect(),
        outcomes,
        max_sigma_deviation,
        pass,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{bell_phi_plus, ket};
    use hvmodel_core::opalg::{pauli, tensor, Axis};

    fn cfg(trials: usize, seed: u64) -> ExperimentConfig {
        ExperimentConfig { seed, trials, ..ExperimentConfig::default() }
    }

    #[test]
    fn spin_half_frequencies_follow_cos_squared() {
        let theta = std::f64::consts::FRAC_PI_3;
        let report = born_experiment(&cfg(20_000, 3), &spin_half_state(theta), &pauli(Axis::Z)).unwrap();
        assert!(report.pass, "{report:?}");
        let p = report.probability_of(1.0).unwrap();
        assert!((p - theta.cos().powi(2)).abs() < 1e-12);
        let total: f64 = report.outcome_frequencies.iter().map(|f| f[1]).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn eigenstate_gives_a_single_outcome() {
        let report = born_experiment(&cfg(1000, 0), &ket(&[1]), &pauli(Axis::Z)).unwrap();
        assert_eq!(report.frequency_of(-1.0), Some(1.0));
        assert_eq!(report.frequency_of(1.0), Some(0.0));
        assert_eq!(report.max_sigma_deviation, 0.0);
        assert!(report.pass);
    }

    #[test]
    fn bell_state_is_sharp_for_zz() {
        let zz = tensor(&pauli(Axis::Z), &pauli(Axis::Z));
        let report = born_experiment(&cfg(1000, 0), &bell_phi_plus(), &zz).unwrap();
        assert_eq!(report.frequency_of(1.0), Some(1.0));
    }

    #[test]
    fn same_seed_same_counts_and_rows_are_in_trial_order() {
        let s = spin_half_state(0.3);
        let a = born_experiment_with_trials(&cfg(500, 9), &s, &pauli(Axis::X), 0, true).unwrap();
        let b = born_experiment_with_trials(&cfg(500, 9), &s, &pauli(Axis::X), 0, true).unwrap();
        assert_eq!(a.rows, b.rows);
        assert!(a.rows.iter().enumerate().all(|(i, r)| r.trial == i));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        assert!(born_experiment(&cfg(10, 0), &ket(&[0, 0]), &pauli(Axis::Z)).is_err());
    }
}
