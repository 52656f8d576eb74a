//! Seeded randomized batteries over generated states and observables. Case
//! `k` draws its objects from stream `k` of a battery-specific setting, so
//! each case is reproducible on its own.

use hvmodel_core::consistency::check_strong_fc;
use hvmodel_core::expr::ObservableExpression;
use hvmodel_core::model::{draw_hidden, measure_at, HiddenState};
use hvmodel_core::opalg::{HermitianOperator, PureState};
use hvmodel_core::random::{
    operator_in_basis, random_integer_spectrum, random_observable, random_state, random_unitary, substream, ChaCha8Rng,
};
use rayon::prelude::*;
use serde::Serialize;

use super::{born_experiment_with_trials, stream_index, ExperimentConfig};
use crate::error::Result;

const BORN_SETUP: usize = 1 << 20;
const BORN_TRIALS: usize = 1 << 21;
const REPEATABILITY: usize = (1 << 21) + 1;
const COMPATIBILITY: usize = (1 << 21) + 2;
const STRONG_FC: usize = (1 << 21) + 3;

const STATE_TOL: f64 = 1e-9;
const MAX_DIM: usize = 8;

#[derive(Debug, Clone, Serialize)]
pub struct BatterySummary {
    pub name: String,
    pub cases: usize,
    pub passes: usize,
    pub failures: usize,
    /// Description of the lowest-numbered failing case.
    pub first_failure: Option<String>,
}

impl BatterySummary {
    fn from_outcomes(name: &str, outcomes: Vec<Option<String>>) -> Self {
        let cases = outcomes.len();
        let failures = outcomes.iter().filter(|o| o.is_some()).count();
        Self {
            name: name.to_string(),
            cases,
            passes: cases - failures,
            failures,
            first_failure: outcomes.into_iter().flatten().next(),
        }
    }
}

/// Dimension of case `k`, cycling through 2..=8.
fn case_dim(k: usize) -> usize {
    2 + k % (MAX_DIM - 1)
}

fn case_rng(seed: u64, setting: usize, k: usize) -> ChaCha8Rng {
    substream(seed, stream_index(setting, k))
}

fn run_cases<F>(name: &str, cases: usize, case: F) -> Result<BatterySummary>
where
    F: Fn(usize) -> Result<Option<String>> + Sync,
{
    let outcomes = (0..cases).into_par_iter().map(&case).collect::<Result<Vec<_>>>()?;
    Ok(BatterySummary::from_outcomes(name, outcomes))
}

/// `scenarios` random (state, observable) pairs with dim ≤ 8, each tested
/// with `cfg.trials` single shots at `cfg.tolerance_sigma`.
pub fn born_battery(cfg: &ExperimentConfig, scenarios: usize) -> Result<BatterySummary> {
    cfg.validate()?;
    let outcomes = (0..scenarios)
        .map(|k| {
            let mut rng = case_rng(cfg.seed, BORN_SETUP, k);
            let dim = case_dim(k);
            let state = random_state(dim, &mut rng);
            let obs = random_observable(dim, &mut rng);
            let report = born_experiment_with_trials(cfg, &state, &obs, BORN_TRIALS + k, false)?;
            Ok((!report.pass)
                .then(|| format!("scenario {k} (dim {dim}): max deviation {:.2}σ", report.max_sigma_deviation)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BatterySummary::from_outcomes("born", outcomes))
}

/// Immediate re-measurement of a random observable returns the same value
/// and leaves the collapsed state unchanged up to phase.
pub fn repeatability_battery(cases: usize, seed: u64) -> Result<BatterySummary> {
    run_cases("repeatability", cases, |k| {
        let mut rng = case_rng(seed, REPEATABILITY, k);
        let dim = case_dim(k);
        let state = random_state(dim, &mut rng);
        let obs = random_observable(dim, &mut rng);
        let (first, post) = measure_at(&obs, &HiddenState::new(state, draw_hidden(&mut rng))?)?;
        let (second, post2) = measure_at(&obs, &HiddenState::new(post.clone(), draw_hidden(&mut rng))?)?;
        let ok = first.value == second.value && post2.approx_eq_up_to_phase(&post, STATE_TOL);
        Ok((!ok).then(|| format!("case {k} (dim {dim}): {} then {}", first.value, second.value)))
    })
}

fn commuting_family(
    rng: &mut ChaCha8Rng,
    dim: usize,
    count: usize,
) -> (hvmodel_core::opalg::Matrix, Vec<HermitianOperator>) {
    let basis = random_unitary(dim, rng);
    let ops = (0..count).map(|_| operator_in_basis(&basis, &random_integer_spectrum(dim, 2, rng))).collect();
    (basis, ops)
}

/// A, B diagonal in a shared random basis: measuring A, then B, then A again
/// returns the first A value.
pub fn compatibility_battery(cases: usize, seed: u64) -> Result<BatterySummary> {
    run_cases("compatibility", cases, |k| {
        let mut rng = case_rng(seed, COMPATIBILITY, k);
        let dim = case_dim(k);
        let (_, ops) = commuting_family(&mut rng, dim, 2);
        let state = random_state(dim, &mut rng);
        let mut hs = HiddenState::new(state, draw_hidden(&mut rng))?;
        let mut values = [0.0; 3];
        for (i, op) in [&ops[0], &ops[1], &ops[0]].into_iter().enumerate() {
            let (record, post) = measure_at(op, &hs)?;
            values[i] = record.value;
            hs = HiddenState::new(post, draw_hidden(&mut rng))?;
        }
        let ok = values[0] == values[2];
        Ok((!ok).then(|| format!("case {k} (dim {dim}): A = {}, B = {}, A = {}", values[0], values[1], values[2])))
    })
}

/// f(B₁, …, B_n) with 2 ≤ n ≤ 4 commuting leaves evaluated on one of their
/// common eigenkets; strong functional consistency must hold for every c.
pub fn strong_fc_battery(cases: usize, seed: u64) -> Result<BatterySummary> {
    run_cases("strong-fc", cases, |k| {
        let mut rng = case_rng(seed, STRONG_FC, k);
        let dim = case_dim(k);
        let leaves = 2 + k % 3;
        let (basis, ops) = commuting_family(&mut rng, dim, leaves);
        let refs: Vec<&HermitianOperator> = ops.iter().collect();
        let f = if k % 2 == 0 { ObservableExpression::product(&refs)? } else { ObservableExpression::sum(&refs)? };
        let column = (draw_hidden(&mut rng) * dim as f64) as usize % dim;
        let ket = PureState::normalized(basis.column(column))?;
        let report = check_strong_fc(&f, &HiddenState::new(ket, draw_hidden(&mut rng))?)?;
        Ok((!report.holds)
            .then(|| format!("case {k} (dim {dim}, {leaves} leaves): {} vs {}", report.lhs_value, report.rhs_value)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_batteries_pass() {
        assert_eq!(repeatability_battery(50, 1).unwrap().failures, 0);
        assert_eq!(compatibility_battery(50, 1).unwrap().failures, 0);
        assert_eq!(strong_fc_battery(50, 1).unwrap().failures, 0);
    }

    #[test]
    fn born_battery_is_reproducible() {
        let cfg = ExperimentConfig { seed: 4, trials: 2000, ..ExperimentConfig::default() };
        let a = born_battery(&cfg, 10).unwrap();
        let b = born_battery(&cfg, 10).unwrap();
        assert_eq!((a.passes, a.first_failure.clone()), (b.passes, b.first_failure));
        assert!(a.passes >= 9);
    }
}
