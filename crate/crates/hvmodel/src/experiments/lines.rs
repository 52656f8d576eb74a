use hvmodel_core::consistency::{check_weak_fc_all, ConsistencyReport};
use hvmodel_core::expr::{Line, PeresMerminSquare};
use hvmodel_core::model::{draw_hidden, HiddenState};
use hvmodel_core::opalg::PureState;
use hvmodel_core::random::{random_state, substream};
use rayon::prelude::*;
use serde::Serialize;

use super::{ket, TrialRow};
use crate::error::Result;

const VALUE_TOL: f64 = 1e-9;

/// Tally of sequential line-product runs over all measurement orders.
#[derive(Debug, Clone, Serialize)]
pub struct LineProductSummary {
    pub line: String,
    /// Scalar value of the line's product operator (±1).
    pub forced_value: f64,
    pub trials: usize,
    pub permutations: usize,
    pub checks: usize,
    /// Runs whose outcome product equals the forced value and the
    /// prediction for the product operator.
    pub passes: usize,
    pub failures: usize,
    pub first_failure: Option<ConsistencyReport>,
    #[serde(skip)]
    pub rows: Vec<TrialRow>,
}

impl LineProductSummary {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

/// Human-readable line name, `row1`..`row3` or `col1`..`col3`.
pub fn line_name(line: Line) -> String {
    match line {
        Line::Row(i) => format!("row{}", i + 1),
        Line::Column(j) => format!("col{}", j + 1),
    }
}

/// Sequentially measures the three operators of `line` in every order,
/// starting each trial from a Haar-random two-qubit state, and checks that
/// the outcome product is the line's forced value.
pub fn line_product_experiment(
    square: &PeresMerminSquare,
    line: Line,
    trials: usize,
    seed: u64,
) -> Result<LineProductSummary> {
    run_line(square, line, trials, seed, |rng| random_state(4, rng))
}

/// [`line_product_experiment`] from the fixed state |00⟩.
pub fn weak_fc_exhaustion(
    square: &PeresMerminSquare,
    line: Line,
    trials: usize,
    seed: u64,
) -> Result<LineProductSummary> {
    run_line(square, line, trials, seed, |_| ket(&[0, 0]))
}

fn run_line<F>(square: &PeresMerminSquare, line: Line, trials: usize, seed: u64, start: F) -> Result<LineProductSummary>
where
    F: Fn(&mut hvmodel_core::random::ChaCha8Rng) -> PureState + Sync,
{
    let f = square.line_expression(line)?;
    let forced_value = square.line_value(line)?;
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(seed, t as u64);
            let psi = start(&mut rng);
            let initial = HiddenState::new(psi, draw_hidden(&mut rng))?;
            check_weak_fc_all(&f, &initial, &mut rng)
        })
        .collect::<hvmodel_core::Result<Vec<_>>>()?;

    let permutations = per_trial.first().map_or(0, Vec::len);
    let mut passes = 0;
    let mut first_failure = None;
    let mut rows = Vec::with_capacity(trials * permutations);
    for (t, reports) in per_trial.into_iter().enumerate() {
        for report in reports {
            let ok = report.holds && (report.rhs_value - forced_value).abs() <= VALUE_TOL;
            let order = report.details.permutation.as_deref().unwrap_or_default();
            rows.push(TrialRow {
                trial: t,
                setting: order.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(""),
                c: report.details.c_values[0],
                value: report.rhs_value,
            });
            if ok {
                passes += 1;
            } else if first_failure.is_none() {
                first_failure = Some(report);
            }
        }
    }
    let checks = trials * permutations;
    Ok(LineProductSummary {
        line: line_name(line),
        forced_value,
        trials,
        permutations,
        checks,
        passes,
        failures: checks - passes,
        first_failure,
        rows,
    })
}
