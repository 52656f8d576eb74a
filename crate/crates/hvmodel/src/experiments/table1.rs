use hvmodel_core::expr::{peres_mermin, Line, PeresMerminSquare};
use hvmodel_core::model::{measure_at, predict_operator, HiddenState, MeasurementTrace};
use hvmodel_core::opalg::PureState;
use serde::Serialize;

use super::{bell_phi_plus, ket};
use crate::error::{ExperimentError, Result};

/// Hidden variables of the three iterations.
pub const TABLE1_C: [f64; 3] = [0.4, 0.1, 0.7];

/// Expected M_i(A_jk) for iterations i = 1, 2, 3.
pub const TABLE1_GRIDS: [[[f64; 3]; 3]; 3] = [
    [[-1.0, -1.0, -1.0], [-1.0, -1.0, -1.0], [-1.0, -1.0, 1.0]],
    [[-1.0, -1.0, -1.0], [-1.0, -1.0, -1.0], [-1.0, -1.0, 1.0]],
    [[1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [1.0, 1.0, 1.0]],
];

/// Cell measured at each iteration (zero-based) and the expected outcome.
pub const TABLE1_MEASURED: [((usize, usize), f64); 3] = [((2, 2), 1.0), ((1, 2), -1.0), ((0, 2), 1.0)];

const ROW_VALUES: [f64; 3] = [1.0, 1.0, 1.0];
const COLUMN_VALUES: [f64; 3] = [1.0, 1.0, -1.0];
const STATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct Table1Iteration {
    pub iteration: usize,
    pub c: f64,
    pub initial_state: PureState,
    pub grid: [[f64; 3]; 3],
    pub row_values: [f64; 3],
    pub column_values: [f64; 3],
    pub measured_label: String,
    pub measured_value: f64,
    pub final_state: PureState,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Replay {
    pub iterations: Vec<Table1Iteration>,
    pub trace: MeasurementTrace,
}

/// Runs the three-iteration Peres-Mermin sequence from |00⟩ with the given
/// hidden variables, evaluating the full grid and all line products at each
/// iteration before measuring A33, A23, A13 in turn.
pub fn run_table1(cs: [f64; 3]) -> Result<Table1Replay> {
    let square = peres_mermin();
    let mut state = ket(&[0, 0]);
    let mut trace = MeasurementTrace::new(0);
    let mut iterations = Vec::with_capacity(3);
    for (i, &c) in cs.iter().enumerate() {
        let hs = HiddenState::new(state.clone(), c)?;
        let iteration = evaluate_iteration(&square, &hs, i)?;
        state = iteration.final_state.clone();
        let ((r, col), _) = TABLE1_MEASURED[i];
        let (record, _) = measure_at(square.cell(r, col), &hs)?;
        trace.push(record);
        iterations.push(iteration);
    }
    Ok(Table1Replay { iterations, trace })
}

fn evaluate_iteration(square: &PeresMerminSquare, hs: &HiddenState, i: usize) -> Result<Table1Iteration> {
    let mut grid = [[0.0; 3]; 3];
    for (r, row) in grid.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = predict_operator(square.cell(r, c), hs)?;
        }
    }
    let mut row_values = [0.0; 3];
    let mut column_values = [0.0; 3];
    for k in 0..3 {
        row_values[k] = predict_operator(square.line_product(Line::Row(k)), hs)?;
        column_values[k] = predict_operator(square.line_product(Line::Column(k)), hs)?;
    }
    let ((r, c), _) = TABLE1_MEASURED[i];
    let measured = square.cell(r, c);
    let (record, post) = measure_at(measured, hs)?;
    Ok(Table1Iteration {
        iteration: i + 1,
        c: hs.c(),
        initial_state: hs.state().clone(),
        grid,
        row_values,
        column_values,
        measured_label: measured.display_label(),
        measured_value: record.value,
        final_state: post,
    })
}

impl Table1Replay {
    /// Compares every value and final state with the reference table and
    /// names the first differing cell.
    pub fn check(&self) -> Result<()> {
        let finals = [ket(&[0, 0]), bell_phi_plus(), bell_phi_plus()];
        for (i, it) in self.iterations.iter().enumerate() {
            let n = i + 1;
            for (r, (expected, actual)) in TABLE1_GRIDS[i].iter().zip(&it.grid).enumerate() {
                for (c, (&e, &a)) in expected.iter().zip(actual).enumerate() {
                    expect_value(format!("M{n}(A{}{})", r + 1, c + 1), e, a)?;
                }
            }
            for k in 0..3 {
                expect_value(format!("M{n}(R{})", k + 1), ROW_VALUES[k], it.row_values[k])?;
                expect_value(format!("M{n}(C{})", k + 1), COLUMN_VALUES[k], it.column_values[k])?;
            }
            let ((r, c), value) = TABLE1_MEASURED[i];
            expect_value(format!("M{n}(A{}{}) measured", r + 1, c + 1), value, it.measured_value)?;
            if !it.final_state.approx_eq_up_to_phase(&finals[i], STATE_TOL) {
                return Err(ExperimentError::TableMismatch {
                    cell: format!("final state of iteration {n}"),
                    expected: format!("{:?}", finals[i].amplitudes()),
                    actual: format!("{:?}", it.final_state.amplitudes()),
                });
            }
        }
        Ok(())
    }
}

fn expect_value(cell: String, expected: f64, actual: f64) -> Result<()> {
    if (expected - actual).abs() > 1e-9 {
        return Err(ExperimentError::TableMismatch {
            cell,
            expected: format!("{expected:+}"),
            actual: format!("{actual:+}"),
        });
    }
    Ok(())
}

/// [`run_table1`] at c = 0.4, 0.1, 0.7, checked against the reference values.
pub fn replay_table1() -> Result<Table1Replay> {
    let replay = run_table1(TABLE1_C)?;
    replay.check()?;
    Ok(replay)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_matches_reference() {
        let replay = replay_table1().unwrap();
        assert_eq!(replay.iterations.len(), 3);
        assert_eq!(replay.trace.records.len(), 3);
        assert!(replay.trace.is_chained(1e-10));
        let values: Vec<f64> = replay.trace.values().collect();
        assert_eq!(values, vec![1.0, -1.0, 1.0]);
    }

    #[test]
    fn second_iteration_repeats_the_first_grid() {
        let replay = replay_table1().unwrap();
        assert_eq!(replay.iterations[0].grid, replay.iterations[1].grid);
    }

    #[test]
    fn mismatch_names_the_cell() {
        // c = 0.6 flips every undetermined cell of the first grid to +1
        let replay = run_table1([0.6, 0.1, 0.7]).unwrap();
        match replay.check() {
            Err(ExperimentError::TableMismatch { cell, .. }) => assert_eq!(cell, "M1(A11)"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
