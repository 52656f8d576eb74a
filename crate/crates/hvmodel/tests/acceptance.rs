//! Acceptance suite: one test per criterion, each printing a single
//! `PASS`/`FAIL` line. Every tolerance, count and time limit is pinned here.
//!
//! Run with `cargo test -p hvmodel --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use hvmodel::experiments::{
    born_battery, born_experiment, chsh_experiment, compatibility_battery, repeatability_battery, run_table1,
    spin_half_state, strong_fc_battery, weak_fc_exhaustion, ExperimentConfig, TSIRELSON,
};
use hvmodel_core::consistency::{check_strong_fc, no_go_search, verify_proposition};
use hvmodel_core::expr::{peres_mermin, Line, ObservableExpression};
use hvmodel_core::model::{predict_operator, HiddenState};
use hvmodel_core::opalg::{basis_ket, pauli, tensor, Axis, Matrix, PureState};
use num_complex::Complex64;

const SEED: u64 = 20_240_601;

fn verdict(id: &str, name: &str, ok: bool, detail: String) {
    println!("{id} {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{id} {name} failed: {detail}");
}

fn ket00() -> PureState {
    basis_ket(4, 0).unwrap()
}

fn phi_plus() -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    PureState::from_amplitudes(vec![Complex64::new(h, 0.0), z, z, Complex64::new(h, 0.0)]).unwrap()
}

#[test]
fn ac01_table1_exact_replay() {
    const GRIDS: [[[f64; 3]; 3]; 3] = [
        [[-1.0, -1.0, -1.0], [-1.0, -1.0, -1.0], [-1.0, -1.0, 1.0]],
        [[-1.0, -1.0, -1.0], [-1.0, -1.0, -1.0], [-1.0, -1.0, 1.0]],
        [[1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [1.0, 1.0, 1.0]],
    ];
    const MEASURED: [f64; 3] = [1.0, -1.0, 1.0];
    const STATE_TOL: f64 = 1e-9;
    let start = Instant::now();
    let replay = run_table1([0.4, 0.1, 0.7]).unwrap();
    let elapsed = start.elapsed();
    let finals = [ket00(), phi_plus(), phi_plus()];

    let mut mismatches = Vec::new();
    for (i, it) in replay.iterations.iter().enumerate() {
        if it.grid != GRIDS[i] {
            mismatches.push(format!("grid {}", i + 1));
        }
        if it.row_values != [1.0, 1.0, 1.0] || it.column_values != [1.0, 1.0, -1.0] {
            mismatches.push(format!("line values {}", i + 1));
        }
        if it.measured_value != MEASURED[i] {
            mismatches.push(format!("measured {}", i + 1));
        }
        if !it.final_state.approx_eq_up_to_phase(&finals[i], STATE_TOL) {
            mismatches.push(format!("final state {}", i + 1));
        }
    }
    let labels: Vec<&str> = replay.trace.records.iter().map(|r| r.observable_label.as_str()).collect();
    if labels != ["A33 (σz⊗σz)", "A23 (σy⊗σy)", "A13 (σx⊗σx)"] {
        mismatches.push(format!("measured operators {labels:?}"));
    }
    let ok = mismatches.is_empty() && replay.check().is_ok() && elapsed < Duration::from_secs(1);
    verdict("AC1", "Peres-Mermin table exact replay", ok, format!("mismatches {mismatches:?}, {elapsed:?} < 1 s"));
}

#[test]
fn ac02_peres_mermin_identities() {
    const IDENTITY_TOL: f64 = 1e-12;
    const COMMUTE_TOL: f64 = 1e-10;
    let start = Instant::now();
    let sq = peres_mermin();
    let id = Matrix::identity(4);
    let minus_id = id.scale(Complex64::new(-1.0, 0.0));
    let mut worst_identity: f64 = 0.0;
    let mut worst_commutator: f64 = 0.0;
    for line in Line::all() {
        let [a, b, c] = sq.line_operators(line);
        // product recomputed from the cell matrices
        let product = a.matrix().matmul(b.matrix()).matmul(c.matrix());
        let target = if line == Line::Column(2) { &minus_id } else { &id };
        worst_identity = worst_identity.max(product.frobenius_distance(target));
        for (x, y) in [(a, b), (a, c), (b, c)] {
            worst_commutator = worst_commutator.max(x.commutator_norm(y).unwrap());
        }
    }
    let elapsed = start.elapsed();
    let ok = worst_identity <= IDENTITY_TOL && worst_commutator <= COMMUTE_TOL && elapsed < Duration::from_secs(1);
    verdict(
        "AC2",
        "Peres-Mermin operator identities",
        ok,
        format!(
            "identity dev {worst_identity:.1e} <= 1e-12, commutator {worst_commutator:.1e} <= 1e-10, {elapsed:?} < 1 s"
        ),
    );
}

#[test]
fn ac03_no_go_exhaustive_search() {
    let start = Instant::now();
    let sq = peres_mermin();
    let first = no_go_search(&sq).unwrap();
    let second = no_go_search(&sq).unwrap();
    let elapsed = start.elapsed();

    // independent nested-loop count over the 512 sign maps
    let mut oracle = 0;
    for mask in 0u32..512 {
        let v = |r: usize, c: usize| if mask >> (3 * r + c) & 1 == 1 { -1 } else { 1 };
        let rows = (0..3).all(|r| v(r, 0) * v(r, 1) * v(r, 2) == 1);
        let cols = (0..3).all(|c| v(0, c) * v(1, c) * v(2, c) == if c == 2 { -1 } else { 1 });
        if rows && cols {
            oracle += 1;
        }
    }
    let ok = first.total_assignments == 512
        && first.satisfying_assignments == 0
        && oracle == 0
        && first == second
        && elapsed < Duration::from_secs(1);
    verdict(
        "AC3",
        "no-go exhaustive search",
        ok,
        format!(
            "{} of {} satisfy, reruns identical: {}, {elapsed:?} < 1 s",
            first.satisfying_assignments,
            first.total_assignments,
            first == second
        ),
    );
}

#[test]
fn ac04_non_fc_witness() {
    let sq = peres_mermin();
    let hs = HiddenState::new(ket00(), 0.4).unwrap();
    let lhs = predict_operator(sq.column_product(2), &hs).unwrap();
    let leaves: Vec<f64> =
        sq.line_operators(Line::Column(2)).iter().map(|op| predict_operator(op, &hs).unwrap()).collect();
    let rhs: f64 = leaves.iter().product();
    let report = check_strong_fc(&sq.line_expression(Line::Column(2)).unwrap(), &hs).unwrap();
    let ok = lhs == -1.0 && leaves == [-1.0, -1.0, 1.0] && rhs == 1.0 && lhs != rhs && !report.holds;
    verdict("AC4", "non-FC witness", ok, format!("M(C3) = {lhs}, f~ = {leaves:?} -> {rhs}"));
}

#[test]
fn ac05_weak_fc_exhaustion() {
    let start = Instant::now();
    let s = weak_fc_exhaustion(&peres_mermin(), Line::Column(2), 1000, SEED).unwrap();
    let elapsed = start.elapsed();
    let all_minus_one = s.rows.len() == 6000 && s.rows.iter().all(|r| r.value == -1.0);
    let ok = s.checks == 6000 && s.failures == 0 && all_minus_one && elapsed < Duration::from_secs(10);
    verdict("AC5", "weak-FC exhaustion", ok, format!("{} of {} products = -1, {elapsed:?} < 10 s", s.passes, s.checks));
}

#[test]
fn ac06_born_rule() {
    let start = Instant::now();
    let theta = std::f64::consts::FRAC_PI_3;
    let cfg = ExperimentConfig { seed: SEED, trials: 100_000, theta, tolerance_sigma: 5.0 };
    let report = born_experiment(&cfg, &spin_half_state(theta), &pauli(Axis::Z)).unwrap();
    let freq = report.frequency_of(1.0).unwrap();
    let bound = 5.0 * (0.25f64 * 0.75 / 100_000.0).sqrt();
    let single_ok = (freq - 0.25).abs() <= bound;

    let battery_cfg = ExperimentConfig { seed: SEED, trials: 10_000, theta, tolerance_sigma: 5.0 };
    let battery = born_battery(&battery_cfg, 100).unwrap();
    let elapsed = start.elapsed();
    let ok = single_ok && battery.cases == 100 && battery.passes >= 98 && elapsed < Duration::from_secs(30);
    verdict(
        "AC6",
        "Born rule",
        ok,
        format!("|{freq:.5} - 0.25| <= {bound:.5}; {}/100 scenarios pass (>= 98); {elapsed:?} < 30 s", battery.passes),
    );
}

#[test]
fn ac07_repeatability_and_compatibility() {
    let rep = repeatability_battery(1000, SEED).unwrap();
    let comp = compatibility_battery(1000, SEED).unwrap();
    let ok = rep.cases == 1000 && comp.cases == 1000 && rep.failures == 0 && comp.failures == 0;
    verdict(
        "AC7",
        "repeatability and compatibility persistence",
        ok,
        format!("repeatability {} failures, A-B-A {} failures, of 1000 each", rep.failures, comp.failures),
    );
}

#[test]
fn ac08_strong_fc_on_common_eigenkets() {
    let s = strong_fc_battery(500, SEED).unwrap();
    let ok = s.cases == 500 && s.failures == 0;
    verdict("AC8", "strong FC on common eigenkets", ok, format!("{} of 500 failures", s.failures));
}

#[test]
fn ac09_chsh() {
    let start = Instant::now();
    let cfg = ExperimentConfig { seed: SEED, trials: 100_000, ..ExperimentConfig::default() };
    let r = chsh_experiment(&cfg, false).unwrap();
    let elapsed = start.elapsed();
    let expected = 2.0 * 2f64.sqrt();
    let ok = (r.s - expected).abs() <= 0.02
        && r.s > 2.0
        && TSIRELSON == expected
        && r.correlators.iter().all(|e| e.product.abs() <= 1.0)
        && elapsed < Duration::from_secs(60);
    verdict("AC9", "CHSH", ok, format!("S = {:.5}, |S - 2√2| <= 0.02, S > 2, {elapsed:?} < 60 s", r.s));
}

#[test]
fn ac10_proposition_verification() {
    let sq = peres_mermin();
    let c3 = sq.line_expression(Line::Column(2)).unwrap();
    let a = verify_proposition(&c3, &ket00(), 500, SEED).unwrap();

    let (x, y) = (pauli(Axis::X), pauli(Axis::Y));
    let xx_yy = ObservableExpression::product(&[&tensor(&x, &x), &tensor(&y, &y)]).unwrap();
    let b = verify_proposition(&xx_yy, &phi_plus(), 500, SEED).unwrap();

    let not_eigen =
        PureState::normalized(hvmodel_core::opalg::ComplexVector::from_real(&[1.0, 1.0, 0.0, 0.0]).unwrap()).unwrap();
    let rejected =
        matches!(verify_proposition(&xx_yy, &not_eigen, 10, SEED), Err(hvmodel_core::Error::NotAnEigenstate { .. }));
    let ok = a.checks == 3000 && a.failures == 0 && b.checks == 1000 && b.failures == 0 && rejected;
    verdict(
        "AC10",
        "proposition verification",
        ok,
        format!(
            "C3: {}/{} pass, XX·YY: {}/{} pass, non-eigenstate rejected: {rejected}",
            a.passes, a.checks, b.passes, b.checks
        ),
    );
}
