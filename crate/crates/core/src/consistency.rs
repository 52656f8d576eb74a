//! Functional consistency, weak functional consistency, and the exhaustive
//! ±1 assignment search over the Peres-Mermin square.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{LeafId, Line, ObservableExpression, PeresMerminSquare};
use crate::model::{draw_hidden, measure_at, predict_operator, HiddenSource, HiddenState, MeasurementRecord};
use crate::opalg::PureState;
use crate::random::substream;

/// |lhs − rhs| up to which the two sides are equal.
pub const VALUE_TOL: f64 = 1e-9;

/// Residual ‖Fψ − λψ‖ up to which ψ counts as an eigenvector of F.
pub const EIGENSTATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyDetails {
    /// Leaf measurement order; absent for the same-state (strong) check.
    pub permutation: Option<Vec<usize>>,
    /// Hidden variables used, in order of use (lhs first).
    pub c_values: Vec<f64>,
    /// Value assigned to each leaf, indexed by leaf id.
    pub leaf_values: Vec<f64>,
    /// Sequential measurement records (weak check only).
    pub steps: Vec<MeasurementRecord>,
}

/// Both sides of M(f(B₁,…), [ψ]) = f̃(M(B₁,·), …).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub scenario_label: String,
    pub lhs_value: f64,
    pub rhs_value: f64,
    pub holds: bool,
    pub details: ConsistencyDetails,
}

impl ConsistencyReport {
    fn new(scenario_label: String, lhs_value: f64, rhs_value: f64, details: ConsistencyDetails) -> Self {
        let holds = (lhs_value - rhs_value).abs() <= VALUE_TOL;
        Self { scenario_label, lhs_value, rhs_value, holds, details }
    }
}

fn check_dim(f: &ObservableExpression, state: &PureState) -> Result<()> {
    if f.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: state.dim() });
    }
    Ok(())
}

/// Functional consistency at a single extended state: the leaves are all
/// predicted at the same `[ψ, c]` as f itself, with no collapse.
pub fn check_strong_fc(f: &ObservableExpression, hs: &HiddenState) -> Result<ConsistencyReport> {
    check_dim(f, hs.state())?;
    let lhs = predict_operator(f.eval_operator(), hs)?;
    let leaf_values = f.leaves().iter().map(|leaf| predict_operator(leaf, hs)).collect::<Result<Vec<_>>>()?;
    let rhs = f.eval_real_slice(&leaf_values)?;
    let details =
        ConsistencyDetails { permutation: None, c_values: alloc::vec![hs.c()], leaf_values, steps: Vec::new() };
    Ok(ConsistencyReport::new(format!("strong FC: {}", f.eval_operator().display_label()), lhs, rhs, details))
}

fn validate_permutation(f: &ObservableExpression, permutation: &[LeafId]) -> Result<()> {
    let n = f.leaves().len();
    let mut seen = alloc::vec![false; n];
    for id in permutation {
        match seen.get_mut(id.0) {
            Some(s) if !*s => *s = true,
            _ => return Err(Error::InvalidPermutation(format!("{:?}", permutation))),
        }
    }
    if permutation.len() != n {
        return Err(Error::InvalidPermutation(format!("{:?}", permutation)));
    }
    Ok(())
}

/// Weak functional consistency along one measurement order.
///
/// The lhs is predicted at `initial`. The leaves are then measured
/// sequentially in `permutation` order: the first at `initial.c`, each later
/// one at a fresh hidden variable from `source`, collapsing in between.
pub fn check_weak_fc<S: HiddenSource + ?Sized>(
    f: &ObservableExpression,
    initial: &HiddenState,
    permutation: &[LeafId],
    source: &mut S,
) -> Result<ConsistencyReport> {
    check_dim(f, initial.state())?;
    validate_permutation(f, permutation)?;
    let lhs = predict_operator(f.eval_operator(), initial)?;

    let mut leaf_values = alloc::vec![f64::NAN; f.leaves().len()];
    let mut steps = Vec::with_capacity(permutation.len());
    let mut c_values = alloc::vec![initial.c()];
    let mut hs = initial.clone();
    for (k, id) in permutation.iter().enumerate() {
        if k > 0 {
            let c = source.next_hidden()?;
            c_values.push(c);
            hs = hs.with_c(c)?;
        }
        let (record, post) = measure_at(&f.leaves()[id.0], &hs)?;
        leaf_values[id.0] = record.value;
        steps.push(record);
        hs = hs.with_state(post);
    }
    let rhs = f.eval_real_slice(&leaf_values)?;
    let details = ConsistencyDetails {
        permutation: Some(permutation.iter().map(|id| id.0).collect()),
        c_values,
        leaf_values,
        steps,
    };
    Ok(ConsistencyReport::new(format!("weak FC: {}", f.eval_operator().display_label()), lhs, rhs, details))
}

/// All N! leaf orders of f, in lexicographic order.
pub fn leaf_permutations(f: &ObservableExpression) -> Vec<Vec<LeafId>> {
    let n = f.leaves().len();
    f.leaf_ids().permutations(n).collect()
}

/// [`check_weak_fc`] for every leaf order, each starting from `initial`.
pub fn check_weak_fc_all<S: HiddenSource + ?Sized>(
    f: &ObservableExpression,
    initial: &HiddenState,
    source: &mut S,
) -> Result<Vec<ConsistencyReport>> {
    leaf_permutations(f).iter().map(|perm| check_weak_fc(f, initial, perm, source)).collect()
}

/// Pass/fail tally of a randomized weak-FC verification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropositionSummary {
    pub trials: usize,
    pub permutations: usize,
    pub checks: usize,
    pub passes: usize,
    pub failures: usize,
}

/// Checks weak functional consistency from an eigenstate ψ of f(B₁, …) over
/// `trials` seeded hidden-variable streams and all leaf orders. Trial `t`
/// draws from [`substream`]`(seed, t)`.
///
/// Errors with [`Error::NotAnEigenstate`] when ψ is not an eigenvector of f.
pub fn verify_proposition(
    f: &ObservableExpression,
    psi: &PureState,
    trials: usize,
    seed: u64,
) -> Result<PropositionSummary> {
    check_dim(f, psi)?;
    let (_, residual) = f.eval_operator().eigen_residual(psi)?;
    if residual > EIGENSTATE_TOL {
        return Err(Error::NotAnEigenstate { residual });
    }
    let perms = leaf_permutations(f);
    let mut passes = 0;
    for t in 0..trials {
        let mut rng = substream(seed, t as u64);
        let initial = HiddenState::new(psi.clone(), draw_hidden(&mut rng))?;
        for perm in &perms {
            if check_weak_fc(f, &initial, perm, &mut rng)?.holds {
                passes += 1;
            }
        }
    }
    let checks = trials * perms.len();
    Ok(PropositionSummary { trials, permutations: perms.len(), checks, passes, failures: checks - passes })
}

/// Outcome of enumerating every ±1 assignment to the nine square cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoGoResult {
    pub total_assignments: usize,
    /// Assignments meeting all six product constraints.
    pub satisfying_assignments: usize,
    /// Assignments meeting the three column constraints that carry an odd number of −1s.
    pub parity_odd_count: usize,
    /// Assignments meeting the three row constraints that carry an even number of −1s.
    pub parity_even_count: usize,
    pub row_satisfying: usize,
    pub column_satisfying: usize,
    /// Row-constraint assignments that violate some column constraint.
    pub row_only: usize,
    pub row_constraints: [i8; 3],
    pub column_constraints: [i8; 3],
}

fn sign_of(value: f64) -> i8 {
    if value < 0.0 {
        -1
    } else {
        1
    }
}

/// Enumerates all 2⁹ maps from the square's cells to ±1 and counts those
/// whose row and column products match the operator identities R̂ᵢ, Ĉⱼ = ±I.
/// The constraint signs are read off the square's product operators.
pub fn no_go_search(square: &PeresMerminSquare) -> Result<NoGoResult> {
    let mut row_constraints = [0i8; 3];
    let mut column_constraints = [0i8; 3];
    for k in 0..3 {
        row_constraints[k] = sign_of(square.line_value(Line::Row(k))?);
        column_constraints[k] = sign_of(square.line_value(Line::Column(k))?);
    }

    let line_ok = |mask: u32, line: Line, target: i8| {
        let minus = line.cells().iter().filter(|&&(r, c)| mask >> (3 * r + c) & 1 == 1).count();
        let product = if minus % 2 == 0 { 1 } else { -1 };
        product == target
    };

    let mut result = NoGoResult {
        total_assignments: 0,
        satisfying_assignments: 0,
        parity_odd_count: 0,
        parity_even_count: 0,
        row_satisfying: 0,
        column_satisfying: 0,
        row_only: 0,
        row_constraints,
        column_constraints,
    };
    for mask in 0u32..(1 << 9) {
        result.total_assignments += 1;
        let rows = (0..3).all(|k| line_ok(mask, Line::Row(k), row_constraints[k]));
        let cols = (0..3).all(|k| line_ok(mask, Line::Column(k), column_constraints[k]));
        let odd = mask.count_ones() % 2 == 1;
        if rows {
            result.row_satisfying += 1;
            if !odd {
                result.parity_even_count += 1;
            }
            if !cols {
                result.row_only += 1;
            }
        }
        if cols {
            result.column_satisfying += 1;
            if odd {
                result.parity_odd_count += 1;
            }
        }
        if rows && cols {
            result.satisfying_assignments += 1;
        }
    }
    Ok(result)
}
