//! Output formats: pretty JSON (the stable machine contract), per-trial CSV
//! and human-readable text.

use std::fmt::Write as _;

use clap::ValueEnum;
use hvmodel_core::consistency::{ConsistencyReport, NoGoResult};
use hvmodel_core::expr::SquareIdentities;
use hvmodel_core::opalg::PureState;
use serde::Serialize;

use crate::experiments::{
    BatterySummary, ChshReport, ImplicationsReport, LineProductSummary, StatReport, Table1Replay, TrialRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// CSV with header `trial,setting,c,value`.
pub fn to_csv(rows: &[TrialRow]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(["trial", "setting", "c", "value"])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn sign(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:+}")
    }
}

/// Sum of nonzero basis amplitudes, e.g. `0.7071|00⟩ + 0.7071|11⟩`.
pub fn format_ket(state: &PureState) -> String {
    let bits = state.dim().trailing_zeros() as usize;
    let terms: Vec<String> = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 1e-12)
        .map(|(i, a)| {
            let label = if state.dim().is_power_of_two() { format!("{i:0bits$b}") } else { i.to_string() };
            let coeff = if a.im.abs() < 1e-12 {
                format!("{:.4}", a.re)
            } else if a.re.abs() < 1e-12 {
                format!("{:.4}i", a.im)
            } else {
                format!("({:.4}{:+.4}i)", a.re, a.im)
            };
            format!("{coeff}|{label}⟩")
        })
        .collect();
    terms.join(" + ").replace("+ -", "- ")
}

pub fn table1_text(replay: &Table1Replay, mismatch: Option<&str>) -> String {
    let mut out = String::new();
    for it in &replay.iterations {
        let i = it.iteration;
        let _ = writeln!(out, "iteration {i}   c = {}", it.c);
        let _ = writeln!(out, "  initial state: {}", format_ket(&it.initial_state));
        for (r, row) in it.grid.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|&v| sign(v)).collect();
            let head = if r == 0 { format!("  M{i}(A) =") } else { "         ".into() };
            let _ = writeln!(out, "{head}  {}", cells.join("  "));
        }
        let rows: Vec<String> = it.row_values.iter().map(|&v| sign(v)).collect();
        let cols: Vec<String> = it.column_values.iter().map(|&v| sign(v)).collect();
        let _ = writeln!(out, "  M{i}(R1..R3) = {}   M{i}(C1..C3) = {}", rows.join(" "), cols.join(" "));
        let _ = writeln!(out, "  measured {} = {}", it.measured_label, sign(it.measured_value));
        let _ = writeln!(out, "  final state: {}", format_ket(&it.final_state));
        out.push('\n');
    }
    match mismatch {
        None => out.push_str("table1: PASS\n"),
        Some(m) => {
            let _ = writeln!(out, "table1: FAIL ({m})");
        }
    }
    out
}

pub fn stat_text(report: &StatReport) -> String {
    let mut out = format!("trials: {}\n", report.trials);
    out.push_str("value      frequency   probability   deviation/σ\n");
    for o in &report.outcomes {
        let _ = writeln!(
            out,
            "{:<10} {:<11.6} {:<13.6} {:.3}",
            sign(o.value),
            o.frequency,
            o.probability,
            o.sigma_deviation
        );
    }
    let _ = writeln!(out, "max_sigma_deviation: {:.3}", report.max_sigma_deviation);
    let _ = writeln!(out, "tolerance_sigma: {}", report.tolerance_sigma);
    let _ = writeln!(out, "pass: {}", report.pass);
    out
}

pub fn square_text(identities: &SquareIdentities, pass: bool) -> String {
    let rows: Vec<String> = identities.row_values.iter().map(|&v| sign(v)).collect();
    let cols: Vec<String> = identities.column_values.iter().map(|&v| sign(v)).collect();
    format!(
        "row products: {}\ncolumn products: {}\nmax_commutator: {:.3e}\npass: {pass}\n",
        rows.join(" "),
        cols.join(" "),
        identities.max_commutator
    )
}

pub fn no_go_text(r: &NoGoResult) -> String {
    let row: Vec<String> = r.row_constraints.iter().map(|&v| sign(f64::from(v))).collect();
    let col: Vec<String> = r.column_constraints.iter().map(|&v| sign(f64::from(v))).collect();
    format!(
        "total_assignments: {}\nsatisfying_assignments: {}\nrow_constraints: {}\ncolumn_constraints: {}\n\
         row_satisfying: {}\ncolumn_satisfying: {}\nrow_only: {}\nparity_odd_count: {}\nparity_even_count: {}\n",
        r.total_assignments,
        r.satisfying_assignments,
        row.join(" "),
        col.join(" "),
        r.row_satisfying,
        r.column_satisfying,
        r.row_only,
        r.parity_odd_count,
        r.parity_even_count
    )
}

pub fn lines_text(s: &LineProductSummary) -> String {
    let mut out = format!(
        "line: {}\nforced_value: {}\ntrials: {}\npermutations: {}\nchecks: {}\npasses: {}\nfailures: {}\n",
        s.line,
        sign(s.forced_value),
        s.trials,
        s.permutations,
        s.checks,
        s.passes,
        s.failures
    );
    if let Some(f) = &s.first_failure {
        let _ = writeln!(out, "first_failure: {} lhs {} rhs {}", f.scenario_label, f.lhs_value, f.rhs_value);
    }
    out
}

pub fn consistency_text(r: &ConsistencyReport) -> String {
    let leaves: Vec<String> = r.details.leaf_values.iter().map(|&v| sign(v)).collect();
    format!(
        "{}\n  c: {:?}\n  leaf values: {}\n  lhs: {}\n  rhs: {}\n  holds: {}\n",
        r.scenario_label,
        r.details.c_values,
        leaves.join(" "),
        sign(r.lhs_value),
        sign(r.rhs_value),
        r.holds
    )
}

pub fn battery_text(b: &BatterySummary) -> String {
    let mut out = format!("{}: {} cases, {} passes, {} failures\n", b.name, b.cases, b.passes, b.failures);
    if let Some(f) = &b.first_failure {
        let _ = writeln!(out, "  first failure: {f}");
    }
    out
}

pub fn implications_text(r: &ImplicationsReport) -> String {
    let mut out = format!("state: {}\nc: {}\n", format_ket(&r.state), r.c);
    let _ = writeln!(
        out,
        "direct:  M1(B1) = {}  M1(B2) = {}  M1(C) = {}",
        sign(r.direct.b1),
        sign(r.direct.b2),
        r.direct.c
    );
    let _ = writeln!(out, "C eigenvector: {}", format_ket(&r.c_eigenvector));
    let _ = writeln!(out, "deduced: B1 = {}  B2 = {}", sign(r.deduced_b1), sign(r.deduced_b2));
    let _ = writeln!(out, "mismatch: B1 {}  B2 {}  non_fc: {}", r.b1_mismatch, r.b2_mismatch, r.non_fc);
    let _ = writeln!(out, "post-collapse values equal deduced for all c: {}", r.post_collapse_consistent);
    let _ = writeln!(
        out,
        "reference values (B1, B2, C) = ({}, {}, {}); matches computed: {}",
        sign(r.reference.b1),
        sign(r.reference.b2),
        r.reference.c,
        r.matches_reference
    );
    out
}

pub fn chsh_text(r: &ChshReport) -> String {
    let mut out = format!("trials per setting: {}\n", r.trials_per_setting);
    out.push_str("setting  A     B             expected   product    sequential  consistent\n");
    for e in &r.correlators {
        let _ = writeln!(
            out,
            "{:<8} {:<5} {:<13} {:<10.6} {:<10.6} {:<11.6} {}",
            e.setting, e.alice, e.bob, e.expected, e.product, e.sequential, e.consistent
        );
    }
    let _ = writeln!(out, "S: {:.6}\nS (sequential): {:.6}\n2√2: {:.6}", r.s, r.s_sequential, r.tsirelson);
    let _ = writeln!(out, "pass: {}", r.pass);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{bell_phi_plus, ket};

    #[test]
    fn csv_has_the_documented_header() {
        let rows = vec![TrialRow { trial: 0, setting: "σz".into(), c: 0.25, value: -1.0 }];
        assert_eq!(to_csv(&rows).unwrap(), "trial,setting,c,value\n0,σz,0.25,-1.0\n");
        assert_eq!(to_csv(&[]).unwrap(), "trial,setting,c,value\n");
    }

    #[test]
    fn kets_print_in_the_computational_basis() {
        assert_eq!(format_ket(&ket(&[0, 0])), "1.0000|00⟩");
        assert_eq!(format_ket(&bell_phi_plus()), "0.7071|00⟩ + 0.7071|11⟩");
    }
}
