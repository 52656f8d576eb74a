//! Argument parsing and dispatch for the `hvmodel` binary.
//!
//! Exit codes: 0 when the run's check passes, 1 when it fails, 2 on usage
//! errors (bad flags, unsupported format).

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use hvmodel_core::consistency::{check_strong_fc, no_go_search, ConsistencyReport};
use hvmodel_core::expr::{peres_mermin, Line, SQUARE_IDENTITY_TOL};
use hvmodel_core::model::HiddenState;
use hvmodel_core::opalg::{pauli, Axis};
use serde::Serialize;

use crate::error::ExperimentError;
use crate::experiments::{
    born_experiment_with_trials, chsh_experiment, implications_demo, line_product_experiment, run_table1,
    spin_half_state, strong_fc_battery, weak_fc_exhaustion, BatterySummary, ExperimentConfig, TrialRow, TABLE1_C,
};
use crate::report::{self, Format};

const AFTER_HELP: &str = "\
CSV output (--format csv) has one row per measurement with columns
trial,setting,c,value. It is available for table1, born, weak-fc, chsh and
column-product.

Exit status: 0 pass, 1 check failed, 2 usage error.";

#[derive(Debug, Parser)]
#[command(name = "hvmodel", version, about = "Hidden-variable model of sequential quantum measurements", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Trial count (default depends on the subcommand).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: Option<u64>,

    /// Polar angle θ of cos θ|0⟩ + sin θ|1⟩ for `born`, radians.
    #[arg(long, global = true, default_value_t = std::f64::consts::FRAC_PI_3, allow_negative_numbers = true)]
    pub theta: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Statistical tolerance in standard deviations.
    #[arg(long = "tolerance-sigma", global = true, default_value_t = 5.0)]
    pub tolerance_sigma: f64,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LineArg {
    Row1,
    Row2,
    Row3,
    Col1,
    Col2,
    Col3,
}

impl From<LineArg> for Line {
    fn from(l: LineArg) -> Line {
        match l {
            LineArg::Row1 => Line::Row(0),
            LineArg::Row2 => Line::Row(1),
            LineArg::Row3 => Line::Row(2),
            LineArg::Col1 => Line::Column(0),
            LineArg::Col2 => Line::Column(1),
            LineArg::Col3 => Line::Column(2),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replay the three-iteration Peres-Mermin table at c = 0.4, 0.1, 0.7 from |00⟩.
    Table1,
    /// Born statistics of σz on cos θ|0⟩ + sin θ|1⟩ (default 100000 trials).
    Born,
    /// Check the Peres-Mermin row/column product identities and commutation.
    PmSquare,
    /// Enumerate all 512 ±1 assignments of the square against the product constraints.
    NoGo,
    /// Sequential line products from |00⟩ over all orders (default col3, 1000 trials).
    WeakFc {
        #[arg(long, value_enum, default_value_t = LineArg::Col3)]
        line: LineArg,
    },
    /// Same-state line check at (|00⟩, c) plus the common-eigenket battery (default 500 cases).
    StrongFc {
        #[arg(long, value_enum, default_value_t = LineArg::Col3)]
        line: LineArg,
        #[arg(long, default_value_t = 0.4)]
        c: f64,
    },
    /// Deduce B1, B2 from the measured C on (|10⟩ + |01⟩)/√2.
    Implications {
        #[arg(long, default_value_t = 0.4)]
        c: f64,
    },
    /// CHSH on (|00⟩ + |11⟩)/√2 (default 100000 trials per setting).
    Chsh,
    /// Sequential line products from random states over all orders (default col3, 1000 trials).
    ColumnProduct {
        #[arg(long, value_enum, default_value_t = LineArg::Col3)]
        line: LineArg,
    },
}

/// Rendered report and verdict of one run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub output: String,
    pub pass: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
}

impl From<hvmodel_core::Error> for CliError {
    fn from(e: hvmodel_core::Error) -> Self {
        CliError::Experiment(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Experiment(ExperimentError::Config(_)) => 2,
            CliError::Experiment(ExperimentError::Model(hvmodel_core::Error::HiddenOutOfRange { .. })) => 2,
            CliError::Experiment(_) => 1,
        }
    }
}

impl Cli {
    fn config(&self, default_trials: usize) -> Result<ExperimentConfig, CliError> {
        let cfg = ExperimentConfig {
            seed: self.seed,
            trials: self.trials.map_or(default_trials, |t| t as usize),
            theta: self.theta,
            tolerance_sigma: self.tolerance_sigma,
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    fn no_csv(&self, name: &str) -> Result<(), CliError> {
        if self.format == Format::Csv {
            return Err(CliError::Usage(format!("{name} has no per-trial data; use --format text or json")));
        }
        Ok(())
    }
}

fn render<T: Serialize>(
    format: Format,
    value: &T,
    rows: &[TrialRow],
    text: impl FnOnce() -> String,
) -> Result<String, CliError> {
    Ok(match format {
        Format::Json => report::to_json(value),
        Format::Csv => report::to_csv(rows).map_err(|e| CliError::Usage(e.to_string()))?,
        Format::Text => text(),
    })
}

#[derive(Serialize)]
struct Table1Json<'a> {
    pass: bool,
    mismatch: Option<String>,
    #[serde(flatten)]
    replay: &'a crate::experiments::Table1Replay,
}

#[derive(Serialize)]
struct SquareJson {
    cells: Vec<Vec<String>>,
    row_values: [f64; 3],
    column_values: [f64; 3],
    max_commutator: f64,
    max_identity_deviation: f64,
    pass: bool,
}

#[derive(Serialize)]
struct StrongFcJson {
    witness: ConsistencyReport,
    common_eigenkets: BatterySummary,
    pass: bool,
}

/// Runs the parsed invocation and renders its report.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let square = peres_mermin();
    match &cli.command {
        Command::Table1 => {
            let replay = run_table1(TABLE1_C)?;
            let mismatch = match replay.check() {
                Ok(()) => None,
                Err(e @ ExperimentError::TableMismatch { .. }) => Some(e.to_string()),
                Err(e) => return Err(e.into()),
            };
            let pass = mismatch.is_none();
            let rows: Vec<TrialRow> = replay
                .trace
                .records
                .iter()
                .enumerate()
                .map(|(i, r)| TrialRow {
                    trial: i + 1,
                    setting: r.observable_label.clone(),
                    c: r.c_used,
                    value: r.value,
                })
                .collect();
            let json = Table1Json { pass, mismatch: mismatch.clone(), replay: &replay };
            let output = render(cli.format, &json, &rows, || report::table1_text(&replay, mismatch.as_deref()))?;
            Ok(Outcome { output, pass })
        }
        Command::Born => {
            let cfg = cli.config(100_000)?;
            let obs = pauli(Axis::Z);
            let keep = cli.format == Format::Csv;
            let r = born_experiment_with_trials(&cfg, &spin_half_state(cfg.theta), &obs, 0, keep)?;
            let output = render(cli.format, &r, &r.rows, || report::stat_text(&r))?;
            Ok(Outcome { output, pass: r.pass })
        }
        Command::PmSquare => {
            cli.no_csv("pm-square")?;
            let identities = square.verify()?;
            let expected_rows = [1.0, 1.0, 1.0];
            let expected_cols = [1.0, 1.0, -1.0];
            let mut max_identity_deviation: f64 = 0.0;
            for k in 0..3 {
                for (line, expected) in [(Line::Row(k), expected_rows[k]), (Line::Column(k), expected_cols[k])] {
                    let m = square.line_product(line).matrix();
                    let target =
                        hvmodel_core::opalg::Matrix::identity(4).scale(num_complex::Complex64::new(expected, 0.0));
                    max_identity_deviation = max_identity_deviation.max(m.frobenius_distance(&target));
                }
            }
            let pass = identities.row_values == expected_rows
                && identities.column_values == expected_cols
                && max_identity_deviation <= SQUARE_IDENTITY_TOL
                && identities.max_commutator <= hvmodel_core::expr::COMMUTE_TOL;
            let cells = square.grid().iter().map(|row| row.iter().map(|op| op.display_label()).collect()).collect();
            let json = SquareJson {
                cells,
                row_values: identities.row_values,
                column_values: identities.column_values,
                max_commutator: identities.max_commutator,
                max_identity_deviation,
                pass,
            };
            let output = render(cli.format, &json, &[], || report::square_text(&identities, pass))?;
            Ok(Outcome { output, pass })
        }
        Command::NoGo => {
            cli.no_csv("no-go")?;
            let r = no_go_search(&square)?;
            let pass = r.satisfying_assignments == 0;
            let output = render(cli.format, &r, &[], || report::no_go_text(&r))?;
            Ok(Outcome { output, pass })
        }
        Command::WeakFc { line } => {
            let cfg = cli.config(1000)?;
            let s = weak_fc_exhaustion(&square, (*line).into(), cfg.trials, cfg.seed)?;
            let output = render(cli.format, &s, &s.rows, || report::lines_text(&s))?;
            Ok(Outcome { output, pass: s.pass() })
        }
        Command::ColumnProduct { line } => {
            let cfg = cli.config(1000)?;
            let s = line_product_experiment(&square, (*line).into(), cfg.trials, cfg.seed)?;
            let output = render(cli.format, &s, &s.rows, || report::lines_text(&s))?;
            Ok(Outcome { output, pass: s.pass() })
        }
        Command::StrongFc { line, c } => {
            cli.no_csv("strong-fc")?;
            let cfg = cli.config(500)?;
            let f = square.line_expression((*line).into())?;
            let hs = HiddenState::new(crate::experiments::ket(&[0, 0]), *c)?;
            let witness = check_strong_fc(&f, &hs)?;
            let battery = strong_fc_battery(cfg.trials, cfg.seed)?;
            let pass = battery.failures == 0;
            let json = StrongFcJson { witness, common_eigenkets: battery, pass };
            let output = render(cli.format, &json, &[], || {
                format!(
                    "same-state check at |00⟩:\n{}\n{}",
                    report::consistency_text(&json.witness),
                    report::battery_text(&json.common_eigenkets)
                )
            })?;
            Ok(Outcome { output, pass })
        }
        Command::Implications { c } => {
            cli.no_csv("implications")?;
            let r = implications_demo(*c)?;
            let output = render(cli.format, &r, &[], || report::implications_text(&r))?;
            Ok(Outcome { output, pass: r.post_collapse_consistent })
        }
        Command::Chsh => {
            let cfg = cli.config(100_000)?;
            let r = chsh_experiment(&cfg, cli.format == Format::Csv)?;
            let output = render(cli.format, &r, &r.rows, || report::chsh_text(&r))?;
            Ok(Outcome { output, pass: r.pass })
        }
    }
}

/// Parses `args`, runs, writes the report and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("hvmodel: {e}");
            return e.exit_code();
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.output),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(outcome.output.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("hvmodel: cannot write report: {e}");
        return 2;
    }
    if outcome.pass {
        0
    } else {
        1
    }
}
