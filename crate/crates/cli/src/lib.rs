//! Command-line driver: verification runs, the extension-constant oracle and
//! report export.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lipext_core::extension::{mcshane_operator, nearest_point_retraction, retraction_operator};
use lipext_core::free_space::{extension_constant_lp, operator_norm_from_extension, operator_norm_from_matrix, EconstOptions};
use lipext_core::io::{read_json, read_space, LpOracleReport, SpaceFile, SubsetFile, UpperBound};
use lipext_core::{Error, OperatorKind};

pub mod report;
pub mod verify;

pub use report::{Row, RowKind, RunReport};
pub use verify::{Target, VerifyParams};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: Error,
    },
    #[error("no prior run in this directory (expected {})", report::RUN_STORE)]
    NoPriorRun,
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// The library error underneath, if any.
    pub fn core(&self) -> Option<&Error> {
        match self {
            CliError::Core { source, .. } => Some(source),
            _ => None,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lipext", version, about = "Verify Lipschitz extension constructions on finite metric spaces")]
pub struct Cli {
    /// Tolerance for pass/fail comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Also write the output to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a construction and certify its constants.
    Verify(VerifyArgs),
    /// Solve for the extension constant e(S, M) and compare with constructed operators.
    ComputeE(ComputeEArgs),
    /// Export every run recorded in the working directory.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// Dimension, set count or points per set, depending on the target.
    #[arg(long)]
    pub n: Option<usize>,
    /// Box side, window half-width, gap or mesh exponent, depending on the target.
    #[arg(long = "box", allow_negative_numbers = true)]
    pub box_size: Option<i64>,
    /// Ambient dimension for the ball sequences.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Random functions (or point pairs) to sample.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ComputeEArgs {
    /// Space file; overrides the space referenced by the subset file.
    #[arg(long)]
    pub space: Option<PathBuf>,
    #[arg(long)]
    pub subset: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug)]
pub enum Outcome {
    Run(RunReport),
    Export(String),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Run(r) if !r.pass => 1,
            _ => 0,
        }
    }

    /// Text written to stdout and `--out`.
    pub fn text(&self) -> String {
        match self {
            Outcome::Run(r) => r.to_canonical_json(),
            Outcome::Export(s) => s.clone(),
        }
    }
}

pub fn exit_code(result: &Result<Outcome, CliError>) -> i32 {
    match result {
        Ok(o) => o.exit_code(),
        Err(_) => 2,
    }
}

/// Runs one command with `dir` as the working directory for the run store.
pub fn run(cli: &Cli, dir: &Path) -> Result<Outcome, CliError> {
    let outcome = match &cli.command {
        Command::Verify(a) => {
            let params = VerifyParams {
                n: a.n,
                box_size: a.box_size,
                dim: a.dim,
                trials: a.trials,
                seed: a.seed,
                tol: cli.tol,
            };
            Outcome::Run(verify::run(a.target, &params)?)
        }
        Command::ComputeE(a) => Outcome::Run(compute_e(a.space.as_deref(), &a.subset, cli.tol)?),
        Command::Report(a) => {
            let runs = report::load_runs(dir)?;
            Outcome::Export(match a.format {
                Format::Json => report::reports_json(&runs),
                Format::Csv => report::reports_csv(&runs)?,
            })
        }
    };
    if let Outcome::Run(r) = &outcome {
        report::append_run(dir, r)?;
    }
    if let Some(path) = &cli.out {
        report::write_file(&dir.join(path), &outcome.text())?;
    }
    Ok(outcome)
}

fn parse_error(e: Error) -> CliError {
    CliError::Core { context: "reading input".into(), source: e }
}

/// `e(S, M)` from the LP, checked against the exact norm of its optimal
/// operator and bracketed by the constructed operators.
pub fn compute_e(space: Option<&Path>, subset: &Path, tol: f64) -> Result<RunReport, CliError> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(CliError::Usage(format!("--tol must be a non-negative number, got {tol}")));
    }
    let space = match space {
        Some(p) => Some(Arc::new(read_space(p).map_err(parse_error)?)),
        None => None,
    };
    let file: SubsetFile = read_json(subset).map_err(parse_error)?;
    let (m, s) = file.resolve(space, Some(subset)).map_err(parse_error)?;
    let ctx = |what: &'static str| move |source| CliError::Core { context: what.to_string(), source };

    let lp = extension_constant_lp(&m, &s, &EconstOptions::default()).map_err(ctx("extension constant LP"))?;
    let lp_norm = operator_norm_from_matrix(&m, &lp.matrix).map_err(ctx("norm of the optimal operator"))?;
    let mut rows = vec![
        Row::upper("e_at_least_one", lp.value, 1.0, tol),
        Row::equality("optimal_operator_norm", lp.value, lp_norm.value, tol.max(1e-7)),
    ];

    let mut upper_bounds = Vec::new();
    let mc = mcshane_operator(m.clone(), s.clone(), None).map_err(ctx("McShane operator"))?;
    upper_bounds.push(UpperBound {
        kind: OperatorKind::Mcshane,
        norm: operator_norm_from_extension(&mc).map_err(ctx("McShane operator norm"))?.value,
    });
    let r = nearest_point_retraction(&m, &s).map_err(ctx("nearest-point retraction"))?;
    let ret = retraction_operator(m.clone(), s.clone(), r, OperatorKind::Composed, json!({ "rule": "nearest point" }))
        .map_err(ctx("retraction operator"))?;
    upper_bounds.push(UpperBound {
        kind: OperatorKind::Composed,
        norm: operator_norm_from_extension(&ret).map_err(ctx("retraction operator norm"))?.value,
    });
    for ub in &upper_bounds {
        rows.push(Row::upper(format!("e_below_{}", ub.kind.as_str()), ub.norm, lp.value, tol));
    }

    let oracle = LpOracleReport {
        source: s.indices().to_vec(),
        space: canonical_space(&m),
        e: lp.value,
        upper_bounds,
        vertices_used: lp.vertices_used,
    };
    let inputs = report::inputs(vec![
        ("space", serde_json::to_value(SpaceFile::from_space(&m)).expect("space serializes")),
        ("subset", json!(s.indices())),
        ("tol", json!(tol)),
    ]);
    let mut out = RunReport::new("compute-e", inputs, rows);
    out.details = Some(json!({
        "oracle": oracle,
        "operator": {
            "pin": lp.matrix.pin,
            "basis": lp.matrix.basis,
            "rows": lp.matrix.rows,
        },
    }));
    Ok(out)
}

fn canonical_space(m: &lipext_core::FiniteMetricSpace) -> String {
    report::canonical_json(&serde_json::to_value(SpaceFile::from_space(m)).expect("space serializes"))
}
