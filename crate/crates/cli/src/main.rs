//! `fmgl`: fixed-memory Grünwald-Letnikov derivatives from the command line.
//!
//! Every subcommand prints a CSV table (or JSON with `--json`). Flags take
//! precedence over `FMGL_*` environment variables, which take precedence
//! over defaults. Exit codes: 0 success, 2 usage, 3 numeric failure,
//! 4 solver failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "fmgl",
    version,
    about = "Fixed-memory Grünwald-Letnikov fractional derivatives"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit JSON (with schema version and effective config) instead of CSV.
    #[arg(long, global = true, env = "FMGL_JSON")]
    json: bool,

    /// Write the table here instead of stdout.
    #[arg(long, global = true, env = "FMGL_OUT")]
    out: Option<PathBuf>,

    /// Write the JSON run report here (defaults to `<out>.json` for
    /// simulate, sweep, interp and fig1 when `--out` is given).
    #[arg(long, global = true, visible_alias = "report", env = "FMGL_SIDECAR")]
    sidecar: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fractional derivative of a function on [t0, t1].
    Derive(DeriveArgs),
    /// Integrate a linear fixed-memory system from a history segment.
    Simulate(SimulateArgs),
    /// Grünwald weights w_0..w_N.
    Weights(WeightsArgs),
    /// Two-parameter Mittag-Leffler function.
    Ml(MlArgs),
    /// Gamma and reciprocal Gamma.
    Gamma(GammaArgs),
    /// Classical derivative with a fixed lower terminal.
    Classic(ClassicArgs),
    /// Closed-form derivative for several memory lengths.
    Sweep(SweepArgs),
    /// Derivative next to the integer orders it interpolates.
    Interp(InterpArgs),
    /// Classical derivative of sin against its periodic asymptote.
    Fig1(Fig1Args),
    /// Closed-form derivative of a catalog function.
    Oracle(OracleArgs),
    /// Random expressions for parser testing.
    Corpus(CorpusArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Discrete,
    Integral,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Rotation,
    File,
}

/// Function syntax: sin | cos | exp | const:C | pow:N | poly:c0,c1,… |
/// fourier:s1,c1;s2,c2;… | an expression in t.
#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct DeriveArgs {
    #[arg(long = "fn", env = "FMGL_FN")]
    #[serde(rename = "fn")]
    pub function: String,
    #[arg(long, env = "FMGL_ALPHA")]
    pub alpha: f64,
    #[arg(long = "L", env = "FMGL_L")]
    #[serde(rename = "L")]
    pub memory: f64,
    #[arg(long = "N", env = "FMGL_N")]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long, env = "FMGL_T0")]
    pub t0: f64,
    #[arg(long, env = "FMGL_T1")]
    pub t1: f64,
    #[arg(long, value_enum, default_value = "discrete", env = "FMGL_METHOD")]
    pub method: Method,
    /// Quadrature panels for the integral method.
    #[arg(long, default_value_t = 1024, env = "FMGL_PANELS")]
    pub panels: usize,
    /// Add oracle and abs_error columns (closed form, or the integral form
    /// for expressions).
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "rotation", env = "FMGL_SYSTEM")]
    pub system: SystemKind,
    /// Square matrix for `--system file`: one row per line, entries
    /// separated by commas or spaces.
    #[arg(long, env = "FMGL_MATRIX_FILE")]
    pub matrix_file: Option<PathBuf>,
    #[arg(long, env = "FMGL_ALPHA")]
    pub alpha: f64,
    #[arg(long = "L", env = "FMGL_L")]
    #[serde(rename = "L")]
    pub memory: f64,
    #[arg(long = "N", env = "FMGL_N")]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 0.0, env = "FMGL_T0")]
    pub t0: f64,
    #[arg(long = "t-end", env = "FMGL_T_END")]
    pub t_end: f64,
    /// `cossin` or one function per component separated by `;`.
    #[arg(long, default_value = "cossin", env = "FMGL_HISTORY")]
    pub history: String,
    /// Amplitude applied to the history.
    #[arg(long, default_value_t = 1.0, env = "FMGL_C")]
    pub c: f64,
    /// Period for the defect report; must be a whole number of steps.
    /// Defaults to the grid multiple nearest 2π.
    #[arg(long, env = "FMGL_PERIOD")]
    pub period: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct WeightsArgs {
    #[arg(long, env = "FMGL_ALPHA")]
    pub alpha: f64,
    #[arg(long = "N", env = "FMGL_N")]
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct MlArgs {
    #[arg(long, env = "FMGL_ALPHA")]
    pub alpha: f64,
    #[arg(long, env = "FMGL_BETA")]
    pub beta: f64,
    #[arg(long)]
    pub z: f64,
    #[arg(long, default_value_t = fmgl::specfun::DEFAULT_TOL, env = "FMGL_TOL")]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct GammaArgs {
    /// One or more arguments, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub x: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct ClassicArgs {
    #[arg(long = "fn", env = "FMGL_FN")]
    #[serde(rename = "fn")]
    pub function: String,
    #[arg(long, env = "FMGL_ALPHA")]
    pub alpha: f64,
    /// Lower terminal.
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    #[arg(long, env = "FMGL_T0")]
    pub t0: f64,
    #[arg(long, env = "FMGL_T1")]
    pub t1: f64,
    #[arg(long, default_value_t = 101, env = "FMGL_POINTS")]
    pub points: usize,
    /// Subintervals of [a, t].
    #[arg(long, default_value_t = 8192, env = "FMGL_STEPS")]
    pub steps: usize,
    /// Compare against t^{1-α} E_{2,2-α}(-t²) (sin with a = 0 only).
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    #[arg(long = "fn", default_value = "sin", env = "FMGL_FN")]
    #[serde(rename = "fn")]
    pub function: String,
    #[arg(long, env = "FMGL_ALPHA")]
    pub alpha: f64,
    /// Increasing memory lengths, comma separated.
    #[arg(long = "Ls", value_delimiter = ',', default_value = "10,20,30,60")]
    #[serde(rename = "Ls")]
    pub ls: Vec<f64>,
    #[arg(long, default_value_t = 0.0, env = "FMGL_T0")]
    pub t0: f64,
    #[arg(long, default_value_t = 4.0 * std::f64::consts::PI, env = "FMGL_T1")]
    pub t1: f64,
    #[arg(long, default_value_t = 401, env = "FMGL_POINTS")]
    pub points: usize,
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct InterpArgs {
    #[arg(long = "fn", default_value = "sin", env = "FMGL_FN")]
    #[serde(rename = "fn")]
    pub function: String,
    #[arg(long)]
    pub t: f64,
    #[arg(long = "L", env = "FMGL_L")]
    #[serde(rename = "L")]
    pub memory: f64,
    /// Orders in one bracket (m-1, m), comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub alphas: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct Fig1Args {
    #[arg(long, env = "FMGL_ALPHA")]
    pub alpha: f64,
    #[arg(long = "t-max", default_value_t = 35.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 700, env = "FMGL_STEPS")]
    pub steps: usize,
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct OracleArgs {
    #[arg(long = "fn", env = "FMGL_FN")]
    #[serde(rename = "fn")]
    pub function: String,
    #[arg(long, env = "FMGL_ALPHA")]
    pub alpha: f64,
    #[arg(long = "L", env = "FMGL_L")]
    #[serde(rename = "L")]
    pub memory: f64,
    #[arg(long, env = "FMGL_T0")]
    pub t0: f64,
    #[arg(long, env = "FMGL_T1")]
    pub t1: f64,
    #[arg(long, default_value_t = 101, env = "FMGL_POINTS")]
    pub points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CorpusArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 4)]
    pub depth: u32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match cli.command {
        Command::Derive(a) => commands::derive(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Weights(a) => commands::weights(&a),
        Command::Ml(a) => commands::ml(&a),
        Command::Gamma(a) => commands::gamma(&a),
        Command::Classic(a) => commands::classic(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Interp(a) => commands::interp(&a),
        Command::Fig1(a) => commands::fig1(&a),
        Command::Oracle(a) => commands::oracle(&a),
        Command::Corpus(a) => commands::corpus(&a),
    };
    let result = report.and_then(|r| {
        r.emit(cli.json, cli.out.as_deref(), cli.sidecar.as_deref())
            .map_err(commands::CliError::from)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fmgl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
