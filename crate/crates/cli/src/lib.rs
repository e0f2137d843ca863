//! Command line driver for `cornercut`: reads a TOML run config, refines
//! points or nets, checks the measured distances against their bounds and
//! exports geometry plus a JSON report.

// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod export;
pub mod registry;
pub mod report;
pub mod run;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_config, resolve, Mode, Overrides};
use crate::run::{execute, exit};

/// Environment variable that overrides the per-surface cache budget.
pub const CACHE_BUDGET_ENV: &str = "CORNERCUT_CACHE_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "cornercut", version, about = "Non-uniform corner cutting for points and nets of functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a weight schedule against the convergence conditions.
    Certify(RunArgs),
    /// Refine a polyline.
    Points(RunArgs),
    /// Refine a net of functions.
    Net(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML run configuration.
    #[arg(short, long)]
    pub config: PathBuf,
    /// Output directory for geometry and report.json.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Number of refinement steps K.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Run even when the schedule is not certified.
    #[arg(long)]
    pub force: bool,
    /// Sampling density (per interval for points, per side for nets).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Do not print the report to stdout.
    #[arg(short, long)]
    pub quiet: bool,
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let (mode, a) = match &cli.command {
        Command::Certify(a) => (Mode::Certify, a),
        Command::Points(a) => (Mode::Points, a),
        Command::Net(a) => (Mode::Net, a),
    };
    let fail = |stderr: &mut dyn Write, msg: String| {
        let _ = writeln!(stderr, "error: {msg}");
        exit::CONFIG
    };
    let text = match std::fs::read_to_string(&a.config) {
        Ok(t) => t,
        Err(e) => return fail(stderr, format!("{}: {e}", a.config.display())),
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => return fail(stderr, format!("{}: {e}", a.config.display())),
    };
    let cache_budget = match std::env::var(CACHE_BUDGET_ENV) {
        Ok(v) => match v.trim().parse() {
            Ok(n) => Some(n),
            Err(_) => return fail(stderr, format!("{CACHE_BUDGET_ENV}=`{v}` is not a non-negative integer")),
        },
        Err(_) => None,
    };
    cfg.apply(&Overrides {
        levels: a.levels,
        force: a.force,
        samples: a.samples,
        output_dir: a.output.clone(),
        cache_budget: if mode == Mode::Net { cache_budget } else { None },
    });
    let base = a.config.parent().map(PathBuf::from).unwrap_or_default();
    let job = match resolve(&cfg, mode, &base) {
        Ok(j) => j,
        Err(e) => return fail(stderr, format!("{}: {e}", a.config.display())),
    };
    match execute(job, mode, cfg.output_dir.as_deref()) {
        Ok(outcome) => {
            if !a.quiet {
                let _ = writeln!(stdout, "{}", outcome.report.to_json());
            }
            if outcome.exit_code == exit::NOT_CERTIFIED && mode != Mode::Certify {
                let _ = writeln!(
                    stderr,
                    "error: schedule not certified (mu_sup = {}); pass --force to run anyway",
                    outcome.report.certificate.mu_sup
                );
            }
            outcome.exit_code
        }
        Err(e) => fail(stderr, e.to_string()),
    }
}
