//! `osr` — batch pipeline for data-driven effort estimation: prepare messy
//! project data, summarize it, run the cross-validated estimator/baseline
//! comparison, and estimate single projects.
//!
//! Every command is deterministic given its input files, configuration, and
//! master seed. Exit codes: 0 success, 1 validation error (bad files or
//! parameters), 2 analysis infeasibility (valid data that cannot support the
//! requested computation).

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use osr_core::ErrorCategory;

#[derive(Debug, Parser)]
#[command(name = "osr", version, about = "Set-reduction effort estimation on project data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean a raw dataset: unify categories, split variables, drop
    /// mostly-missing projects and uninformative variables.
    Prep(CommonArgs),
    /// Print dataset counts and write box summaries with outlier flags.
    Summary(CommonArgs),
    /// Run the parameter grid search and the regression baseline under one
    /// fold plan and write comparison reports.
    Analyze(CommonArgs),
    /// Estimate one target project and print the models behind the estimate.
    Predict {
        #[command(flatten)]
        args: CommonArgs,
        /// CSV file with the dataset header and exactly one project row; the
        /// dependent cell may be empty.
        target: PathBuf,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML config file; command-line flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dataset CSV (first column project id).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Schema file: one `name,scale,role` line per variable.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Category mapping CSV (variable,old_label,new_label).
    #[arg(long)]
    pub mapping: Option<PathBuf>,
    /// Split-rule CSV; repeat for several rules.
    #[arg(long)]
    pub splits: Vec<PathBuf>,
    /// Redundant variables to drop, comma-separated or repeated.
    #[arg(long, value_delimiter = ',')]
    pub drop: Vec<String>,
    /// Drop variables with at least this missing fraction (default 0.9).
    #[arg(long)]
    pub max_missing: Option<f64>,
    /// Drop projects with more than this fraction of missing independent
    /// cells (default 0.6).
    #[arg(long)]
    pub project_missing: Option<f64>,
    /// Parameter grid: `default` or `single:(fn,objective,set_size,preds)`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Fold strategy: `loocv` or `k:N`.
    #[arg(long)]
    pub folds: Option<String>,
    /// Bootstrap significance level (default 0.05).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Bootstrap draws (default 1000).
    #[arg(long)]
    pub draws: Option<usize>,
    /// Master seed; all randomness derives from it (default 42).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Size variable for the regression baseline.
    #[arg(long)]
    pub size_var: Option<String>,
    /// Output directory (default `osr-out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Send split labels missing from a rule table to missing instead of
    /// failing.
    #[arg(long)]
    pub lenient_splits: bool,
    /// Admit non-standard prediction/objective pairings in the grid.
    #[arg(long)]
    pub allow_any_pairing: bool,
}

#[derive(Debug)]
pub enum CliError {
    Core(osr_core::Error),
    /// A core error tied to the input file it came from; parse errors keep
    /// their row/column positions and gain the path.
    InFile {
        path: PathBuf,
        source: osr_core::Error,
    },
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Config(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::InFile { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Config(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<osr_core::Error> for CliError {
    fn from(e: osr_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// 1 for validation problems, 2 for analysis infeasibility.
    pub fn exit_code(&self) -> i32 {
        let category = match self {
            CliError::Core(e) | CliError::InFile { source: e, .. } => e.category(),
            CliError::Io { .. } | CliError::Config(_) => ErrorCategory::Validation,
        };
        match category {
            ErrorCategory::Validation => 1,
            ErrorCategory::Infeasibility => 2,
        }
    }
}

/// Execute a parsed command; returns the text to print on stdout. Report
/// files are written under the configured output directory.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Prep(args) => commands::prep(&config::RunConfig::resolve(args)?),
        Command::Summary(args) => commands::summary(&config::RunConfig::resolve(args)?),
        Command::Analyze(args) => commands::analyze(&config::RunConfig::resolve(args)?),
        Command::Predict { args, target } => {
            commands::predict(&config::RunConfig::resolve(args)?, target)
        }
    }
}
