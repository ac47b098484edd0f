//! Error type shared across the crate.
//!
//! Errors fall into two categories used by callers to pick exit codes:
//! [`ErrorCategory::Validation`] for malformed inputs (files, schemas,
//! parameter values) and [`ErrorCategory::Infeasibility`] for data that is
//! structurally fine but cannot support the requested analysis.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad classification of an [`Error`], used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad input: parse failures, invariant violations, invalid parameters.
    Validation,
    /// Valid input that cannot support the requested computation.
    Infeasibility,
}

#[derive(Debug, Error)]
pub enum Error {
    // ---- CSV / schema parsing ----
    #[error("input has no header row")]
    MissingHeader,
    #[error("header names unknown column {name:?}")]
    UnknownColumn { name: String },
    #[error("schema variable {name:?} missing from header")]
    MissingColumn { name: String },
    #[error("duplicate column {name:?} in header")]
    DuplicateColumn { name: String },
    #[error("row {row}: expected {expected} fields, found {found}")]
    RowWidth {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {column:?}: invalid number {token:?}")]
    InvalidNumber {
        row: usize,
        column: String,
        token: String,
    },
    #[error("row {row}: duplicate project id {id:?}")]
    DuplicateProjectId { row: usize, id: String },
    #[error("row {row}: empty project id")]
    EmptyProjectId { row: usize },
    #[error("schema line {line}: {msg}")]
    SchemaSyntax { line: usize, msg: String },
    #[error("mapping line {line}: {msg}")]
    MappingSyntax { line: usize, msg: String },
    #[error("split-rule line {line}: {msg}")]
    SplitSyntax { line: usize, msg: String },
    #[error("grid spec: {msg}")]
    GridSyntax { msg: String },

    // ---- dataset construction ----
    #[error("duplicate variable name {name:?}")]
    DuplicateVariable { name: String },
    #[error("variable names must be non-empty")]
    EmptyVariableName,
    #[error("dataset must have exactly one dependent variable, found {found}")]
    DependentCount { found: usize },
    #[error("dependent variable {name:?} must be continuous")]
    DependentNotContinuous { name: String },
    #[error("project {project:?}, column {column:?}: {msg}")]
    InvalidCell {
        project: String,
        column: String,
        msg: String,
    },

    // ---- variable lookups / preprocessing ----
    #[error("unknown variable {name:?}")]
    UnknownVariable { name: String },
    #[error("variable {name:?} is not continuous")]
    NotContinuous { name: String },
    #[error("variable {name:?} is not nominal")]
    NotNominal { name: String },
    #[error("variable {name:?} is not an independent variable")]
    NotIndependent { name: String },
    #[error("redundant list names the dependent variable {name:?}")]
    RedundantDependent { name: String },
    #[error("variable {variable:?}: mean of non-missing values is zero")]
    ZeroMean { variable: String },
    #[error("variable {variable:?} has no non-missing values")]
    NoValues { variable: String },
    #[error("variable {variable:?}: need at least {needed} non-missing values, found {found}")]
    TooFewValues {
        variable: String,
        needed: usize,
        found: usize,
    },
    #[error("mapping for variable {variable:?} maps {old_label:?} to conflicting labels")]
    MappingConflict { variable: String, old_label: String },
    #[error("mapping for variable {variable:?}: label {label:?} is both old and new")]
    MappingNotClosed { variable: String, label: String },
    #[error("split target {name:?} collides with an existing variable")]
    SplitTargetCollision { name: String },
    #[error("split rule for {variable:?} does not cover observed label {label:?}")]
    SplitUnmappedLabel { variable: String, label: String },

    // ---- statistics ----
    #[error("empty sample")]
    EmptySample,
    #[error("actual value at position {index} is zero; relative error undefined")]
    ZeroActual { index: usize },
    #[error("bootstrap needs at least {needed} values per sample, found {found}")]
    SampleTooSmall { needed: usize, found: usize },
    #[error("invalid parameter: {msg}")]
    InvalidParameter { msg: String },

    // ---- estimation ----
    #[error("invalid parameter combination: {msg}")]
    InvalidCombo { msg: String },
    #[error("regression needs at least 2 points, found {found}")]
    TooFewPoints { found: usize },
    #[error("regressor values are all identical; slope undefined")]
    DegenerateRegressor,
    #[error("training set needs at least {needed} projects with a dependent value, found {found}")]
    TooFewTrainingProjects { needed: usize, found: usize },
    #[error("dependent value of project {project:?} is zero; MMRE objective undefined")]
    ZeroDependent { project: String },

    // ---- evaluation ----
    #[error("fold plan: {msg}")]
    FoldPlan { msg: String },
    #[error("fold {fold} leaves too few training projects ({found} < {needed})")]
    FoldTooSmallTraining {
        fold: usize,
        needed: usize,
        found: usize,
    },
    #[error("reports were built from different fold plans")]
    FoldPlanMismatch,
    #[error("no project has both an actual and an estimated value")]
    NoMeasurablePairs,
    #[error("dataset has no continuous variables to summarize")]
    NoContinuousVariables,
    #[error("parameter grid is empty")]
    EmptyGrid,
    #[error("no parameter combination produced a result")]
    NoSuccessfulCombos,
}

impl Error {
    /// Classify this error for exit-code mapping.
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            TooFewValues { .. }
            | EmptySample
            | SampleTooSmall { .. }
            | TooFewPoints { .. }
            | DegenerateRegressor
            | TooFewTrainingProjects { .. }
            | FoldTooSmallTraining { .. }
            | NoMeasurablePairs
            | NoContinuousVariables
            | NoSuccessfulCombos
            | NoValues { .. } => ErrorCategory::Infeasibility,
            _ => ErrorCategory::Validation,
        }
    }
}
