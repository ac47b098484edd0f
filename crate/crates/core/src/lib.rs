//! Data-driven software effort estimation on imperfect project data.
//!
//! The crate implements an optimized-set-reduction estimator — iterative
//! subdivision of a project dataset by predicates on project characteristics
//! until a small, homogeneous subset yields the prediction — together with
//! the preprocessing, accuracy metrics, regression baseline, and
//! cross-validated grid search needed to evaluate it:
//!
//! - [`dataset`] — typed project tables with explicit missing values, CSV and
//!   schema input/output, summaries, and mean normalization.
//! - [`preprocess`] — category unification, variable splitting, variable
//!   selection, project filtering, and box-plot outlier flags.
//! - [`stats`] — MMRE/MSD/MAD accuracy, box summaries, and the seeded
//!   bootstrap two-sample test.
//! - [`osr`] — regression-tree discretization, predicate generation, set
//!   reduction, and prediction with model extraction.
//! - [`lra`] — the ordinary-least-squares size baseline.
//! - [`evaluation`] — fold plans, cross-validation, the parameter grid
//!   search, and comparison reports.
//!
//! Every operation is a pure function of its inputs and the master seed, so
//! whole analyses are reproducible byte for byte regardless of concurrency.

pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod lra;
pub mod osr;
pub mod preprocess;
pub mod seed;
pub mod stats;

pub use dataset::{parse_dataset, parse_schema, Dataset, Role, Scale, Value, VariableSpec};
pub use error::{Error, ErrorCategory, Result};
pub use stats::{accuracy, bootstrap_diff_test, describe, BootstrapConfig};
