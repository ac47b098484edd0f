//! The set-reduction estimator.
//!
//! Starting from the full training set, the engine repeatedly narrows the set
//! of projects with predicates matching the target project's characteristics,
//! keeping only reductions whose dependent-value distribution differs
//! significantly from the parent set. Each terminal subset yields a model — a
//! conjunction of predicates plus that subset's prediction — and the final
//! estimate aggregates the terminal predictions.

mod cart;
mod engine;

pub use cart::{bin_label_for_bounds, discretize_cart, Discretizer};
pub use engine::{
    candidate_predicates, osr_predict, reduce_step, subset_objective, OsrEstimator,
};

use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::dataset::{format_number, Value};
use crate::error::{Error, Result};
use crate::stats::BoxSummary;

/// How a terminal subset's dependent values are turned into a prediction, and
/// how predictions from parallel branches are aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PredictionFn {
    Mean,
    Median,
}

impl std::fmt::Display for PredictionFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PredictionFn::Mean => write!(f, "Mean"),
            PredictionFn::Median => write!(f, "Median"),
        }
    }
}

/// Homogeneity score used to rank candidate subsets; lower is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Objective {
    Mmre,
    Msd,
    Mad,
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Objective::Mmre => write!(f, "MMRE"),
            Objective::Msd => write!(f, "MSD"),
            Objective::Mad => write!(f, "MAD"),
        }
    }
}

/// The prediction-function/objective pairings admitted by default.
pub const STANDARD_PAIRINGS: [(PredictionFn, Objective); 3] = [
    (PredictionFn::Mean, Objective::Mmre),
    (PredictionFn::Mean, Objective::Msd),
    (PredictionFn::Median, Objective::Mad),
];

/// One cell of the parameter grid: prediction function, objective function,
/// minimal admissible subset size, and the number of predicates kept per
/// reduction step (the branching factor).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParameterCombo {
    pub prediction_fn: PredictionFn,
    pub objective: Objective,
    pub min_set_size: usize,
    pub max_predicates_per_step: usize,
}

impl ParameterCombo {
    /// Build a combo, enforcing the standard pairing rule.
    pub fn new(
        prediction_fn: PredictionFn,
        objective: Objective,
        min_set_size: usize,
        max_predicates_per_step: usize,
    ) -> Result<Self> {
        let combo =
            Self::any_pairing(prediction_fn, objective, min_set_size, max_predicates_per_step)?;
        if !combo.is_standard_pairing() {
            return Err(Error::InvalidCombo {
                msg: format!(
                    "({prediction_fn}, {objective}) is not an admitted pairing; valid pairings: {}",
                    pairing_table()
                ),
            });
        }
        Ok(combo)
    }

    /// Build a combo with an arbitrary pairing (explicit override); sizes are
    /// still validated.
    pub fn any_pairing(
        prediction_fn: PredictionFn,
        objective: Objective,
        min_set_size: usize,
        max_predicates_per_step: usize,
    ) -> Result<Self> {
        if min_set_size < 2 {
            return Err(Error::InvalidCombo {
                msg: format!("minimal set size must be at least 2, got {min_set_size}"),
            });
        }
        if max_predicates_per_step < 1 {
            return Err(Error::InvalidCombo {
                msg: "maximal predicate size must be at least 1".to_string(),
            });
        }
        Ok(Self {
            prediction_fn,
            objective,
            min_set_size,
            max_predicates_per_step,
        })
    }

    pub fn is_standard_pairing(&self) -> bool {
        STANDARD_PAIRINGS.contains(&(self.prediction_fn, self.objective))
    }

    /// Apply the prediction function to a non-empty value list.
    pub fn predict(&self, values: &[f64]) -> f64 {
        debug_assert!(!values.is_empty());
        match self.prediction_fn {
            PredictionFn::Mean => crate::stats::mean(values),
            PredictionFn::Median => crate::stats::median(values),
        }
    }
}

impl std::fmt::Display for ParameterCombo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.prediction_fn, self.objective, self.min_set_size, self.max_predicates_per_step
        )
    }
}

/// Human-readable pairing table for error messages.
pub fn pairing_table() -> String {
    STANDARD_PAIRINGS
        .iter()
        .map(|(p, o)| format!("({p}, {o})"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// The membership test of a predicate: label equality for nominal variables,
/// bin membership (lower exclusive, upper inclusive) for discretized
/// continuous ones.
#[derive(Debug, Clone, PartialEq)]
pub enum PredicateTest {
    Equals(String),
    Bin {
        lower: Option<f64>,
        upper: Option<f64>,
    },
}

/// A `(variable = category)` test. A project satisfies the predicate iff its
/// value for the variable is non-missing and matches the category.
#[derive(Debug, Clone, PartialEq)]
pub struct Predicate {
    pub variable: String,
    pub test: PredicateTest,
}

impl Predicate {
    pub fn equals(variable: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            variable: variable.into(),
            test: PredicateTest::Equals(label.into()),
        }
    }

    pub fn bin(variable: impl Into<String>, lower: Option<f64>, upper: Option<f64>) -> Self {
        Self {
            variable: variable.into(),
            test: PredicateTest::Bin { lower, upper },
        }
    }

    pub fn matches(&self, value: &Value) -> bool {
        match (&self.test, value) {
            (PredicateTest::Equals(label), Value::Label(l)) => l == label,
            (PredicateTest::Bin { lower, upper }, Value::Number(x)) => {
                lower.is_none_or(|l| *x > l) && upper.is_none_or(|u| *x <= u)
            }
            _ => false,
        }
    }

    /// The category text: the nominal label, or the bin interval label.
    pub fn category(&self) -> String {
        match &self.test {
            PredicateTest::Equals(label) => label.clone(),
            PredicateTest::Bin { lower, upper } => bin_label_for_bounds((*lower, *upper)),
        }
    }
}

impl std::fmt::Display for Predicate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.test {
            PredicateTest::Equals(label) => write!(f, "{} = {}", self.variable, label),
            PredicateTest::Bin { .. } => write!(f, "{} ∈ {}", self.variable, self.category()),
        }
    }
}

impl Serialize for Predicate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.test {
            PredicateTest::Equals(_) => {
                let mut s = serializer.serialize_struct("Predicate", 2)?;
                s.serialize_field("variable", &self.variable)?;
                s.serialize_field("category", &self.category())?;
                s.end()
            }
            PredicateTest::Bin { lower, upper } => {
                let mut s = serializer.serialize_struct("Predicate", 4)?;
                s.serialize_field("variable", &self.variable)?;
                s.serialize_field("category", &self.category())?;
                s.serialize_field("lower", lower)?;
                s.serialize_field("upper", upper)?;
                s.end()
            }
        }
    }
}

/// One terminal subset: the predicate conjunction describing it, the project
/// ids it contains, its prediction, and the dispersion of its dependent
/// values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OsrModel {
    pub predicates: Vec<Predicate>,
    pub terminal_ids: Vec<String>,
    pub prediction: f64,
    pub dispersion: BoxSummary,
}

impl OsrModel {
    /// One-line rendering:
    /// `pred1 AND pred2 => prediction (n=…, p25=…, p75=…)`.
    /// An empty conjunction (root fallback) renders as `TRUE`.
    pub fn render_line(&self) -> String {
        let conjunction = if self.predicates.is_empty() {
            "TRUE".to_string()
        } else {
            self.predicates
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(" AND ")
        };
        format!(
            "{conjunction} => {} (n={}, p25={}, p75={})",
            format_number(self.prediction),
            self.dispersion.n,
            format_number(self.dispersion.q1),
            format_number(self.dispersion.q3),
        )
    }
}

/// Result of one prediction: the aggregated estimate, every terminal model,
/// whether the root fallback was used, the combo that produced it, and how
/// many training rows were dropped for lacking a dependent value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OsrPrediction {
    pub estimate: f64,
    pub models: Vec<OsrModel>,
    pub fallback: bool,
    pub combo: ParameterCombo,
    pub dropped_missing_dependent: usize,
}

impl OsrPrediction {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}
