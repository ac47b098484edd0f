//! Cross-validation harness: fold plans, per-method evaluation, the parameter
//! grid search, and comparison reports.
//!
//! Every (fold, target, combo) cell derives its own seed from the master
//! seed, so results are identical whatever the evaluation order or degree of
//! concurrency.

mod grid;
mod report;

pub use grid::{default_grid, grid_search, parse_grid_spec, BestBy, GridCell, GridReport};
pub use report::{compare_report, ComparisonReport, ComparisonRow};

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::lra;
use crate::osr::{OsrEstimator, ParameterCombo};
use crate::seed::{derive_seed, fnv1a};
use crate::stats::{accuracy, AccuracyTriple, BootstrapConfig, PredictionPair};

/// How projects are dealt into test sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldStrategy {
    Loocv,
    RandomK(usize),
}

impl std::fmt::Display for FoldStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FoldStrategy::Loocv => write!(f, "loocv"),
            FoldStrategy::RandomK(k) => write!(f, "k:{k}"),
        }
    }
}

/// Disjoint test sets covering every project; deterministic per seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldPlan {
    pub folds: Vec<Vec<String>>,
    pub seed: u64,
    pub strategy: FoldStrategy,
}

impl FoldPlan {
    /// Stable identity of the plan (strategy, seed, fold contents); reports
    /// built from different plans refuse to be compared.
    pub fn id(&self) -> u64 {
        let tag = match self.strategy {
            FoldStrategy::Loocv => 1,
            FoldStrategy::RandomK(k) => derive_seed(2, &[k as u64]),
        };
        let mut h = derive_seed(self.seed, &[tag]);
        for fold in &self.folds {
            h = derive_seed(h, &[0xF01D]);
            for id in fold {
                h = derive_seed(h, &[fnv1a(id.as_bytes())]);
            }
        }
        h
    }
}

/// Build a fold plan. LOOCV yields one singleton fold per project in dataset
/// order; `RandomK(k)` shuffles the ids with the seeded generator and deals
/// them round-robin, so fold sizes differ by at most one.
pub fn make_folds(ids: &[String], strategy: FoldStrategy, seed: u64) -> Result<FoldPlan> {
    if ids.len() < 2 {
        return Err(Error::FoldPlan {
            msg: format!("need at least 2 projects, found {}", ids.len()),
        });
    }
    let unique: HashSet<&String> = ids.iter().collect();
    if unique.len() != ids.len() {
        return Err(Error::FoldPlan {
            msg: "project ids are not unique".to_string(),
        });
    }
    let folds = match strategy {
        FoldStrategy::Loocv => ids.iter().map(|id| vec![id.clone()]).collect(),
        FoldStrategy::RandomK(k) => {
            if k < 2 {
                return Err(Error::FoldPlan {
                    msg: format!("need at least 2 folds, got {k}"),
                });
            }
            if k > ids.len() {
                return Err(Error::FoldPlan {
                    msg: format!("{k} folds exceed {} projects", ids.len()),
                });
            }
            let mut shuffled = ids.to_vec();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            shuffled.shuffle(&mut rng);
            let mut folds = vec![Vec::new(); k];
            for (i, id) in shuffled.into_iter().enumerate() {
                folds[i % k].push(id);
            }
            folds
        }
    };
    Ok(FoldPlan {
        folds,
        seed,
        strategy,
    })
}

/// An estimation method under evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Osr { combo: ParameterCombo },
    Lra { size_variable: String },
}

/// Method identity carried in results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MethodLabel {
    Osr(ParameterCombo),
    Lra,
}

impl std::fmt::Display for MethodLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MethodLabel::Osr(c) => write!(
                f,
                "OSR({},{},{},{})",
                c.prediction_fn, c.objective, c.min_set_size, c.max_predicates_per_step
            ),
            MethodLabel::Lra => write!(f, "LRA"),
        }
    }
}

/// One held-out project: the actual dependent value if present, the estimate
/// if the method produced one, and whether the estimate was a root fallback.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectOutcome {
    pub project_id: String,
    pub actual: Option<f64>,
    pub estimate: Option<f64>,
    pub fallback: bool,
}

/// Cross-validated outcome of one method: per-project rows in fold order,
/// accuracy over the rows holding both an actual and an estimate, and
/// coverage (estimated projects / all projects).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodResult {
    pub method: MethodLabel,
    pub per_project: Vec<ProjectOutcome>,
    pub accuracy: AccuracyTriple,
    pub coverage: f64,
    pub fallback_count: usize,
    pub fold_plan_id: u64,
}

/// Estimate every project from a model trained on all projects outside its
/// fold. Discretizers and the regression line are refitted per fold, so no
/// test information leaks into training.
pub fn cross_validate(
    d: &Dataset,
    method: &Method,
    plan: &FoldPlan,
    cfg: &BootstrapConfig,
) -> Result<MethodResult> {
    cfg.validate()?;
    validate_plan(d, plan)?;
    let dep_col = d.dependent_index();

    let fold_outcomes: Vec<Result<Vec<ProjectOutcome>>> = plan
        .folds
        .par_iter()
        .enumerate()
        .map(|(fold_idx, fold)| evaluate_fold(d, method, cfg, dep_col, fold_idx, fold))
        .collect();

    let mut per_project = Vec::with_capacity(d.rows().len());
    for outcome in fold_outcomes {
        per_project.extend(outcome?);
    }

    let pairs: Vec<PredictionPair> = per_project
        .iter()
        .filter_map(|o| Some(PredictionPair::new(o.actual?, o.estimate?)))
        .collect();
    if pairs.is_empty() {
        return Err(Error::NoMeasurablePairs);
    }
    let estimated = per_project.iter().filter(|o| o.estimate.is_some()).count();
    Ok(MethodResult {
        method: match method {
            Method::Osr { combo } => MethodLabel::Osr(*combo),
            Method::Lra { .. } => MethodLabel::Lra,
        },
        accuracy: accuracy(&pairs)?,
        coverage: estimated as f64 / per_project.len() as f64,
        fallback_count: per_project.iter().filter(|o| o.fallback).count(),
        per_project,
        fold_plan_id: plan.id(),
    })
}

fn evaluate_fold(
    d: &Dataset,
    method: &Method,
    cfg: &BootstrapConfig,
    dep_col: usize,
    fold_idx: usize,
    fold: &[String],
) -> Result<Vec<ProjectOutcome>> {
    let held_out: HashSet<&str> = fold.iter().map(String::as_str).collect();
    let training =
        crate::preprocess::filter_projects(d, |row| !held_out.contains(row.id.as_str()));
    let mut outcomes = Vec::with_capacity(fold.len());
    match method {
        Method::Osr { combo } => {
            let estimator = OsrEstimator::fit(&training, *combo).map_err(|e| match e {
                Error::TooFewTrainingProjects { needed, found } => Error::FoldTooSmallTraining {
                    fold: fold_idx,
                    needed,
                    found,
                },
                other => other,
            })?;
            for id in fold {
                let row = d.row_by_id(id).expect("plan validated against dataset");
                let target_cfg = cfg.with_seed(cell_seed(cfg.seed, combo, id));
                let prediction = estimator.predict(row, &target_cfg)?;
                outcomes.push(ProjectOutcome {
                    project_id: id.clone(),
                    actual: row.values[dep_col].as_number(),
                    estimate: Some(prediction.estimate),
                    fallback: prediction.fallback,
                });
            }
        }
        Method::Lra { size_variable } => {
            let model = lra::fit_from_dataset(&training, size_variable).map_err(|e| match e {
                Error::TooFewPoints { found } => Error::FoldTooSmallTraining {
                    fold: fold_idx,
                    needed: 2,
                    found,
                },
                other => other,
            })?;
            let size_col = d
                .column_index(size_variable)
                .expect("fit validated the size variable");
            for id in fold {
                let row = d.row_by_id(id).expect("plan validated against dataset");
                outcomes.push(ProjectOutcome {
                    project_id: id.clone(),
                    actual: row.values[dep_col].as_number(),
                    estimate: model.predict(row.values[size_col].as_number()),
                    fallback: false,
                });
            }
        }
    }
    Ok(outcomes)
}

/// Seed for one (combo, target) cell, independent of fold and grid layout.
fn cell_seed(master: u64, combo: &ParameterCombo, project_id: &str) -> u64 {
    use crate::osr::{Objective, PredictionFn};
    let pf = match combo.prediction_fn {
        PredictionFn::Mean => 0,
        PredictionFn::Median => 1,
    };
    let obj = match combo.objective {
        Objective::Mmre => 0,
        Objective::Msd => 1,
        Objective::Mad => 2,
    };
    derive_seed(
        master,
        &[
            0x0ce11,
            pf,
            obj,
            combo.min_set_size as u64,
            combo.max_predicates_per_step as u64,
            fnv1a(project_id.as_bytes()),
        ],
    )
}

fn validate_plan(d: &Dataset, plan: &FoldPlan) -> Result<()> {
    let mut seen = HashSet::new();
    for fold in &plan.folds {
        if fold.is_empty() {
            return Err(Error::FoldPlan {
                msg: "empty fold".to_string(),
            });
        }
        for id in fold {
            if !seen.insert(id.as_str()) {
                return Err(Error::FoldPlan {
                    msg: format!("project {id:?} appears in more than one fold"),
                });
            }
            if d.row_by_id(id).is_none() {
                return Err(Error::FoldPlan {
                    msg: format!("fold names unknown project {id:?}"),
                });
            }
        }
    }
    if seen.len() != d.rows().len() {
        return Err(Error::FoldPlan {
            msg: format!(
                "plan covers {} of {} projects",
                seen.len(),
                d.rows().len()
            ),
        });
    }
    Ok(())
}
