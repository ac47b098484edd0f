//! Set-reduction engine: candidate generation, significance-gated reduction
//! steps, and depth-first expansion into terminal models.

use std::collections::{BTreeMap, HashSet};

use crate::dataset::{Dataset, ProjectRow, Role, Scale, Value};
use crate::error::{Error, Result};
use crate::osr::{discretize_cart, Discretizer, Objective, OsrModel, OsrPrediction, Predicate};
use crate::seed::derive_seed;
use crate::stats::{bootstrap_diff_test, describe, BootstrapConfig};

use super::ParameterCombo;

/// Default bin budget when discretizing continuous drivers.
pub const DEFAULT_MAX_BINS: usize = 4;

/// A training set prepared for prediction: rows lacking a dependent value are
/// dropped, and a discretizer is fitted per continuous independent variable
/// (on training data only, with `min_leaf` equal to the combo's minimal set
/// size). Variables with too few non-missing values get no discretizer and
/// simply produce no predicates.
#[derive(Debug, Clone)]
pub struct OsrEstimator {
    training: Dataset,
    combo: ParameterCombo,
    discretizers: BTreeMap<String, Discretizer>,
    dep_values: Vec<f64>,
    dropped_missing_dependent: usize,
}

impl OsrEstimator {
    pub fn fit(training: &Dataset, combo: ParameterCombo) -> Result<Self> {
        let dep_col = training.dependent_index();
        let dropped_missing_dependent = training
            .rows()
            .iter()
            .filter(|r| r.values[dep_col].is_missing())
            .count();
        let training = crate::preprocess::filter_projects(training, |row| {
            !row.values[dep_col].is_missing()
        });
        if training.rows().len() < combo.min_set_size {
            return Err(Error::TooFewTrainingProjects {
                needed: combo.min_set_size,
                found: training.rows().len(),
            });
        }
        let dep_values: Vec<f64> = training
            .rows()
            .iter()
            .map(|r| r.values[dep_col].as_number().expect("missing rows dropped"))
            .collect();
        if combo.objective == Objective::Mmre {
            if let Some(i) = dep_values.iter().position(|&v| v == 0.0) {
                return Err(Error::ZeroDependent {
                    project: training.rows()[i].id.clone(),
                });
            }
        }

        let mut discretizers = BTreeMap::new();
        for (col, spec) in training.variables().iter().enumerate() {
            if spec.role != Role::Independent || spec.scale != Scale::Continuous {
                continue;
            }
            let xs: Vec<Option<f64>> = training
                .rows()
                .iter()
                .map(|r| r.values[col].as_number())
                .collect();
            match discretize_cart(&spec.name, &xs, &dep_values, combo.min_set_size, DEFAULT_MAX_BINS)
            {
                Ok(d) => {
                    discretizers.insert(spec.name.clone(), d);
                }
                Err(Error::TooFewValues { .. }) => {} // unusable driver, no predicates
                Err(e) => return Err(e),
            }
        }
        Ok(Self {
            training,
            combo,
            discretizers,
            dep_values,
            dropped_missing_dependent,
        })
    }

    pub fn training(&self) -> &Dataset {
        &self.training
    }

    pub fn combo(&self) -> &ParameterCombo {
        &self.combo
    }

    pub fn discretizers(&self) -> &BTreeMap<String, Discretizer> {
        &self.discretizers
    }

    /// The target's candidate predicate for each variable: its nominal label,
    /// or the fitted bin containing its number. `None` where the target value
    /// is missing, the variable is not independent, or no discretizer exists.
    fn target_predicates(&self, target: &ProjectRow) -> Vec<Option<Predicate>> {
        self.training
            .variables()
            .iter()
            .enumerate()
            .map(|(col, spec)| {
                if spec.role != Role::Independent {
                    return None;
                }
                match &target.values[col] {
                    Value::Label(label) => Some(Predicate::equals(&spec.name, label)),
                    Value::Number(x) => self.discretizers.get(&spec.name).map(|d| {
                        let (lower, upper) = d.bin_bounds(d.bin_index(*x));
                        Predicate::bin(&spec.name, lower, upper)
                    }),
                    Value::Missing => None,
                }
            })
            .collect()
    }

    /// One reduction step on a set of row indices: form each candidate child,
    /// keep those of admissible size whose dependent distribution differs
    /// significantly from the current set's, rank them by the objective
    /// (ascending, ties in variable declaration order), and return at most
    /// `max_predicates_per_step`.
    fn reduce(
        &self,
        ids: &[u32],
        used: &[bool],
        depth: usize,
        candidates: &[Option<Predicate>],
        cfg: &BootstrapConfig,
    ) -> Result<Vec<(usize, Vec<u32>)>> {
        let current_deps: Vec<f64> = ids.iter().map(|&i| self.dep_values[i as usize]).collect();
        let mut kept: Vec<(f64, usize, Vec<u32>)> = Vec::new();
        for (col, candidate) in candidates.iter().enumerate() {
            if used[col] {
                continue;
            }
            let Some(pred) = candidate else { continue };
            let child: Vec<u32> = ids
                .iter()
                .copied()
                .filter(|&i| pred.matches(&self.training.rows()[i as usize].values[col]))
                .collect();
            if child.len() < self.combo.min_set_size {
                continue;
            }
            let child_deps: Vec<f64> =
                child.iter().map(|&i| self.dep_values[i as usize]).collect();
            let test_cfg = cfg.with_seed(derive_seed(cfg.seed, &[depth as u64, col as u64]));
            let outcome = bootstrap_diff_test(&child_deps, &current_deps, &test_cfg)?;
            if !outcome.significant {
                continue;
            }
            let objective = subset_objective(&child_deps, &self.combo)?;
            kept.push((objective, col, child));
        }
        kept.sort_by(|a, b| a.0.total_cmp(&b.0));
        kept.truncate(self.combo.max_predicates_per_step);
        Ok(kept.into_iter().map(|(_, col, child)| (col, child)).collect())
    }

    fn expand(
        &self,
        ids: Vec<u32>,
        used: Vec<bool>,
        path: Vec<Predicate>,
        depth: usize,
        candidates: &[Option<Predicate>],
        cfg: &BootstrapConfig,
        models: &mut Vec<OsrModel>,
    ) -> Result<()> {
        let children = self.reduce(&ids, &used, depth, candidates, cfg)?;
        if children.is_empty() {
            models.push(self.terminal_model(path, &ids));
            return Ok(());
        }
        for (col, child) in children {
            let mut used = used.clone();
            used[col] = true;
            let mut path = path.clone();
            path.push(candidates[col].clone().expect("candidate exists"));
            self.expand(child, used, path, depth + 1, candidates, cfg, models)?;
        }
        Ok(())
    }

    fn terminal_model(&self, predicates: Vec<Predicate>, ids: &[u32]) -> OsrModel {
        let deps: Vec<f64> = ids.iter().map(|&i| self.dep_values[i as usize]).collect();
        OsrModel {
            predicates,
            terminal_ids: ids
                .iter()
                .map(|&i| self.training.rows()[i as usize].id.clone())
                .collect(),
            prediction: self.combo.predict(&deps),
            dispersion: describe(&deps).expect("terminal sets are non-empty"),
        }
    }

    /// Estimate the dependent value of a target row. Expansion is depth-first
    /// from the full training set; a branch ends when no admissible reduction
    /// remains. When the root itself admits no reduction, the root set's
    /// prediction is returned with the fallback flag raised.
    pub fn predict(&self, target: &ProjectRow, cfg: &BootstrapConfig) -> Result<OsrPrediction> {
        cfg.validate()?;
        if target.values.len() != self.training.variables().len() {
            return Err(Error::InvalidParameter {
                msg: format!(
                    "target row has {} values, schema has {} variables",
                    target.values.len(),
                    self.training.variables().len()
                ),
            });
        }
        let candidates = self.target_predicates(target);
        let root: Vec<u32> = (0..self.training.rows().len() as u32).collect();
        let used = vec![false; self.training.variables().len()];
        let mut models = Vec::new();
        self.expand(root, used, Vec::new(), 0, &candidates, cfg, &mut models)?;
        let fallback = models.len() == 1 && models[0].predicates.is_empty();
        let predictions: Vec<f64> = models.iter().map(|m| m.prediction).collect();
        Ok(OsrPrediction {
            estimate: self.combo.predict(&predictions),
            models,
            fallback,
            combo: self.combo,
            dropped_missing_dependent: self.dropped_missing_dependent,
        })
    }
}

/// Fit on a training set and estimate one target row.
pub fn osr_predict(
    training: &Dataset,
    target: &ProjectRow,
    combo: ParameterCombo,
    cfg: &BootstrapConfig,
) -> Result<OsrPrediction> {
    OsrEstimator::fit(training, combo)?.predict(target, cfg)
}

/// Homogeneity of a value set around its own prediction: the objective metric
/// of the pairs (value, prediction). Lower is better; a constant set scores 0.
pub fn subset_objective(dep_values: &[f64], combo: &ParameterCombo) -> Result<f64> {
    if dep_values.is_empty() {
        return Err(Error::EmptySample);
    }
    let p = combo.predict(dep_values);
    let n = dep_values.len() as f64;
    match combo.objective {
        Objective::Mmre => {
            let mut total = 0.0;
            for (i, &v) in dep_values.iter().enumerate() {
                if v == 0.0 {
                    return Err(Error::ZeroActual { index: i });
                }
                total += (v - p).abs() / v.abs();
            }
            Ok(total / n)
        }
        Objective::Msd => Ok(dep_values.iter().map(|v| (v - p) * (v - p)).sum::<f64>() / n),
        Objective::Mad => Ok(dep_values.iter().map(|v| (v - p).abs()).sum::<f64>() / n),
    }
}

/// One predicate per independent variable that is unused and has a
/// non-missing target value; the category is the target's own label or bin.
/// Order follows variable declaration order.
pub fn candidate_predicates(
    training: &Dataset,
    target: &ProjectRow,
    used: &HashSet<String>,
    discretizers: &BTreeMap<String, Discretizer>,
) -> Vec<Predicate> {
    training
        .variables()
        .iter()
        .enumerate()
        .filter(|(_, spec)| spec.role == Role::Independent && !used.contains(&spec.name))
        .filter_map(|(col, spec)| match &target.values[col] {
            Value::Label(label) => Some(Predicate::equals(&spec.name, label)),
            Value::Number(x) => discretizers.get(&spec.name).map(|d| {
                let (lower, upper) = d.bin_bounds(d.bin_index(*x));
                Predicate::bin(&spec.name, lower, upper)
            }),
            Value::Missing => None,
        })
        .collect()
}

/// Spec-level reduction step over project ids. Discretizers are refitted on
/// the given training set; the depth used for seed derivation is the number
/// of already-used variables, so a chain of `reduce_step` calls reproduces
/// the engine's internal expansion.
pub fn reduce_step(
    current_ids: &[String],
    training: &Dataset,
    target: &ProjectRow,
    used: &HashSet<String>,
    combo: ParameterCombo,
    cfg: &BootstrapConfig,
) -> Result<Vec<(Predicate, Vec<String>)>> {
    let est = OsrEstimator::fit(training, combo)?;
    if current_ids.len() < combo.min_set_size {
        return Err(Error::TooFewTrainingProjects {
            needed: combo.min_set_size,
            found: current_ids.len(),
        });
    }
    let mut ids = Vec::with_capacity(current_ids.len());
    for id in current_ids {
        let idx = est
            .training
            .rows()
            .iter()
            .position(|r| &r.id == id)
            .ok_or_else(|| Error::InvalidParameter {
                msg: format!("project {id:?} is unknown or has no dependent value"),
            })?;
        ids.push(idx as u32);
    }
    let mut used_mask = vec![false; est.training.variables().len()];
    for (col, spec) in est.training.variables().iter().enumerate() {
        if used.contains(&spec.name) {
            used_mask[col] = true;
        }
    }
    let candidates = est.target_predicates(target);
    let children = est.reduce(&ids, &used_mask, used.len(), &candidates, cfg)?;
    Ok(children
        .into_iter()
        .map(|(col, child)| {
            (
                candidates[col].clone().expect("candidate exists"),
                child
                    .iter()
                    .map(|&i| est.training.rows()[i as usize].id.clone())
                    .collect(),
            )
        })
        .collect())
}
