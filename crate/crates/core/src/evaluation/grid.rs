//! Parameter grid enumeration and the cross-validated grid search.

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::osr::{Objective, ParameterCombo, PredictionFn, STANDARD_PAIRINGS};
use crate::stats::BootstrapConfig;

use super::{cross_validate, FoldPlan, Method, MethodResult};

/// Minimal set sizes evaluated by the default grid.
pub const DEFAULT_SET_SIZES: [usize; 4] = [5, 10, 15, 20];
/// Per-step predicate budgets evaluated by the default grid.
pub const DEFAULT_PREDICATE_SIZES: [usize; 3] = [2, 3, 4];

/// The default grid: every admitted prediction/objective pairing crossed with
/// the default set sizes and predicate budgets — 36 combinations.
pub fn default_grid() -> Vec<ParameterCombo> {
    let mut grid = Vec::with_capacity(36);
    for (pf, obj) in STANDARD_PAIRINGS {
        for set_size in DEFAULT_SET_SIZES {
            for preds in DEFAULT_PREDICATE_SIZES {
                grid.push(
                    ParameterCombo::new(pf, obj, set_size, preds)
                        .expect("default grid entries are valid"),
                );
            }
        }
    }
    grid
}

/// Parse a grid specification: `default` for the full grid, or
/// `single:(Mean,MSD,10,3)` for one combination. Names are case-insensitive
/// and spaces are tolerated. Non-standard pairings are refused unless
/// `allow_any_pairing` is set.
pub fn parse_grid_spec(spec: &str, allow_any_pairing: bool) -> Result<Vec<ParameterCombo>> {
    let spec = spec.trim();
    if spec == "default" {
        return Ok(default_grid());
    }
    let Some(rest) = spec.strip_prefix("single:") else {
        return Err(Error::GridSyntax {
            msg: format!("expected `default` or `single:(fn,objective,set_size,predicates)`, got {spec:?}"),
        });
    };
    let rest = rest.trim();
    let inner = rest
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::GridSyntax {
            msg: format!("expected parenthesized combo, got {rest:?}"),
        })?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::GridSyntax {
            msg: format!("expected 4 comma-separated fields, found {}", parts.len()),
        });
    }
    let prediction_fn = match parts[0].to_ascii_lowercase().as_str() {
        "mean" => PredictionFn::Mean,
        "median" => PredictionFn::Median,
        other => {
            return Err(Error::GridSyntax {
                msg: format!("unknown prediction function {other:?}"),
            })
        }
    };
    let objective = match parts[1].to_ascii_lowercase().as_str() {
        "mmre" => Objective::Mmre,
        "msd" => Objective::Msd,
        "mad" => Objective::Mad,
        other => {
            return Err(Error::GridSyntax {
                msg: format!("unknown objective function {other:?}"),
            })
        }
    };
    let min_set_size: usize = parts[2].parse().map_err(|_| Error::GridSyntax {
        msg: format!("invalid set size {:?}", parts[2]),
    })?;
    let max_predicates: usize = parts[3].parse().map_err(|_| Error::GridSyntax {
        msg: format!("invalid predicate size {:?}", parts[3]),
    })?;
    let combo = if allow_any_pairing {
        ParameterCombo::any_pairing(prediction_fn, objective, min_set_size, max_predicates)?
    } else {
        ParameterCombo::new(prediction_fn, objective, min_set_size, max_predicates)?
    };
    Ok(vec![combo])
}

/// One grid cell: the combo plus either its result or the error that kept it
/// from completing. Infeasible cells never abort the rest of the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    pub combo: ParameterCombo,
    pub result: Option<MethodResult>,
    pub error: Option<String>,
}

/// Best combo per accuracy metric (minimum over successful cells; ties go to
/// the earlier grid position).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestBy {
    pub mmre: Option<ParameterCombo>,
    pub msd: Option<ParameterCombo>,
    pub mad: Option<ParameterCombo>,
}

/// Outcome of a grid search under one fold plan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub seed: u64,
    pub strategy: String,
    pub fold_plan_id: u64,
    pub cells: Vec<GridCell>,
    pub best_by: BestBy,
}

impl GridReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// The metric value a cell achieved.
    fn metric_of(result: &MethodResult, metric: Objective) -> f64 {
        match metric {
            Objective::Mmre => result.accuracy.mmre,
            Objective::Msd => result.accuracy.msd,
            Objective::Mad => result.accuracy.mad,
        }
    }

    /// The successful cell minimizing a metric.
    pub fn best_cell(&self, metric: Objective) -> Option<&GridCell> {
        self.cells
            .iter()
            .filter(|c| c.result.is_some())
            .min_by(|a, b| {
                let va = Self::metric_of(a.result.as_ref().unwrap(), metric);
                let vb = Self::metric_of(b.result.as_ref().unwrap(), metric);
                va.total_cmp(&vb)
            })
    }
}

/// Run `cross_validate` for every combo in the grid under one fold plan.
/// Per-combo failures are recorded in their cells; the search itself fails
/// only on an empty grid or a plan/dataset mismatch.
pub fn grid_search(
    d: &Dataset,
    grid: &[ParameterCombo],
    plan: &FoldPlan,
    cfg: &BootstrapConfig,
) -> Result<GridReport> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    cfg.validate()?;
    let cells: Vec<GridCell> = grid
        .par_iter()
        .map(|&combo| {
            match cross_validate(d, &Method::Osr { combo }, plan, cfg) {
                Ok(result) => GridCell {
                    combo,
                    result: Some(result),
                    error: None,
                },
                Err(e) => GridCell {
                    combo,
                    result: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let report = GridReport {
        seed: cfg.seed,
        strategy: plan.strategy.to_string(),
        fold_plan_id: plan.id(),
        best_by: BestBy {
            mmre: best_combo(&cells, Objective::Mmre),
            msd: best_combo(&cells, Objective::Msd),
            mad: best_combo(&cells, Objective::Mad),
        },
        cells,
    };
    Ok(report)
}

fn best_combo(cells: &[GridCell], metric: Objective) -> Option<ParameterCombo> {
    cells
        .iter()
        .filter_map(|c| c.result.as_ref().map(|r| (c.combo, GridReport::metric_of(r, metric))))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(combo, _)| combo)
}
