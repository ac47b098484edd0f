//! Side-by-side comparison of the best grid combos against the regression
//! baseline, rendered as an aligned text table and a CSV twin.

use serde::Serialize;

use crate::dataset::format_number;
use crate::error::{Error, Result};
use crate::osr::{Objective, ParameterCombo};

use super::{GridReport, MethodResult};

/// One metric row: the best set-reduction combo for the metric and both
/// methods' values. The marker points from the larger error to the smaller:
/// `>` means the baseline's error is larger (set reduction better).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub metric: Objective,
    pub combo: ParameterCombo,
    pub lra: f64,
    pub osr: f64,
}

impl ComparisonRow {
    pub fn marker(&self) -> char {
        if self.lra > self.osr {
            '>'
        } else if self.lra < self.osr {
            '<'
        } else {
            '='
        }
    }
}

/// Comparison of a grid search against a baseline result under one fold plan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub seed: u64,
    pub fold_plan_id: u64,
    pub rows: Vec<ComparisonRow>,
    pub lra_coverage: f64,
    pub osr_coverage: f64,
    /// Fallback estimates issued by the best-MMRE combo.
    pub osr_fallback_count: usize,
}

/// Build the comparison. Both inputs must come from the same fold plan.
pub fn compare_report(osr: &GridReport, lra: &MethodResult) -> Result<ComparisonReport> {
    if osr.fold_plan_id != lra.fold_plan_id {
        return Err(Error::FoldPlanMismatch);
    }
    let mut rows = Vec::with_capacity(3);
    for metric in [Objective::Mmre, Objective::Msd, Objective::Mad] {
        let cell = osr
            .best_cell(metric)
            .ok_or(Error::NoSuccessfulCombos)?;
        let result = cell.result.as_ref().expect("best cells are successful");
        let value = match metric {
            Objective::Mmre => result.accuracy.mmre,
            Objective::Msd => result.accuracy.msd,
            Objective::Mad => result.accuracy.mad,
        };
        let lra_value = match metric {
            Objective::Mmre => lra.accuracy.mmre,
            Objective::Msd => lra.accuracy.msd,
            Objective::Mad => lra.accuracy.mad,
        };
        rows.push(ComparisonRow {
            metric,
            combo: cell.combo,
            lra: lra_value,
            osr: value,
        });
    }
    let best_mmre = osr
        .best_cell(Objective::Mmre)
        .and_then(|c| c.result.as_ref())
        .expect("checked above");
    Ok(ComparisonReport {
        seed: osr.seed,
        fold_plan_id: osr.fold_plan_id,
        rows,
        lra_coverage: lra.coverage,
        osr_coverage: best_mmre.coverage,
        osr_fallback_count: best_mmre.fallback_count,
    })
}

fn render_metric(metric: Objective, value: f64) -> String {
    match metric {
        Objective::Mmre => format!("{:.2}%", value * 100.0),
        Objective::Msd | Objective::Mad => format!("{value:.3}"),
    }
}

impl ComparisonReport {
    /// Aligned text table; one row per metric with the best combo, the
    /// baseline value, the direction marker, and the set-reduction value.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# master_seed={}\n", self.seed));
        out.push_str(&format!(
            "{:<8}{:<12}{:<11}{:<9}{:<11}{:>10}    {:>10}\n",
            "metric", "prediction", "objective", "min_set", "max_preds", "LRA", "OSR"
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:<8}{:<12}{:<11}{:<9}{:<11}{:>10}  {} {:>10}\n",
                row.metric.to_string(),
                row.combo.prediction_fn.to_string(),
                row.combo.objective.to_string(),
                row.combo.min_set_size,
                row.combo.max_predicates_per_step,
                render_metric(row.metric, row.lra),
                row.marker(),
                render_metric(row.metric, row.osr),
            ));
        }
        out.push_str(&format!(
            "{:<51}{:>10}    {:>10}\n",
            "coverage",
            format!("{:.3}", self.lra_coverage),
            format!("{:.3}", self.osr_coverage),
        ));
        out.push_str(&format!(
            "fallback estimates (best-MMRE combo): {}\n",
            self.osr_fallback_count
        ));
        out
    }

    /// CSV twin with full-precision values.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "metric",
            "prediction_fn",
            "objective",
            "min_set_size",
            "max_predicates",
            "lra",
            "osr",
            "marker",
        ])
        .expect("write to Vec cannot fail");
        for row in &self.rows {
            w.write_record([
                row.metric.to_string(),
                row.combo.prediction_fn.to_string(),
                row.combo.objective.to_string(),
                row.combo.min_set_size.to_string(),
                row.combo.max_predicates_per_step.to_string(),
                format_number(row.lra),
                format_number(row.osr),
                row.marker().to_string(),
            ])
            .expect("write to Vec cannot fail");
        }
        w.write_record([
            "coverage",
            "",
            "",
            "",
            "",
            &format_number(self.lra_coverage),
            &format_number(self.osr_coverage),
            "",
        ])
        .expect("write to Vec cannot fail");
        String::from_utf8(w.into_inner().expect("no flush errors on Vec")).expect("UTF-8")
    }
}
