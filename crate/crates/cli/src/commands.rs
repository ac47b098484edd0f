//! Command implementations and report writers.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use osr_core::dataset::{self, format_number, Dataset, Role, Scale};
use osr_core::evaluation::{
    compare_report, cross_validate, grid_search, make_folds, parse_grid_spec, Method,
    MethodResult,
};
use osr_core::osr::{Objective, OsrEstimator, ParameterCombo, PredictionFn};
use osr_core::preprocess::{
    apply_category_mapping, detect_outliers_iqr, drop_high_missing_projects, select_variables,
    split_variable, CategoryMapping, OutlierFlag, SelectionOptions, SelectionReport, SplitRule,
};
use osr_core::stats::{describe, BootstrapConfig};
use osr_core::Error;

use crate::config::{parse_fold_strategy, read_text, RunConfig};
use crate::CliError;

/// Tie a parse error to the file it came from.
fn in_file<T>(path: &Path, result: Result<T, osr_core::Error>) -> Result<T, CliError> {
    result.map_err(|source| CliError::InFile {
        path: path.to_path_buf(),
        source,
    })
}

fn load_schema(cfg: &RunConfig) -> Result<Vec<osr_core::VariableSpec>, CliError> {
    in_file(&cfg.schema, dataset::parse_schema(&read_text(&cfg.schema)?))
}

fn load_dataset(cfg: &RunConfig) -> Result<Dataset, CliError> {
    let schema = load_schema(cfg)?;
    let data = read_text(&cfg.data)?;
    in_file(&cfg.data, dataset::parse_dataset(&data, &schema))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Io {
        path: path.clone(),
        source: e,
    })?;
    Ok(path)
}

fn summary_line(d: &Dataset) -> String {
    let s = d.summarize();
    format!(
        "{} {} {:.2}%",
        s.project_count,
        s.independent_variable_count,
        s.missing_ratio * 100.0
    )
}

/// The convention behind the MD figure, stated wherever it is printed.
const MISSING_RATIO_NOTE: &str =
    "(missing ratio counted over independent and dependent columns)";

/// Outlier flags over every analyzed continuous variable (independent and
/// dependent). Variables with too few values simply contribute no flags.
fn collect_outlier_flags(d: &Dataset, cfg: &RunConfig) -> Result<Vec<OutlierFlag>, CliError> {
    let mut flags = Vec::new();
    for spec in d.variables() {
        let analyzed = spec.role == Role::Independent || spec.role == Role::Dependent;
        if !analyzed || spec.scale != Scale::Continuous {
            continue;
        }
        match detect_outliers_iqr(d, &spec.name, cfg.fence_outlier, cfg.fence_extreme) {
            Ok(mut f) => flags.append(&mut f),
            Err(Error::TooFewValues { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(flags)
}

fn outlier_flags_csv(flags: &[OutlierFlag]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["project_id", "class", "variable"]).unwrap();
    for f in flags {
        w.write_record([f.project_id.as_str(), &f.class.to_string(), &f.variable])
            .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn outlier_flags_text(flags: &[OutlierFlag]) -> String {
    if flags.is_empty() {
        return "no outliers or extreme values detected\n".to_string();
    }
    let mut out = String::new();
    for f in flags {
        let _ = writeln!(out, "{}: {} on {}", f.project_id, f.class, f.variable);
    }
    out
}

fn selection_report_csv(report: &SelectionReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["variable", "status", "reason"]).unwrap();
    for (name, reason) in &report.dropped {
        w.write_record([name.as_str(), "dropped", &reason.to_string()])
            .unwrap();
    }
    for name in &report.kept {
        w.write_record([name.as_str(), "kept", ""]).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn selection_report_text(report: &SelectionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "kept {} independent variables, dropped {}",
        report.kept.len(),
        report.dropped.len()
    );
    for (name, reason) in &report.dropped {
        let _ = writeln!(out, "dropped {name}: {reason}");
    }
    out
}

/// Count cells whose value changed between two datasets of equal shape.
fn changed_cells(before: &Dataset, after: &Dataset) -> usize {
    before
        .rows()
        .iter()
        .zip(after.rows())
        .map(|(b, a)| {
            b.values
                .iter()
                .zip(&a.values)
                .filter(|(x, y)| x != y)
                .count()
        })
        .sum()
}

pub fn prep(cfg: &RunConfig) -> Result<String, CliError> {
    let mut d = load_dataset(cfg)?;
    let mut stdout = String::new();

    let mut remapped = 0usize;
    if let Some(mapping_path) = &cfg.mapping {
        let mapping = in_file(
            mapping_path,
            CategoryMapping::parse_csv(&read_text(mapping_path)?),
        )?;
        let mapped = apply_category_mapping(&d, &mapping)?;
        remapped = changed_cells(&d, &mapped);
        d = mapped;
    }
    for split_path in &cfg.splits {
        let rule = in_file(
            split_path,
            SplitRule::parse_csv(&read_text(split_path)?, cfg.lenient_splits),
        )?;
        d = split_variable(&d, &rule)?;
    }
    let before_projects = d.rows().len();
    d = drop_high_missing_projects(&d, cfg.project_missing)?;
    let dropped_projects = before_projects - d.rows().len();
    let (cleaned, selection) = select_variables(
        &d,
        &SelectionOptions {
            max_missing: cfg.max_missing,
            drop_constant: true,
            redundant: cfg.drop.clone(),
        },
    )?;
    let flags = collect_outlier_flags(&cleaned, cfg)?;

    write_file(&cfg.out, "cleaned.csv", &cleaned.to_csv())?;
    write_file(
        &cfg.out,
        "cleaned_schema.csv",
        &dataset::write_schema(cleaned.variables()),
    )?;
    write_file(&cfg.out, "selection_report.csv", &selection_report_csv(&selection))?;
    write_file(&cfg.out, "selection_report.txt", &selection_report_text(&selection))?;
    write_file(&cfg.out, "outlier_flags.csv", &outlier_flags_csv(&flags))?;
    write_file(&cfg.out, "outlier_flags.txt", &outlier_flags_text(&flags))?;

    let _ = writeln!(stdout, "{} {MISSING_RATIO_NOTE}", summary_line(&cleaned));
    let _ = writeln!(stdout, "remapped cells: {remapped}");
    let _ = writeln!(stdout, "projects dropped for missingness: {dropped_projects}");
    let _ = writeln!(
        stdout,
        "variables dropped: {} ({} kept)",
        selection.dropped.len(),
        selection.kept.len()
    );
    let _ = writeln!(stdout, "outlier flags: {}", flags.len());
    Ok(stdout)
}

pub fn summary(cfg: &RunConfig) -> Result<String, CliError> {
    let d = load_dataset(cfg)?;
    let mut stdout = String::new();
    let _ = writeln!(stdout, "{} {MISSING_RATIO_NOTE}", summary_line(&d));

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["variable", "n", "min", "q1", "median", "q3", "max", "mean", "sd"])
        .unwrap();
    let mut wrote_any = false;
    let mut continuous_seen = false;
    for spec in d.variables() {
        let analyzed = spec.role == Role::Independent || spec.role == Role::Dependent;
        if !analyzed || spec.scale != Scale::Continuous {
            continue;
        }
        continuous_seen = true;
        let col = d.column_index(&spec.name).unwrap();
        let values: Vec<f64> = d
            .rows()
            .iter()
            .filter_map(|r| r.values[col].as_number())
            .collect();
        if values.is_empty() {
            continue;
        }
        let s = describe(&values)?;
        w.write_record([
            spec.name.as_str(),
            &s.n.to_string(),
            &format_number(s.min),
            &format_number(s.q1),
            &format_number(s.median),
            &format_number(s.q3),
            &format_number(s.max),
            &format_number(s.mean),
            &format_number(s.sd), // population (n-denominator) deviation
        ])
        .unwrap();
        wrote_any = true;
    }
    if !continuous_seen {
        return Err(Error::NoContinuousVariables.into());
    }
    let box_csv = String::from_utf8(w.into_inner().unwrap()).unwrap();
    write_file(&cfg.out, "box_summary.csv", &box_csv)?;
    let flags = collect_outlier_flags(&d, cfg)?;
    write_file(&cfg.out, "outlier_flags.csv", &outlier_flags_csv(&flags))?;
    let _ = writeln!(
        stdout,
        "box summaries written for {} variables, {} outlier flags",
        if wrote_any { box_csv.lines().count() - 1 } else { 0 },
        flags.len()
    );
    Ok(stdout)
}

fn per_project_csv(seed: u64, results: &[&MethodResult]) -> String {
    let mut out = format!("# master_seed={seed}\n");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["project_id", "actual", "estimate", "method", "fallback"])
        .unwrap();
    for result in results {
        let method = result.method.to_string();
        for o in &result.per_project {
            w.write_record([
                o.project_id.as_str(),
                &o.actual.map(format_number).unwrap_or_default(),
                &o.estimate.map(format_number).unwrap_or_default(),
                &method,
                if o.fallback { "true" } else { "false" },
            ])
            .unwrap();
        }
    }
    out.push_str(&String::from_utf8(w.into_inner().unwrap()).unwrap());
    out
}

pub fn analyze(cfg: &RunConfig) -> Result<String, CliError> {
    let d = load_dataset(cfg)?;
    let size_var = cfg.size_var.clone().ok_or_else(|| {
        CliError::Config("analyze needs a size variable (--size-var or config `size_var`)".into())
    })?;
    let grid_spec = cfg.grid.as_deref().unwrap_or("default");
    let grid = parse_grid_spec(grid_spec, cfg.allow_any_pairing)?;
    let strategy = parse_fold_strategy(&cfg.folds)?;
    let plan = make_folds(&d.project_ids(), strategy, cfg.seed)?;
    let bootstrap = BootstrapConfig::new(cfg.draws, cfg.alpha, cfg.seed)?;

    let grid_report = grid_search(&d, &grid, &plan, &bootstrap)?;
    // The grid report survives even if the baseline or comparison fails.
    write_file(&cfg.out, "grid_report.json", &grid_report.to_json())?;
    let lra = cross_validate(
        &d,
        &Method::Lra {
            size_variable: size_var,
        },
        &plan,
        &bootstrap,
    )?;
    let comparison = compare_report(&grid_report, &lra)?;

    let text = comparison.to_text();
    write_file(&cfg.out, "comparison.txt", &text)?;
    write_file(
        &cfg.out,
        "comparison.csv",
        &format!("# master_seed={}\n{}", cfg.seed, comparison.to_csv()),
    )?;
    let best_mmre = grid_report
        .best_cell(Objective::Mmre)
        .and_then(|c| c.result.as_ref())
        .expect("comparison exists, so a best cell exists");
    write_file(
        &cfg.out,
        "per_project.csv",
        &per_project_csv(cfg.seed, &[best_mmre, &lra]),
    )?;

    let mut stdout = text;
    let failed = grid_report.cells.iter().filter(|c| c.error.is_some()).count();
    if failed > 0 {
        let _ = writeln!(
            stdout,
            "{failed} of {} grid cells were infeasible (see grid_report.json)",
            grid_report.cells.len()
        );
    }
    Ok(stdout)
}

/// The combo `predict` uses when the grid spec names none explicitly.
pub const DEFAULT_PREDICT_COMBO: (PredictionFn, Objective, usize, usize) =
    (PredictionFn::Mean, Objective::Msd, 10, 3);

pub fn predict(cfg: &RunConfig, target_path: &Path) -> Result<String, CliError> {
    let d = load_dataset(cfg)?;
    let schema = load_schema(cfg)?;
    let target_data = in_file(
        target_path,
        dataset::parse_dataset(&read_text(target_path)?, &schema),
    )?;
    if target_data.rows().len() != 1 {
        return Err(CliError::Config(format!(
            "target file must hold exactly one project row, found {}",
            target_data.rows().len()
        )));
    }
    let target = &target_data.rows()[0];

    let combo = match cfg.grid.as_deref() {
        None | Some("default") => {
            let (pf, obj, set, preds) = DEFAULT_PREDICT_COMBO;
            ParameterCombo::new(pf, obj, set, preds)?
        }
        Some(spec) => {
            let combos = parse_grid_spec(spec, cfg.allow_any_pairing)?;
            if combos.len() != 1 {
                return Err(CliError::Config(
                    "predict needs a single combo; use --grid single:(...)".into(),
                ));
            }
            combos[0]
        }
    };
    let bootstrap = BootstrapConfig::new(cfg.draws, cfg.alpha, cfg.seed)?;
    let estimator = OsrEstimator::fit(&d, combo)?;
    let prediction = estimator.predict(target, &bootstrap)?;

    let mut stdout = String::new();
    let _ = writeln!(stdout, "estimate: {}", format_number(prediction.estimate));
    let _ = writeln!(stdout, "combo: {combo}");
    if prediction.fallback {
        let _ = writeln!(
            stdout,
            "warning: no significant reduction applied; this is the whole \
             training set's prediction (low confidence)"
        );
    }
    if prediction.dropped_missing_dependent > 0 {
        let _ = writeln!(
            stdout,
            "note: {} training projects lacked a dependent value and were ignored",
            prediction.dropped_missing_dependent
        );
    }
    for model in &prediction.models {
        let _ = writeln!(stdout, "model: {}", model.render_line());
    }
    Ok(stdout)
}
