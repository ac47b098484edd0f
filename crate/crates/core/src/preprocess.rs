//! Data preparation and selection: category unification, variable splitting,
//! variable selection, project filtering, and box-plot outlier detection.
//!
//! All operations are pure: they take a dataset and return a new one.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::dataset::{Dataset, ProjectRow, Role, Scale, Value, VariableSpec, MISSING_TOKEN};
use crate::error::{Error, Result};
use crate::stats::quantile_sorted;

/// Rewrites of nominal labels: per variable, each old label maps to exactly
/// one new label, and no new label of a variable reappears as an old label of
/// the same variable. The closure rule makes application idempotent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryMapping {
    entries: Vec<MappingEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MappingEntry {
    pub variable: String,
    pub old_label: String,
    pub new_label: String,
}

impl MappingEntry {
    pub fn new(
        variable: impl Into<String>,
        old_label: impl Into<String>,
        new_label: impl Into<String>,
    ) -> Self {
        Self {
            variable: variable.into(),
            old_label: old_label.into(),
            new_label: new_label.into(),
        }
    }
}

impl CategoryMapping {
    pub fn new(entries: Vec<MappingEntry>) -> Result<Self> {
        let mut by_old: HashMap<(&str, &str), &str> = HashMap::new();
        for e in &entries {
            match by_old.insert((&e.variable, &e.old_label), &e.new_label) {
                Some(prev) if prev != e.new_label => {
                    return Err(Error::MappingConflict {
                        variable: e.variable.clone(),
                        old_label: e.old_label.clone(),
                    })
                }
                _ => {}
            }
        }
        for e in &entries {
            if by_old.contains_key(&(e.variable.as_str(), e.new_label.as_str())) {
                return Err(Error::MappingNotClosed {
                    variable: e.variable.clone(),
                    label: e.new_label.clone(),
                });
            }
            if e.new_label.is_empty() || e.new_label == MISSING_TOKEN {
                return Err(Error::MappingNotClosed {
                    variable: e.variable.clone(),
                    label: e.new_label.clone(),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn empty() -> Self {
        Self { entries: vec![] }
    }

    pub fn entries(&self) -> &[MappingEntry] {
        &self.entries
    }

    /// Parse a mapping file: header `variable,old_label,new_label`, one entry
    /// per row.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut entries = Vec::new();
        let mut saw_header = false;
        for (i, record) in reader.records().enumerate() {
            let line = i + 1;
            let record = record.map_err(|e| Error::MappingSyntax {
                line,
                msg: e.to_string(),
            })?;
            if record.len() == 1 && record.get(0) == Some("") {
                continue;
            }
            if !saw_header {
                if record.iter().collect::<Vec<_>>() != ["variable", "old_label", "new_label"] {
                    return Err(Error::MappingSyntax {
                        line,
                        msg: "expected header variable,old_label,new_label".to_string(),
                    });
                }
                saw_header = true;
                continue;
            }
            if record.len() != 3 {
                return Err(Error::MappingSyntax {
                    line,
                    msg: format!("expected 3 fields, found {}", record.len()),
                });
            }
            entries.push(MappingEntry::new(
                record.get(0).unwrap(),
                record.get(1).unwrap(),
                record.get(2).unwrap(),
            ));
        }
        if !saw_header {
            return Err(Error::MappingSyntax {
                line: 1,
                msg: "missing header variable,old_label,new_label".to_string(),
            });
        }
        Self::new(entries)
    }
}

/// Rewrite matching labels of nominal variables; unmatched labels and missing
/// cells pass through. Applying a mapping twice equals applying it once.
pub fn apply_category_mapping(d: &Dataset, m: &CategoryMapping) -> Result<Dataset> {
    let mut by_var: HashMap<&str, HashMap<&str, &str>> = HashMap::new();
    for e in m.entries() {
        let col = d
            .column_index(&e.variable)
            .ok_or_else(|| Error::UnknownVariable {
                name: e.variable.clone(),
            })?;
        if d.variables()[col].scale != Scale::Nominal {
            return Err(Error::NotNominal {
                name: e.variable.clone(),
            });
        }
        by_var
            .entry(&e.variable)
            .or_default()
            .insert(&e.old_label, &e.new_label);
    }
    let mut rows = d.rows().to_vec();
    for (var, table) in &by_var {
        let col = d.column_index(var).expect("checked above");
        for row in &mut rows {
            if let Value::Label(l) = &row.values[col] {
                if let Some(new) = table.get(l.as_str()) {
                    row.values[col] = Value::Label((*new).to_string());
                }
            }
        }
    }
    Ok(Dataset::from_parts_unchecked(
        d.id_column().to_string(),
        d.variables().to_vec(),
        rows,
    ))
}

/// Replaces one nominal variable by two: each source label maps to a pair of
/// labels for the fresh target variables. In lenient mode, labels absent from
/// the table become missing in both targets; in strict mode they are errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRule {
    pub source_variable: String,
    pub target_a: String,
    pub target_b: String,
    table: Vec<(String, (String, String))>,
    pub lenient: bool,
}

impl SplitRule {
    pub fn new(
        source_variable: impl Into<String>,
        target_a: impl Into<String>,
        target_b: impl Into<String>,
        table: Vec<(String, (String, String))>,
        lenient: bool,
    ) -> Result<Self> {
        let source_variable = source_variable.into();
        let target_a = target_a.into();
        let target_b = target_b.into();
        if target_a.is_empty() || target_b.is_empty() {
            return Err(Error::EmptyVariableName);
        }
        if target_a == target_b || target_a == source_variable || target_b == source_variable {
            return Err(Error::SplitTargetCollision {
                name: target_a.clone(),
            });
        }
        let mut seen = HashSet::new();
        for (old, (a, b)) in &table {
            if !seen.insert(old.as_str()) {
                return Err(Error::SplitSyntax {
                    line: 0,
                    msg: format!("label {old:?} appears more than once"),
                });
            }
            for label in [a, b] {
                if label.is_empty() || label == MISSING_TOKEN {
                    return Err(Error::SplitSyntax {
                        line: 0,
                        msg: format!("target label {label:?} for {old:?} is not a valid label"),
                    });
                }
            }
        }
        Ok(Self {
            source_variable,
            target_a,
            target_b,
            table,
            lenient,
        })
    }

    pub fn table(&self) -> &[(String, (String, String))] {
        &self.table
    }

    /// Parse a split-rule file. The header names the two targets:
    /// `variable,old_label,<target_a>,<target_b>`; every row maps one source
    /// label, and all rows must name the same source variable.
    pub fn parse_csv(text: &str, lenient: bool) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut target_a = None;
        let mut target_b = None;
        let mut source: Option<String> = None;
        let mut table = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let line = i + 1;
            let record = record.map_err(|e| Error::SplitSyntax {
                line,
                msg: e.to_string(),
            })?;
            if record.len() == 1 && record.get(0) == Some("") {
                continue;
            }
            if target_a.is_none() {
                if record.len() != 4
                    || record.get(0) != Some("variable")
                    || record.get(1) != Some("old_label")
                {
                    return Err(Error::SplitSyntax {
                        line,
                        msg: "expected header variable,old_label,<target_a>,<target_b>"
                            .to_string(),
                    });
                }
                target_a = Some(record.get(2).unwrap().to_string());
                target_b = Some(record.get(3).unwrap().to_string());
                continue;
            }
            if record.len() != 4 {
                return Err(Error::SplitSyntax {
                    line,
                    msg: format!("expected 4 fields, found {}", record.len()),
                });
            }
            let var = record.get(0).unwrap();
            match &source {
                None => source = Some(var.to_string()),
                Some(s) if s != var => {
                    return Err(Error::SplitSyntax {
                        line,
                        msg: format!("row names variable {var:?}, expected {s:?}"),
                    })
                }
                _ => {}
            }
            table.push((
                record.get(1).unwrap().to_string(),
                (
                    record.get(2).unwrap().to_string(),
                    record.get(3).unwrap().to_string(),
                ),
            ));
        }
        let (Some(target_a), Some(target_b)) = (target_a, target_b) else {
            return Err(Error::SplitSyntax {
                line: 1,
                msg: "missing header".to_string(),
            });
        };
        let source = source.ok_or_else(|| Error::SplitSyntax {
            line: 1,
            msg: "no mapping rows".to_string(),
        })?;
        Self::new(source, target_a, target_b, table, lenient)
    }
}

/// Apply a split rule: the source column is removed and two fresh nominal
/// independent columns are appended. A missing source cell yields missing in
/// both targets.
pub fn split_variable(d: &Dataset, rule: &SplitRule) -> Result<Dataset> {
    let col = d
        .column_index(&rule.source_variable)
        .ok_or_else(|| Error::UnknownVariable {
            name: rule.source_variable.clone(),
        })?;
    if d.variables()[col].scale != Scale::Nominal {
        return Err(Error::NotNominal {
            name: rule.source_variable.clone(),
        });
    }
    for target in [&rule.target_a, &rule.target_b] {
        if d.column_index(target).is_some() {
            return Err(Error::SplitTargetCollision {
                name: target.clone(),
            });
        }
    }
    let table: HashMap<&str, &(String, String)> = rule
        .table()
        .iter()
        .map(|(old, pair)| (old.as_str(), pair))
        .collect();

    let mut variables: Vec<VariableSpec> = d.variables().to_vec();
    variables.remove(col);
    variables.push(VariableSpec::new(
        rule.target_a.clone(),
        Scale::Nominal,
        Role::Independent,
    ));
    variables.push(VariableSpec::new(
        rule.target_b.clone(),
        Scale::Nominal,
        Role::Independent,
    ));

    let mut rows = Vec::with_capacity(d.rows().len());
    for row in d.rows() {
        let (a, b) = match &row.values[col] {
            Value::Missing => (Value::Missing, Value::Missing),
            Value::Label(l) => match table.get(l.as_str()) {
                Some((a, b)) => (Value::Label(a.clone()), Value::Label(b.clone())),
                None if rule.lenient => (Value::Missing, Value::Missing),
                None => {
                    return Err(Error::SplitUnmappedLabel {
                        variable: rule.source_variable.clone(),
                        label: l.clone(),
                    })
                }
            },
            Value::Number(_) => unreachable!("nominal column holds no numbers"),
        };
        let mut values = row.values.clone();
        values.remove(col);
        values.push(a);
        values.push(b);
        rows.push(ProjectRow::new(row.id.clone(), values));
    }
    Ok(Dataset::from_parts_unchecked(
        d.id_column().to_string(),
        variables,
        rows,
    ))
}

/// Why an independent variable was dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    MissingRatio,
    Constant,
    Redundant,
}

impl std::fmt::Display for DropReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DropReason::MissingRatio => write!(f, "missing_ratio"),
            DropReason::Constant => write!(f, "constant"),
            DropReason::Redundant => write!(f, "redundant"),
        }
    }
}

/// Outcome of variable selection: dropped and kept partition the original
/// independent variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelectionReport {
    pub dropped: Vec<(String, DropReason)>,
    pub kept: Vec<String>,
}

/// Thresholds and the explicit redundancy list for variable selection.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionOptions {
    /// Drop when the missing fraction is at least this (default 0.9).
    pub max_missing: f64,
    /// Drop columns whose non-missing values are all identical.
    pub drop_constant: bool,
    /// Names dropped by expert judgment (e.g. measures duplicating the
    /// dependent variable).
    pub redundant: Vec<String>,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        Self {
            max_missing: 0.9,
            drop_constant: true,
            redundant: vec![],
        }
    }
}

/// Drop independent variables that are mostly missing, constant, or listed as
/// redundant. Dependent and identifier columns are never dropped.
pub fn select_variables(
    d: &Dataset,
    opts: &SelectionOptions,
) -> Result<(Dataset, SelectionReport)> {
    let dependent = &d.variables()[d.dependent_index()].name;
    for name in &opts.redundant {
        let col = d
            .column_index(name)
            .ok_or_else(|| Error::UnknownVariable { name: name.clone() })?;
        if name == dependent {
            return Err(Error::RedundantDependent { name: name.clone() });
        }
        if d.variables()[col].role != Role::Independent {
            return Err(Error::NotIndependent { name: name.clone() });
        }
    }

    let n = d.rows().len();
    let mut dropped = Vec::new();
    let mut kept = Vec::new();
    let mut drop_cols = HashSet::new();
    for (col, spec) in d.variables().iter().enumerate() {
        if spec.role != Role::Independent {
            continue;
        }
        let missing = d.rows().iter().filter(|r| r.values[col].is_missing()).count();
        let missing_frac = if n == 0 { 0.0 } else { missing as f64 / n as f64 };
        let non_missing: Vec<&Value> = d
            .rows()
            .iter()
            .map(|r| &r.values[col])
            .filter(|v| !v.is_missing())
            .collect();
        let constant = !non_missing.is_empty() && non_missing.iter().all(|v| *v == non_missing[0]);
        let reason = if missing_frac >= opts.max_missing {
            Some(DropReason::MissingRatio)
        } else if opts.drop_constant && constant {
            Some(DropReason::Constant)
        } else if opts.redundant.iter().any(|r| r == &spec.name) {
            Some(DropReason::Redundant)
        } else {
            None
        };
        match reason {
            Some(reason) => {
                dropped.push((spec.name.clone(), reason));
                drop_cols.insert(col);
            }
            None => kept.push(spec.name.clone()),
        }
    }

    let variables: Vec<VariableSpec> = d
        .variables()
        .iter()
        .enumerate()
        .filter(|(c, _)| !drop_cols.contains(c))
        .map(|(_, v)| v.clone())
        .collect();
    let rows: Vec<ProjectRow> = d
        .rows()
        .iter()
        .map(|r| {
            ProjectRow::new(
                r.id.clone(),
                r.values
                    .iter()
                    .enumerate()
                    .filter(|(c, _)| !drop_cols.contains(c))
                    .map(|(_, v)| v.clone())
                    .collect(),
            )
        })
        .collect();
    Ok((
        Dataset::from_parts_unchecked(d.id_column().to_string(), variables, rows),
        SelectionReport { dropped, kept },
    ))
}

/// Remove projects whose fraction of missing independent cells is strictly
/// greater than `threshold`.
pub fn drop_high_missing_projects(d: &Dataset, threshold: f64) -> Result<Dataset> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParameter {
            msg: format!("project-missing threshold must lie in (0,1], got {threshold}"),
        });
    }
    let independents = d.independent_indices();
    Ok(filter_projects(d, |row| {
        if independents.is_empty() {
            return true;
        }
        let missing = independents
            .iter()
            .filter(|&&c| row.values[c].is_missing())
            .count();
        missing as f64 / independents.len() as f64 <= threshold
    }))
}

/// Box-plot outlier class; extreme values lie beyond the wider fence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OutlierClass {
    Outlier,
    Extreme,
}

impl std::fmt::Display for OutlierClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OutlierClass::Outlier => write!(f, "outlier"),
            OutlierClass::Extreme => write!(f, "extreme"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutlierFlag {
    pub project_id: String,
    pub class: OutlierClass,
    pub variable: String,
}

/// Flag values beyond the quartile fences of one continuous variable.
/// With quartiles Q1/Q3 interpolated at p*(n-1) and IQR = Q3 - Q1, a value is
/// extreme when strictly beyond Q1/Q3 -/+ k_extreme*IQR, otherwise an outlier
/// when strictly beyond the k_outlier fences. Missing cells are never flagged.
pub fn detect_outliers_iqr(
    d: &Dataset,
    variable: &str,
    k_outlier: f64,
    k_extreme: f64,
) -> Result<Vec<OutlierFlag>> {
    if !(k_outlier > 0.0 && k_extreme > 0.0) {
        return Err(Error::InvalidParameter {
            msg: "fence constants must be positive".to_string(),
        });
    }
    let col = d
        .column_index(variable)
        .ok_or_else(|| Error::UnknownVariable {
            name: variable.to_string(),
        })?;
    if d.variables()[col].scale != Scale::Continuous {
        return Err(Error::NotContinuous {
            name: variable.to_string(),
        });
    }
    let mut values: Vec<f64> = d
        .rows()
        .iter()
        .filter_map(|r| r.values[col].as_number())
        .collect();
    if values.len() < 4 {
        return Err(Error::TooFewValues {
            variable: variable.to_string(),
            needed: 4,
            found: values.len(),
        });
    }
    values.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&values, 0.25);
    let q3 = quantile_sorted(&values, 0.75);
    let iqr = q3 - q1;
    let classify = |v: f64| {
        if v < q1 - k_extreme * iqr || v > q3 + k_extreme * iqr {
            Some(OutlierClass::Extreme)
        } else if v < q1 - k_outlier * iqr || v > q3 + k_outlier * iqr {
            Some(OutlierClass::Outlier)
        } else {
            None
        }
    };
    let mut flags = Vec::new();
    for row in d.rows() {
        if let Some(v) = row.values[col].as_number() {
            if let Some(class) = classify(v) {
                flags.push(OutlierFlag {
                    project_id: row.id.clone(),
                    class,
                    variable: variable.to_string(),
                });
            }
        }
    }
    Ok(flags)
}

/// Keep exactly the rows satisfying the predicate, preserving order. Used to
/// carve analysis subsets out of a cleaned dataset.
pub fn filter_projects(d: &Dataset, mut keep: impl FnMut(&ProjectRow) -> bool) -> Dataset {
    let rows: Vec<ProjectRow> = d.rows().iter().filter(|r| keep(r)).cloned().collect();
    Dataset::from_parts_unchecked(d.id_column().to_string(), d.variables().to_vec(), rows)
}
