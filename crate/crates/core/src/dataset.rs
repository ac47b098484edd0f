//! Typed project dataset: variables with scales and roles, rows of values
//! with explicit missing cells, CSV input/output, and dataset-level summaries.
//!
//! On-disk format: UTF-8 CSV with RFC 4180 quoting, first row a header and
//! first column the project id. An empty cell or the literal token `NA`
//! (case-sensitive) marks a missing value on input; output always writes
//! missing cells as empty.

use serde::Serialize;

use crate::error::{Error, Result};

/// Measurement scale of a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Nominal,
    Continuous,
}

/// Role a variable plays in an analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Independent,
    Dependent,
    Identifier,
    Excluded,
}

/// One cell. Labels are non-empty and never the reserved token `NA`;
/// numbers are finite.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Missing,
    Label(String),
    Number(f64),
}

impl Value {
    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_label(&self) -> Option<&str> {
        match self {
            Value::Label(s) => Some(s),
            _ => None,
        }
    }
}

/// Declaration of one variable: unique name, scale, role.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariableSpec {
    pub name: String,
    pub scale: Scale,
    pub role: Role,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, scale: Scale, role: Role) -> Self {
        Self {
            name: name.into(),
            scale,
            role,
        }
    }
}

/// One project: id plus one value per variable, in variable order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectRow {
    pub id: String,
    pub values: Vec<Value>,
}

impl ProjectRow {
    pub fn new(id: impl Into<String>, values: Vec<Value>) -> Self {
        Self {
            id: id.into(),
            values,
        }
    }
}

/// Dataset-level counts. The missing ratio counts independent and dependent
/// columns only; identifier and excluded columns never enter the ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetSummary {
    pub project_count: usize,
    pub independent_variable_count: usize,
    pub missing_ratio: f64,
}

/// Immutable table of projects by variables. All operations on a dataset are
/// pure functions returning new datasets, so values are safe to share across
/// threads.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    id_column: String,
    variables: Vec<VariableSpec>,
    rows: Vec<ProjectRow>,
}

impl Dataset {
    /// Build a dataset, validating every invariant: unique non-empty variable
    /// names, exactly one continuous dependent variable, unique non-empty
    /// project ids, row widths, and cell/scale consistency.
    pub fn new(
        id_column: impl Into<String>,
        variables: Vec<VariableSpec>,
        rows: Vec<ProjectRow>,
    ) -> Result<Self> {
        let id_column = id_column.into();
        validate_variables(&variables)?;
        let mut seen_ids = std::collections::HashSet::new();
        for (i, row) in rows.iter().enumerate() {
            if row.id.is_empty() {
                return Err(Error::EmptyProjectId { row: i + 2 });
            }
            if !seen_ids.insert(row.id.as_str()) {
                return Err(Error::DuplicateProjectId {
                    row: i + 2,
                    id: row.id.clone(),
                });
            }
            if row.values.len() != variables.len() {
                return Err(Error::RowWidth {
                    row: i + 2,
                    expected: variables.len(),
                    found: row.values.len(),
                });
            }
            for (spec, value) in variables.iter().zip(&row.values) {
                validate_cell(&row.id, spec, value)?;
            }
        }
        Ok(Self {
            id_column,
            variables,
            rows,
        })
    }

    /// Construct without re-validating; for internal transformations that
    /// preserve invariants structurally (row filtering, column projection).
    pub(crate) fn from_parts_unchecked(
        id_column: String,
        variables: Vec<VariableSpec>,
        rows: Vec<ProjectRow>,
    ) -> Self {
        Self {
            id_column,
            variables,
            rows,
        }
    }

    pub fn id_column(&self) -> &str {
        &self.id_column
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn rows(&self) -> &[ProjectRow] {
        &self.rows
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Index of the single dependent variable.
    pub fn dependent_index(&self) -> usize {
        self.variables
            .iter()
            .position(|v| v.role == Role::Dependent)
            .expect("dataset invariant: exactly one dependent variable")
    }

    pub fn independent_indices(&self) -> Vec<usize> {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.role == Role::Independent)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn value(&self, row: usize, col: usize) -> &Value {
        &self.rows[row].values[col]
    }

    pub fn project_ids(&self) -> Vec<String> {
        self.rows.iter().map(|r| r.id.clone()).collect()
    }

    pub fn row_by_id(&self, id: &str) -> Option<&ProjectRow> {
        self.rows.iter().find(|r| r.id == id)
    }

    /// Project and missing-cell counts over the analyzed (independent and
    /// dependent) columns.
    pub fn summarize(&self) -> DatasetSummary {
        let mut considered = self.independent_indices();
        let independent_variable_count = considered.len();
        considered.push(self.dependent_index());
        let missing: usize = self
            .rows
            .iter()
            .map(|r| {
                considered
                    .iter()
                    .filter(|&&c| r.values[c].is_missing())
                    .count()
            })
            .sum();
        let denom = self.rows.len() * considered.len();
        let missing_ratio = if denom == 0 {
            0.0
        } else {
            missing as f64 / denom as f64
        };
        DatasetSummary {
            project_count: self.rows.len(),
            independent_variable_count,
            missing_ratio,
        }
    }

    /// Divide every non-missing value of a continuous variable by the mean of
    /// the non-missing values, leaving missing cells untouched. The result has
    /// mean 1 over non-missing values (within 1e-12).
    pub fn normalize_by_mean(&self, variable: &str) -> Result<Dataset> {
        let col = self
            .column_index(variable)
            .ok_or_else(|| Error::UnknownVariable {
                name: variable.to_string(),
            })?;
        if self.variables[col].scale != Scale::Continuous {
            return Err(Error::NotContinuous {
                name: variable.to_string(),
            });
        }
        let values: Vec<f64> = self
            .rows
            .iter()
            .filter_map(|r| r.values[col].as_number())
            .collect();
        if values.is_empty() {
            return Err(Error::NoValues {
                variable: variable.to_string(),
            });
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        if mean == 0.0 {
            return Err(Error::ZeroMean {
                variable: variable.to_string(),
            });
        }
        let mut rows = self.rows.clone();
        for row in &mut rows {
            if let Value::Number(x) = row.values[col] {
                let scaled = x / mean;
                if !scaled.is_finite() {
                    return Err(Error::InvalidParameter {
                        msg: format!(
                            "normalizing {variable:?} by mean {mean} overflows for value {x}"
                        ),
                    });
                }
                row.values[col] = Value::Number(scaled);
            }
        }
        Ok(Dataset {
            id_column: self.id_column.clone(),
            variables: self.variables.clone(),
            rows,
        })
    }

    /// Serialize to CSV. Missing cells become empty fields; quoting is applied
    /// only where RFC 4180 requires it. `parse_dataset` of the output together
    /// with the same schema reproduces the dataset exactly.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = Vec::with_capacity(1 + self.variables.len());
        header.push(self.id_column.as_str());
        header.extend(self.variables.iter().map(|v| v.name.as_str()));
        w.write_record(&header).expect("write to Vec cannot fail");
        for row in &self.rows {
            let mut record = Vec::with_capacity(1 + row.values.len());
            record.push(row.id.clone());
            for value in &row.values {
                record.push(match value {
                    Value::Missing => String::new(),
                    Value::Label(s) => s.clone(),
                    Value::Number(x) => format_number(*x),
                });
            }
            w.write_record(&record).expect("write to Vec cannot fail");
        }
        String::from_utf8(w.into_inner().expect("no flush errors on Vec"))
            .expect("CSV output is UTF-8")
    }
}

/// Shortest decimal representation that round-trips an `f64` exactly.
pub fn format_number(x: f64) -> String {
    format!("{x:?}")
}

fn validate_variables(variables: &[VariableSpec]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for v in variables {
        if v.name.is_empty() {
            return Err(Error::EmptyVariableName);
        }
        if !seen.insert(v.name.as_str()) {
            return Err(Error::DuplicateVariable {
                name: v.name.clone(),
            });
        }
    }
    let dependents: Vec<&VariableSpec> = variables
        .iter()
        .filter(|v| v.role == Role::Dependent)
        .collect();
    if dependents.len() != 1 {
        return Err(Error::DependentCount {
            found: dependents.len(),
        });
    }
    if dependents[0].scale != Scale::Continuous {
        return Err(Error::DependentNotContinuous {
            name: dependents[0].name.clone(),
        });
    }
    Ok(())
}

fn validate_cell(project: &str, spec: &VariableSpec, value: &Value) -> Result<()> {
    let fail = |msg: String| Error::InvalidCell {
        project: project.to_string(),
        column: spec.name.clone(),
        msg,
    };
    match (spec.scale, value) {
        (_, Value::Missing) => Ok(()),
        (Scale::Continuous, Value::Number(x)) => {
            if x.is_finite() {
                Ok(())
            } else {
                Err(fail(format!("number {x} is not finite")))
            }
        }
        (Scale::Continuous, Value::Label(_)) => {
            Err(fail("label under continuous variable".to_string()))
        }
        (Scale::Nominal, Value::Label(s)) => {
            if s.is_empty() {
                Err(fail("empty label".to_string()))
            } else if s == MISSING_TOKEN {
                Err(fail(format!("label {MISSING_TOKEN:?} is reserved for missing values")))
            } else {
                Ok(())
            }
        }
        (Scale::Nominal, Value::Number(_)) => {
            Err(fail("number under nominal variable".to_string()))
        }
    }
}

/// Missing marker accepted on input next to the empty cell.
pub const MISSING_TOKEN: &str = "NA";

/// Parse a dataset from CSV text against a schema. The header must contain a
/// leading project-id column followed by every schema variable (in any
/// order); cells are typed per the schema, with empty cells and `NA` read as
/// missing. Errors carry 1-based row numbers (header is row 1) and column
/// names.
pub fn parse_dataset(csv_text: &str, schema: &[VariableSpec]) -> Result<Dataset> {
    validate_variables(schema)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(csv_text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(Ok(record)) => record,
        Some(Err(e)) => {
            return Err(Error::SchemaSyntax {
                line: 1,
                msg: format!("unreadable header: {e}"),
            })
        }
        None => return Err(Error::MissingHeader),
    };
    if header.len() == 1 && header.get(0) == Some("") {
        return Err(Error::MissingHeader);
    }
    let id_column = header
        .get(0)
        .map(str::to_string)
        .ok_or(Error::MissingHeader)?;

    // Map each schema variable to its CSV column.
    let mut seen = std::collections::HashSet::new();
    for field in header.iter().skip(1) {
        if !seen.insert(field) {
            return Err(Error::DuplicateColumn {
                name: field.to_string(),
            });
        }
        if !schema.iter().any(|v| v.name == field) {
            return Err(Error::UnknownColumn {
                name: field.to_string(),
            });
        }
    }
    let mut positions = Vec::with_capacity(schema.len());
    for spec in schema {
        match header.iter().skip(1).position(|f| f == spec.name) {
            None => {
                return Err(Error::MissingColumn {
                    name: spec.name.clone(),
                })
            }
            Some(p) => positions.push(p + 1),
        }
    }

    let mut rows = Vec::new();
    let mut seen_ids = std::collections::HashSet::new();
    for (i, record) in records.enumerate() {
        let row_no = i + 2;
        let record = record.map_err(|e| Error::SchemaSyntax {
            line: row_no,
            msg: format!("unreadable record: {e}"),
        })?;
        if record.len() != header.len() {
            return Err(Error::RowWidth {
                row: row_no,
                expected: header.len(),
                found: record.len(),
            });
        }
        let id = record.get(0).unwrap_or("").to_string();
        if id.is_empty() {
            return Err(Error::EmptyProjectId { row: row_no });
        }
        if !seen_ids.insert(id.clone()) {
            return Err(Error::DuplicateProjectId { row: row_no, id });
        }
        let mut values = Vec::with_capacity(schema.len());
        for (spec, &pos) in schema.iter().zip(&positions) {
            let token = record.get(pos).unwrap_or("");
            values.push(parse_cell(token, spec, row_no)?);
        }
        rows.push(ProjectRow { id, values });
    }
    Dataset::new(id_column, schema.to_vec(), rows)
}

fn parse_cell(token: &str, spec: &VariableSpec, row: usize) -> Result<Value> {
    if token.is_empty() || token == MISSING_TOKEN {
        return Ok(Value::Missing);
    }
    match spec.scale {
        Scale::Nominal => Ok(Value::Label(token.to_string())),
        Scale::Continuous => {
            let parsed: f64 = token.parse().map_err(|_| Error::InvalidNumber {
                row,
                column: spec.name.clone(),
                token: token.to_string(),
            })?;
            if !parsed.is_finite() {
                return Err(Error::InvalidNumber {
                    row,
                    column: spec.name.clone(),
                    token: token.to_string(),
                });
            }
            Ok(Value::Number(parsed))
        }
    }
}

/// Parse a schema file: one `name,scale,role` line per variable, with
/// scale in {nominal, continuous} and role in
/// {independent, dependent, identifier, excluded}. Blank lines are skipped.
pub fn parse_schema(text: &str) -> Result<Vec<VariableSpec>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut specs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| Error::SchemaSyntax {
            line,
            msg: e.to_string(),
        })?;
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != 3 {
            return Err(Error::SchemaSyntax {
                line,
                msg: format!("expected name,scale,role, found {} fields", record.len()),
            });
        }
        let name = record.get(0).unwrap();
        if name.is_empty() {
            return Err(Error::SchemaSyntax {
                line,
                msg: "empty variable name".to_string(),
            });
        }
        let scale = match record.get(1).unwrap() {
            "nominal" => Scale::Nominal,
            "continuous" => Scale::Continuous,
            other => {
                return Err(Error::SchemaSyntax {
                    line,
                    msg: format!("unknown scale {other:?}"),
                })
            }
        };
        let role = match record.get(2).unwrap() {
            "independent" => Role::Independent,
            "dependent" => Role::Dependent,
            "identifier" => Role::Identifier,
            "excluded" => Role::Excluded,
            other => {
                return Err(Error::SchemaSyntax {
                    line,
                    msg: format!("unknown role {other:?}"),
                })
            }
        };
        specs.push(VariableSpec::new(name, scale, role));
    }
    Ok(specs)
}

/// Render a schema in the `name,scale,role` file format.
pub fn write_schema(variables: &[VariableSpec]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for v in variables {
        let scale = match v.scale {
            Scale::Nominal => "nominal",
            Scale::Continuous => "continuous",
        };
        let role = match v.role {
            Role::Independent => "independent",
            Role::Dependent => "dependent",
            Role::Identifier => "identifier",
            Role::Excluded => "excluded",
        };
        w.write_record([v.name.as_str(), scale, role])
            .expect("write to Vec cannot fail");
    }
    String::from_utf8(w.into_inner().expect("no flush errors on Vec")).expect("UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema_effort() -> Vec<VariableSpec> {
        vec![
            VariableSpec::new("type", Scale::Nominal, Role::Independent),
            VariableSpec::new("size", Scale::Continuous, Role::Independent),
            VariableSpec::new("effort", Scale::Continuous, Role::Dependent),
        ]
    }

    #[test]
    fn empty_cell_and_na_become_missing() {
        let csv = "id,type,size,effort\np1,New,,1.5\np2,Enh,NA,2.0\n";
        let d = parse_dataset(csv, &schema_effort()).unwrap();
        assert_eq!(d.value(0, 1), &Value::Missing);
        assert_eq!(d.value(1, 1), &Value::Missing);
        assert_eq!(d.value(0, 0), &Value::Label("New".to_string()));
        assert_eq!(d.value(1, 2), &Value::Number(2.0));
    }

    #[test]
    fn non_numeric_token_names_row_and_column() {
        let csv = "id,type,size,effort\np1,New,abc,1.5\n";
        let err = parse_dataset(csv, &schema_effort()).unwrap_err();
        match err {
            Error::InvalidNumber { row, column, token } => {
                assert_eq!(row, 2);
                assert_eq!(column, "size");
                assert_eq!(token, "abc");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn duplicate_project_id_rejected() {
        let csv = "id,type,size,effort\np1,New,1,1\np1,Enh,2,2\n";
        let err = parse_dataset(csv, &schema_effort()).unwrap_err();
        assert!(matches!(err, Error::DuplicateProjectId { row: 3, .. }));
    }

    #[test]
    fn row_width_mismatch_reported() {
        let csv = "id,type,size,effort\np1,New,1\n";
        let err = parse_dataset(csv, &schema_effort()).unwrap_err();
        assert!(matches!(
            err,
            Error::RowWidth {
                row: 2,
                expected: 4,
                found: 3
            }
        ));
    }

    #[test]
    fn unknown_and_missing_headers_rejected() {
        let err = parse_dataset("id,type,size,effort,extra\n", &schema_effort()).unwrap_err();
        assert!(matches!(err, Error::UnknownColumn { .. }));
        let err = parse_dataset("id,type,size\n", &schema_effort()).unwrap_err();
        assert!(matches!(err, Error::MissingColumn { .. }));
        let err = parse_dataset("", &schema_effort()).unwrap_err();
        assert!(matches!(err, Error::MissingHeader));
    }

    #[test]
    fn header_order_may_differ_from_schema() {
        let csv = "id,effort,type,size\np1,1.5,New,10\n";
        let d = parse_dataset(csv, &schema_effort()).unwrap();
        // Values are stored in schema order regardless of file order.
        assert_eq!(d.value(0, 0), &Value::Label("New".to_string()));
        assert_eq!(d.value(0, 1), &Value::Number(10.0));
        assert_eq!(d.value(0, 2), &Value::Number(1.5));
    }

    #[test]
    fn infinite_number_rejected() {
        let csv = "id,type,size,effort\np1,New,inf,1.5\n";
        let err = parse_dataset(csv, &schema_effort()).unwrap_err();
        assert!(matches!(err, Error::InvalidNumber { .. }));
    }

    #[test]
    fn round_trip_identity() {
        let csv = "id,type,size,effort\np1,New,1.5,2.25\np2,\"a,b\",NA,0.5\n";
        let d = parse_dataset(csv, &schema_effort()).unwrap();
        let written = d.to_csv();
        let d2 = parse_dataset(&written, &schema_effort()).unwrap();
        assert_eq!(d, d2);
        assert_eq!(written, d2.to_csv());
    }

    #[test]
    fn label_with_comma_is_quoted() {
        let d = Dataset::new(
            "id",
            schema_effort(),
            vec![ProjectRow::new(
                "p1",
                vec![
                    Value::Label("a,b".to_string()),
                    Value::Missing,
                    Value::Number(1.0),
                ],
            )],
        )
        .unwrap();
        let written = d.to_csv();
        assert!(written.contains("\"a,b\""));
        assert_eq!(parse_dataset(&written, &schema_effort()).unwrap(), d);
    }

    #[test]
    fn empty_project_list_writes_header_only() {
        let d = Dataset::new("id", schema_effort(), vec![]).unwrap();
        assert_eq!(d.to_csv(), "id,type,size,effort\n");
    }

    #[test]
    fn summary_counts_independent_and_dependent_columns() {
        // 2 projects x 2 independent + dependent; one missing independent cell.
        let csv = "id,type,size,effort\np1,New,,1.0\np2,Enh,2.0,2.0\n";
        let d = parse_dataset(csv, &schema_effort()).unwrap();
        let s = d.summarize();
        assert_eq!(s.project_count, 2);
        assert_eq!(s.independent_variable_count, 2);
        assert!((s.missing_ratio - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn summary_of_complete_dataset_is_zero() {
        let csv = "id,type,size,effort\np1,New,1,1\n";
        let d = parse_dataset(csv, &schema_effort()).unwrap();
        assert_eq!(d.summarize().missing_ratio, 0.0);
    }

    #[test]
    fn summary_with_all_independent_missing() {
        // k independent columns all missing, complete dependent: ratio k/(k+1).
        let csv = "id,type,size,effort\np1,,,1\np2,,,2\n";
        let d = parse_dataset(csv, &schema_effort()).unwrap();
        assert!((d.summarize().missing_ratio - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn summary_ignores_identifier_and_excluded_columns() {
        let schema = vec![
            VariableSpec::new("name", Scale::Nominal, Role::Identifier),
            VariableSpec::new("junk", Scale::Nominal, Role::Excluded),
            VariableSpec::new("size", Scale::Continuous, Role::Independent),
            VariableSpec::new("effort", Scale::Continuous, Role::Dependent),
        ];
        let csv = "id,name,junk,size,effort\np1,,,1,1\np2,,,,2\n";
        let d = parse_dataset(csv, &schema).unwrap();
        // Only the one missing `size` cell counts, over 2 projects x 2 columns.
        assert!((d.summarize().missing_ratio - 0.25).abs() < 1e-12);
    }

    #[test]
    fn normalize_divides_by_mean() {
        let csv = "id,type,size,effort\na,New,2,1\nb,New,4,1\nc,New,6,1\n";
        let d = parse_dataset(csv, &schema_effort()).unwrap();
        let n = d.normalize_by_mean("size").unwrap();
        assert_eq!(n.value(0, 1), &Value::Number(0.5));
        assert_eq!(n.value(1, 1), &Value::Number(1.0));
        assert_eq!(n.value(2, 1), &Value::Number(1.5));
    }

    #[test]
    fn normalize_constant_column_gives_ones() {
        let csv = "id,type,size,effort\na,New,3,1\nb,New,3,1\n";
        let d = parse_dataset(csv, &schema_effort()).unwrap();
        let n = d.normalize_by_mean("size").unwrap();
        assert_eq!(n.value(0, 1), &Value::Number(1.0));
        assert_eq!(n.value(1, 1), &Value::Number(1.0));
    }

    #[test]
    fn normalize_skips_missing_cells() {
        let csv = "id,type,size,effort\na,New,2,1\nb,New,,1\nc,New,6,1\n";
        let d = parse_dataset(csv, &schema_effort()).unwrap();
        let n = d.normalize_by_mean("size").unwrap();
        assert_eq!(n.value(0, 1), &Value::Number(0.5));
        assert_eq!(n.value(1, 1), &Value::Missing);
        assert_eq!(n.value(2, 1), &Value::Number(1.5));
    }

    #[test]
    fn normalize_errors() {
        let csv = "id,type,size,effort\na,New,2,1\nb,New,-2,1\n";
        let d = parse_dataset(csv, &schema_effort()).unwrap();
        assert!(matches!(
            d.normalize_by_mean("size").unwrap_err(),
            Error::ZeroMean { .. }
        ));
        assert!(matches!(
            d.normalize_by_mean("type").unwrap_err(),
            Error::NotContinuous { .. }
        ));
        assert!(matches!(
            d.normalize_by_mean("nope").unwrap_err(),
            Error::UnknownVariable { .. }
        ));
    }

    #[test]
    fn schema_file_round_trip() {
        let text = "type,nominal,independent\nsize,continuous,independent\neffort,continuous,dependent\n";
        let schema = parse_schema(text).unwrap();
        assert_eq!(schema, schema_effort());
        assert_eq!(write_schema(&schema), text);
    }

    #[test]
    fn schema_file_rejects_bad_tokens() {
        assert!(matches!(
            parse_schema("a,ordinal,independent\n").unwrap_err(),
            Error::SchemaSyntax { line: 1, .. }
        ));
        assert!(matches!(
            parse_schema("a,nominal,друг\n").unwrap_err(),
            Error::SchemaSyntax { line: 1, .. }
        ));
        assert!(matches!(
            parse_schema("a,nominal\n").unwrap_err(),
            Error::SchemaSyntax { line: 1, .. }
        ));
    }

    #[test]
    fn dataset_requires_one_dependent() {
        let schema = vec![VariableSpec::new(
            "size",
            Scale::Continuous,
            Role::Independent,
        )];
        assert!(matches!(
            Dataset::new("id", schema, vec![]).unwrap_err(),
            Error::DependentCount { found: 0 }
        ));
    }

    #[test]
    fn reserved_label_rejected_at_construction() {
        let err = Dataset::new(
            "id",
            schema_effort(),
            vec![ProjectRow::new(
                "p1",
                vec![
                    Value::Label("NA".to_string()),
                    Value::Missing,
                    Value::Number(1.0),
                ],
            )],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidCell { .. }));
    }
}
