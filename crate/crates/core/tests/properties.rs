//! Property tests for the library's structural invariants.

use proptest::prelude::*;

use osr_core::dataset::{parse_dataset, Dataset, ProjectRow, Role, Scale, Value, VariableSpec};
use osr_core::preprocess::{
    apply_category_mapping, detect_outliers_iqr, filter_projects, select_variables,
    CategoryMapping, MappingEntry, OutlierClass, SelectionOptions, SplitRule,
    split_variable,
};
use osr_core::stats::{accuracy, describe, quantile_sorted, PredictionPair};
use osr_core::evaluation::{make_folds, FoldStrategy};

// ---------------------------------------------------------------------------
// Dataset generation
// ---------------------------------------------------------------------------

/// Labels over a charset exercising CSV quoting (comma, quote, newline,
/// space); lowercase, so the reserved missing token can never appear.
fn label_strategy() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[a-z,\" \n]{1,8}").unwrap()
}

fn value_strategy(scale: Scale) -> BoxedStrategy<Value> {
    match scale {
        Scale::Nominal => prop_oneof![
            1 => Just(Value::Missing),
            4 => label_strategy().prop_map(Value::Label),
        ]
        .boxed(),
        Scale::Continuous => prop_oneof![
            1 => Just(Value::Missing),
            4 => (-1.0e9..1.0e9f64).prop_map(Value::Number),
        ]
        .boxed(),
    }
}

fn schema_strategy() -> impl Strategy<Value = Vec<VariableSpec>> {
    proptest::collection::vec(
        (any::<bool>(), 0..10u8),
        0..5,
    )
    .prop_map(|vars| {
        let mut schema: Vec<VariableSpec> = vars
            .into_iter()
            .enumerate()
            .map(|(i, (continuous, role))| {
                let scale = if continuous {
                    Scale::Continuous
                } else {
                    Scale::Nominal
                };
                // Mostly independent, with occasional identifier/excluded.
                let role = match role {
                    8 => Role::Identifier,
                    9 => Role::Excluded,
                    _ => Role::Independent,
                };
                VariableSpec::new(format!("v{i}"), scale, role)
            })
            .collect();
        schema.push(VariableSpec::new("dep", Scale::Continuous, Role::Dependent));
        schema
    })
}

fn dataset_strategy() -> impl Strategy<Value = Dataset> {
    schema_strategy().prop_flat_map(|schema| {
        let row_strategy: Vec<BoxedStrategy<Value>> =
            schema.iter().map(|v| value_strategy(v.scale)).collect();
        proptest::collection::vec(row_strategy, 0..12).prop_map(move |rows| {
            let rows = rows
                .into_iter()
                .enumerate()
                .map(|(i, values)| ProjectRow::new(format!("p{i}"), values))
                .collect();
            Dataset::new("id", schema.clone(), rows).expect("generated dataset is valid")
        })
    })
}

proptest! {
    #[test]
    fn csv_round_trip_identity(d in dataset_strategy()) {
        let written = d.to_csv();
        let parsed = parse_dataset(&written, d.variables()).expect("own output parses");
        prop_assert_eq!(&parsed, &d);
        // A second write/parse cycle is bit-identical.
        prop_assert_eq!(parsed.to_csv(), written);
    }

    #[test]
    fn summary_matches_direct_count(d in dataset_strategy()) {
        let s = d.summarize();
        prop_assert!((0.0..=1.0).contains(&s.missing_ratio));
        let mut cols = d.independent_indices();
        cols.push(d.dependent_index());
        let mut missing = 0usize;
        for row in d.rows() {
            for &c in &cols {
                if row.values[c].is_missing() {
                    missing += 1;
                }
            }
        }
        let denom = d.rows().len() * cols.len();
        let expected = if denom == 0 { 0.0 } else { missing as f64 / denom as f64 };
        prop_assert_eq!(s.missing_ratio, expected);
        prop_assert_eq!(s.independent_variable_count, cols.len() - 1);
    }

    #[test]
    fn selection_removes_all_constant_columns(d in dataset_strategy()) {
        let (out, report) = select_variables(&d, &SelectionOptions::default()).unwrap();
        for col in out.independent_indices() {
            let non_missing: Vec<&Value> = out
                .rows()
                .iter()
                .map(|r| &r.values[col])
                .filter(|v| !v.is_missing())
                .collect();
            prop_assert!(
                non_missing.is_empty() || non_missing.iter().any(|v| *v != non_missing[0]),
                "constant column {} survived selection",
                out.variables()[col].name
            );
        }
        let mut partition: Vec<String> = report.kept.clone();
        partition.extend(report.dropped.iter().map(|(n, _)| n.clone()));
        partition.sort();
        let mut original: Vec<String> = d
            .independent_indices()
            .into_iter()
            .map(|c| d.variables()[c].name.clone())
            .collect();
        original.sort();
        prop_assert_eq!(partition, original);
    }

    #[test]
    fn filter_preserves_row_subsequence(d in dataset_strategy(), keep_mask in proptest::collection::vec(any::<bool>(), 0..12)) {
        let out = filter_projects(&d, |row| {
            let idx: usize = row.id[1..].parse().unwrap();
            keep_mask.get(idx).copied().unwrap_or(false)
        });
        let original: Vec<&str> = d.rows().iter().map(|r| r.id.as_str()).collect();
        let mut cursor = 0usize;
        for row in out.rows() {
            let pos = original[cursor..]
                .iter()
                .position(|id| *id == row.id)
                .expect("filtered rows keep original order");
            cursor += pos + 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Accuracy metric properties
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn accuracy_scaling_and_permutation(
        pairs in proptest::collection::vec((0.1..1e4f64, -1e4..1e4f64), 1..40),
        c in 0.001..1000.0f64,
    ) {
        let base: Vec<PredictionPair> = pairs
            .iter()
            .map(|&(a, e)| PredictionPair::new(a, e))
            .collect();
        let scaled: Vec<PredictionPair> = pairs
            .iter()
            .map(|&(a, e)| PredictionPair::new(c * a, c * e))
            .collect();
        let t = accuracy(&base).unwrap();
        let ts = accuracy(&scaled).unwrap();
        prop_assert!((t.mmre - ts.mmre).abs() <= 1e-9 * t.mmre.max(1.0));
        prop_assert!((ts.mad - c * t.mad).abs() <= 1e-9 * (c * t.mad).max(1.0));
        prop_assert!((ts.msd - c * c * t.msd).abs() <= 1e-9 * (c * c * t.msd).max(1.0));

        let mut reversed = base.clone();
        reversed.reverse();
        let tr = accuracy(&reversed).unwrap();
        prop_assert!((t.mmre - tr.mmre).abs() <= 1e-12 * t.mmre.max(1.0));

        // Mean of squares dominates the squared mean of absolutes.
        prop_assert!(t.msd >= t.mad * t.mad - 1e-9 * t.msd.max(1.0));
    }

    #[test]
    fn describe_extremes_are_exact(values in proptest::collection::vec(-1e9..1e9f64, 1..50)) {
        let s = describe(&values).unwrap();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(s.min, min);
        prop_assert_eq!(s.max, max);
        prop_assert!(s.min <= s.q1 && s.q1 <= s.median && s.median <= s.q3 && s.q3 <= s.max);
    }
}

// ---------------------------------------------------------------------------
// Normalization properties
// ---------------------------------------------------------------------------

fn positive_dataset() -> impl Strategy<Value = Dataset> {
    proptest::collection::vec((0.25..1e6f64, any::<bool>()), 1..20).prop_map(|cells| {
        let schema = vec![
            VariableSpec::new("x", Scale::Continuous, Role::Independent),
            VariableSpec::new("dep", Scale::Continuous, Role::Dependent),
        ];
        let rows = cells
            .into_iter()
            .enumerate()
            .map(|(i, (v, missing))| {
                let value = if missing && i > 0 {
                    Value::Missing
                } else {
                    Value::Number(v)
                };
                ProjectRow::new(format!("p{i}"), vec![value, Value::Number(1.0)])
            })
            .collect();
        Dataset::new("id", schema, rows).unwrap()
    })
}

proptest! {
    #[test]
    fn normalize_twice_equals_once(d in positive_dataset()) {
        let once = d.normalize_by_mean("x").unwrap();
        let twice = once.normalize_by_mean("x").unwrap();
        for (a, b) in once.rows().iter().zip(twice.rows()) {
            match (&a.values[0], &b.values[0]) {
                (Value::Number(x), Value::Number(y)) => {
                    prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
                }
                (a, b) => prop_assert_eq!(a, b),
            }
        }
        // Resulting non-missing mean is 1 within 1e-12.
        let values: Vec<f64> = once
            .rows()
            .iter()
            .filter_map(|r| r.values[0].as_number())
            .collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        prop_assert!((mean - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn normalize_preserves_extremes_for_positive_mean(d in positive_dataset()) {
        let normalized = d.normalize_by_mean("x").unwrap();
        let values = |ds: &Dataset| -> Vec<Option<f64>> {
            ds.rows().iter().map(|r| r.values[0].as_number()).collect()
        };
        let before = values(&d);
        let after = values(&normalized);
        let argmax = |vs: &[Option<f64>]| -> usize {
            vs.iter()
                .enumerate()
                .filter_map(|(i, v)| v.map(|v| (i, v)))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap()
                .0
        };
        let argmin = |vs: &[Option<f64>]| -> usize {
            vs.iter()
                .enumerate()
                .filter_map(|(i, v)| v.map(|v| (i, v)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap()
                .0
        };
        // The pre-normalization extreme projects still attain the extremes.
        let max_idx = argmax(&before);
        let min_idx = argmin(&before);
        let after_max = after[argmax(&after)].unwrap();
        let after_min = after[argmin(&after)].unwrap();
        prop_assert_eq!(after[max_idx].unwrap(), after_max);
        prop_assert_eq!(after[min_idx].unwrap(), after_min);
    }
}

// ---------------------------------------------------------------------------
// Outlier fence properties (dyadic grids keep fence arithmetic exact)
// ---------------------------------------------------------------------------

fn quarters_dataset(quarters: &[i32]) -> Dataset {
    let schema = vec![
        VariableSpec::new("x", Scale::Continuous, Role::Independent),
        VariableSpec::new("dep", Scale::Continuous, Role::Dependent),
    ];
    let rows = quarters
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            ProjectRow::new(
                format!("p{i}"),
                vec![Value::Number(q as f64 / 4.0), Value::Number(1.0)],
            )
        })
        .collect();
    Dataset::new("id", schema, rows).unwrap()
}

proptest! {
    #[test]
    fn iqr_flags_invariant_under_shift_and_positive_scale(
        quarters in proptest::collection::vec(-4000..4000i32, 4..30),
        shift in -1000..1000i32,
        scale_pow in -2..3i32,
    ) {
        let base = quarters_dataset(&quarters);
        let flags = detect_outliers_iqr(&base, "x", 1.5, 3.0).unwrap();

        let shifted = quarters_dataset(&quarters.iter().map(|q| q + shift * 4).collect::<Vec<_>>());
        let shifted_flags = detect_outliers_iqr(&shifted, "x", 1.5, 3.0).unwrap();
        prop_assert_eq!(&flags, &shifted_flags);

        // Positive power-of-two scaling is exact in binary floating point.
        let factor = 2.0f64.powi(scale_pow);
        let schema = base.variables().to_vec();
        let rows = base
            .rows()
            .iter()
            .map(|r| {
                let v = r.values[0].as_number().unwrap() * factor;
                ProjectRow::new(r.id.clone(), vec![Value::Number(v), Value::Number(1.0)])
            })
            .collect();
        let scaled = Dataset::new("id", schema, rows).unwrap();
        let scaled_flags = detect_outliers_iqr(&scaled, "x", 1.5, 3.0).unwrap();
        prop_assert_eq!(&flags, &scaled_flags);
    }

    #[test]
    fn extreme_lies_beyond_outlier_fence(
        quarters in proptest::collection::vec(-4000..4000i32, 4..30),
    ) {
        let d = quarters_dataset(&quarters);
        let flags = detect_outliers_iqr(&d, "x", 1.5, 3.0).unwrap();
        let mut sorted: Vec<f64> = quarters.iter().map(|&q| q as f64 / 4.0).collect();
        sorted.sort_by(f64::total_cmp);
        let q1 = quantile_sorted(&sorted, 0.25);
        let q3 = quantile_sorted(&sorted, 0.75);
        let iqr = q3 - q1;
        for flag in flags.iter().filter(|f| f.class == OutlierClass::Extreme) {
            let row = d.rows().iter().find(|r| r.id == flag.project_id).unwrap();
            let v = row.values[0].as_number().unwrap();
            prop_assert!(
                v < q1 - 1.5 * iqr || v > q3 + 1.5 * iqr,
                "extreme value {v} inside the outlier fences"
            );
        }
    }
}

// ---------------------------------------------------------------------------
// Mapping and split properties
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn mapping_is_idempotent_and_shape_preserving(
        labels in proptest::collection::vec(0..6usize, 1..15),
        mapped in proptest::collection::vec((0..6usize, 0..4usize), 0..8),
    ) {
        let pool = ["a", "b", "c", "d", "e", "f"];
        let new_pool = ["w", "x", "y", "z"];
        let schema = vec![
            VariableSpec::new("cat", Scale::Nominal, Role::Independent),
            VariableSpec::new("dep", Scale::Continuous, Role::Dependent),
        ];
        let rows: Vec<ProjectRow> = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                ProjectRow::new(
                    format!("p{i}"),
                    vec![Value::Label(pool[l].to_string()), Value::Number(1.0)],
                )
            })
            .collect();
        let d = Dataset::new("id", schema, rows).unwrap();
        let mut entries: Vec<MappingEntry> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (old, new) in mapped {
            if seen.insert(old) {
                entries.push(MappingEntry::new("cat", pool[old], new_pool[new]));
            }
        }
        let m = CategoryMapping::new(entries).unwrap();
        let once = apply_category_mapping(&d, &m).unwrap();
        let twice = apply_category_mapping(&once, &m).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once.rows().len(), d.rows().len());
        prop_assert_eq!(once.variables().len(), d.variables().len());
    }

    #[test]
    fn split_preserves_projects_and_adds_one_variable(
        labels in proptest::collection::vec(proptest::option::of(0..4usize), 1..15),
    ) {
        let pool = ["one", "two", "three", "four"];
        let schema = vec![
            VariableSpec::new("cat", Scale::Nominal, Role::Independent),
            VariableSpec::new("dep", Scale::Continuous, Role::Dependent),
        ];
        let rows: Vec<ProjectRow> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let v = match l {
                    Some(ix) => Value::Label(pool[*ix].to_string()),
                    None => Value::Missing,
                };
                ProjectRow::new(format!("p{i}"), vec![v, Value::Number(1.0)])
            })
            .collect();
        let d = Dataset::new("id", schema, rows).unwrap();
        let table = pool
            .iter()
            .map(|l| (l.to_string(), (format!("{l}-a"), format!("{l}-b"))))
            .collect();
        let rule = SplitRule::new("cat", "cat_a", "cat_b", table, false).unwrap();
        let out = split_variable(&d, &rule).unwrap();
        prop_assert_eq!(out.rows().len(), d.rows().len());
        prop_assert_eq!(out.variables().len(), d.variables().len() + 1);
    }
}

// ---------------------------------------------------------------------------
// Fold plan properties
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn random_k_folds_partition_evenly(n in 2..40usize, k in 2..10usize, seed in any::<u64>()) {
        prop_assume!(k <= n);
        let ids: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let plan = make_folds(&ids, FoldStrategy::RandomK(k), seed).unwrap();
        prop_assert_eq!(plan.folds.len(), k);
        let sizes: Vec<usize> = plan.folds.iter().map(Vec::len).collect();
        let min = sizes.iter().min().unwrap();
        let max = sizes.iter().max().unwrap();
        prop_assert!(max - min <= 1);
        prop_assert!(sizes.iter().all(|&s| s > 0));
        let mut all: Vec<String> = plan.folds.concat();
        all.sort();
        let mut expected = ids.clone();
        expected.sort();
        prop_assert_eq!(all, expected);
        // Determinism.
        let again = make_folds(&ids, FoldStrategy::RandomK(k), seed).unwrap();
        prop_assert_eq!(plan, again);
    }
}
