//! Synthetic fixture generators shared by the integration suites.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use osr_core::dataset::{Dataset, ProjectRow, Role, Scale, Value, VariableSpec};

/// Heterogeneous projects: productivity is driven by two planted nominal
/// factors, `size` is uncorrelated noise, and roughly `missing_frac` of the
/// independent cells are blanked. Extra nominal noise variables can widen the
/// schema.
pub fn heterogeneous_fixture(
    seed: u64,
    n_projects: usize,
    extra_noise_vars: usize,
    missing_frac: f64,
) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut schema = vec![
        VariableSpec::new("factor_a", Scale::Nominal, Role::Independent),
        VariableSpec::new("factor_b", Scale::Nominal, Role::Independent),
        VariableSpec::new("size", Scale::Continuous, Role::Independent),
    ];
    for i in 0..extra_noise_vars {
        let scale = if i % 4 == 3 {
            Scale::Continuous
        } else {
            Scale::Nominal
        };
        schema.push(VariableSpec::new(format!("noise{i}"), scale, Role::Independent));
    }
    schema.push(VariableSpec::new("perf", Scale::Continuous, Role::Dependent));

    let a_levels = [0.7, 1.2, 1.7];
    let b_levels = [0.0, 0.4];
    let noise = Normal::new(0.0, 0.05).unwrap();
    let mut rows = Vec::with_capacity(n_projects);
    for p in 0..n_projects {
        let a = rng.random_range(0..a_levels.len());
        let b = rng.random_range(0..b_levels.len());
        let mut values = vec![
            Value::Label(format!("a{a}")),
            Value::Label(format!("b{b}")),
            Value::Number((rng.random_range(50.0..500.0f64) * 100.0).round() / 100.0),
        ];
        for i in 0..extra_noise_vars {
            match schema[3 + i].scale {
                Scale::Nominal => {
                    let cats = 5 + (i % 4);
                    values.push(Value::Label(format!("n{}", rng.random_range(0..cats))));
                }
                Scale::Continuous => {
                    values.push(Value::Number(rng.random_range(-10.0..10.0f64)));
                }
            }
        }
        // Plant missingness in independent cells only.
        for v in values.iter_mut() {
            if rng.random_bool(missing_frac) {
                *v = Value::Missing;
            }
        }
        let perf: f64 = a_levels[a] + b_levels[b] + noise.sample(&mut rng);
        values.push(Value::Number(perf.max(0.05)));
        rows.push(ProjectRow::new(format!("p{p}"), values));
    }
    Dataset::new("id", schema, rows).unwrap()
}

/// Homogeneous projects: productivity is an affine function of size plus
/// small noise, with one irrelevant nominal variable.
pub fn homogeneous_fixture(seed: u64, n_projects: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let schema = vec![
        VariableSpec::new("size", Scale::Continuous, Role::Independent),
        VariableSpec::new("noise", Scale::Nominal, Role::Independent),
        VariableSpec::new("perf", Scale::Continuous, Role::Dependent),
    ];
    let noise = Normal::new(0.0, 0.01).unwrap();
    let mut rows = Vec::with_capacity(n_projects);
    for p in 0..n_projects {
        let size = rng.random_range(100.0..200.0f64);
        let perf = 0.5 + 0.005 * size + noise.sample(&mut rng);
        rows.push(ProjectRow::new(
            format!("p{p}"),
            vec![
                Value::Number((size * 100.0).round() / 100.0),
                Value::Label(format!("n{}", rng.random_range(0..3))),
                Value::Number(perf),
            ],
        ));
    }
    Dataset::new("id", schema, rows).unwrap()
}

/// Heterogeneous projects where an exact fraction lacks the size value and
/// every other cell is present.
pub fn missing_size_fixture(seed: u64, n_projects: usize, missing_frac: f64) -> Dataset {
    let base = heterogeneous_fixture(seed, n_projects, 0, 0.0);
    let size_col = base.column_index("size").unwrap();
    let n_missing = (n_projects as f64 * missing_frac).round() as usize;
    let mut order: Vec<usize> = (0..n_projects).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5126);
    order.shuffle(&mut rng);
    let blank: std::collections::HashSet<usize> = order.into_iter().take(n_missing).collect();
    let rows = base
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut values = r.values.clone();
            if blank.contains(&i) {
                values[size_col] = Value::Missing;
            }
            ProjectRow::new(r.id.clone(), values)
        })
        .collect();
    Dataset::new("id", base.variables().to_vec(), rows).unwrap()
}

/// Write a dataset plus its schema file into a directory and return the
/// paths.
pub fn write_fixture(
    dir: &std::path::Path,
    name: &str,
    d: &Dataset,
) -> (std::path::PathBuf, std::path::PathBuf) {
    let data = dir.join(format!("{name}.csv"));
    let schema = dir.join(format!("{name}_schema.csv"));
    std::fs::write(&data, d.to_csv()).unwrap();
    std::fs::write(&schema, osr_core::dataset::write_schema(d.variables())).unwrap();
    (data, schema)
}
