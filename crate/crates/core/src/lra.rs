//! Ordinary-least-squares baseline: simple linear regression of the dependent
//! variable on a single size measure.

use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// A fitted `y = slope*x + intercept` line. `excluded` counts training rows
/// skipped because the size or dependent value was missing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OlsModel {
    pub slope: f64,
    pub intercept: f64,
    pub n: usize,
    pub size_variable: String,
    pub excluded: usize,
}

impl OlsModel {
    /// Predict from a size value; a missing size yields no estimate, since
    /// the single predictor is gone.
    pub fn predict(&self, size: Option<f64>) -> Option<f64> {
        size.map(|x| self.slope * x + self.intercept)
    }

    pub fn dump_line(&self) -> String {
        use crate::dataset::format_number as fmt;
        format!(
            "y = {}·x + {} (n={})",
            fmt(self.slope),
            fmt(self.intercept),
            self.n
        )
    }
}

/// Least-squares fit: slope = cov(x,y)/var(x), intercept through the means.
pub fn fit_ols(points: &[(f64, f64)], size_variable: &str) -> Result<OlsModel> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            found: points.len(),
        });
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for &(x, y) in points {
        cov += (x - mean_x) * (y - mean_y);
        var += (x - mean_x) * (x - mean_x);
    }
    if var == 0.0 {
        return Err(Error::DegenerateRegressor);
    }
    let slope = cov / var;
    Ok(OlsModel {
        slope,
        intercept: mean_y - slope * mean_x,
        n: points.len(),
        size_variable: size_variable.to_string(),
        excluded: 0,
    })
}

/// Fit on a dataset's (size, dependent) pairs, silently excluding rows where
/// either is missing and recording the exclusion count.
pub fn fit_from_dataset(d: &Dataset, size_variable: &str) -> Result<OlsModel> {
    let size_col = d
        .column_index(size_variable)
        .ok_or_else(|| Error::UnknownVariable {
            name: size_variable.to_string(),
        })?;
    if d.variables()[size_col].scale != crate::dataset::Scale::Continuous {
        return Err(Error::NotContinuous {
            name: size_variable.to_string(),
        });
    }
    let dep_col = d.dependent_index();
    if size_col == dep_col {
        return Err(Error::InvalidParameter {
            msg: "size variable must differ from the dependent variable".to_string(),
        });
    }
    let points: Vec<(f64, f64)> = d
        .rows()
        .iter()
        .filter_map(|r| {
            Some((
                r.values[size_col].as_number()?,
                r.values[dep_col].as_number()?,
            ))
        })
        .collect();
    let excluded = d.rows().len() - points.len();
    let mut model = fit_ols(&points, size_variable)?;
    model.excluded = excluded;
    Ok(model)
}
