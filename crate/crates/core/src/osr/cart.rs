//! Regression-tree discretization of continuous variables.
//!
//! A fitted [`Discretizer`] carves the real line into half-open bins
//! (-inf,t1], (t1,t2], ..., (tk,inf) so that continuous drivers can feed the
//! same predicate machinery as nominal ones. Thresholds are chosen by
//! recursive variance-reducing splits in the style of regression trees.

use serde::Serialize;

use crate::dataset::format_number;
use crate::error::{Error, Result};

/// Bin boundaries for one continuous variable. Thresholds are strictly
/// increasing; the k thresholds induce k+1 bins partitioning the real line,
/// and every number falls in exactly one bin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discretizer {
    variable: String,
    thresholds: Vec<f64>,
}

impl Discretizer {
    pub fn new(variable: impl Into<String>, thresholds: Vec<f64>) -> Result<Self> {
        for pair in thresholds.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(Error::InvalidParameter {
                    msg: "discretizer thresholds must be strictly increasing".to_string(),
                });
            }
        }
        if thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter {
                msg: "discretizer thresholds must be finite".to_string(),
            });
        }
        Ok(Self {
            variable: variable.into(),
            thresholds,
        })
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn bin_count(&self) -> usize {
        self.thresholds.len() + 1
    }

    /// Index of the bin containing `x`: the number of thresholds strictly
    /// below it, so bin i is (t_i-1, t_i] with open lower and closed upper.
    pub fn bin_index(&self, x: f64) -> usize {
        self.thresholds.partition_point(|&t| t < x)
    }

    /// Lower (exclusive) and upper (inclusive) bound of a bin; `None` marks
    /// an unbounded side.
    pub fn bin_bounds(&self, bin: usize) -> (Option<f64>, Option<f64>) {
        debug_assert!(bin < self.bin_count());
        let lower = if bin == 0 {
            None
        } else {
            Some(self.thresholds[bin - 1])
        };
        let upper = self.thresholds.get(bin).copied();
        (lower, upper)
    }

    /// Interval label for a bin, e.g. `(-inf,6.5]` or `(6.5,inf)`.
    pub fn bin_label(&self, bin: usize) -> String {
        bin_label_for_bounds(self.bin_bounds(bin))
    }
}

/// Render interval bounds as the bin label used in predicates and reports.
pub fn bin_label_for_bounds(bounds: (Option<f64>, Option<f64>)) -> String {
    match bounds {
        (None, None) => "(-inf,inf)".to_string(),
        (None, Some(u)) => format!("(-inf,{}]", format_number(u)),
        (Some(l), None) => format!("({},inf)", format_number(l)),
        (Some(l), Some(u)) => format!("({},{}]", format_number(l), format_number(u)),
    }
}

/// Fit bin thresholds for one variable: repeatedly apply the admissible split
/// (midpoint between adjacent distinct sorted x values, both sides holding at
/// least `min_leaf` points) with the largest reduction in the within-partition
/// sum of squared deviations of `y`, until `max_bins` bins exist or no split
/// improves. Missing x values are ignored during fitting. Ties prefer the
/// leftmost segment, then the smallest threshold.
pub fn discretize_cart(
    variable: &str,
    x: &[Option<f64>],
    y: &[f64],
    min_leaf: usize,
    max_bins: usize,
) -> Result<Discretizer> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter {
            msg: "x and y must be aligned".to_string(),
        });
    }
    if min_leaf < 1 || max_bins < 2 {
        return Err(Error::InvalidParameter {
            msg: "need min_leaf >= 1 and max_bins >= 2".to_string(),
        });
    }
    let mut pairs: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter_map(|(xv, &yv)| xv.map(|xv| (xv, yv)))
        .collect();
    if pairs.len() < 2 * min_leaf {
        return Err(Error::TooFewValues {
            variable: variable.to_string(),
            needed: 2 * min_leaf,
            found: pairs.len(),
        });
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let n = pairs.len();
    let mut prefix_sum = vec![0.0; n + 1];
    let mut prefix_sumsq = vec![0.0; n + 1];
    for (i, &(_, yv)) in pairs.iter().enumerate() {
        prefix_sum[i + 1] = prefix_sum[i] + yv;
        prefix_sumsq[i + 1] = prefix_sumsq[i] + yv * yv;
    }
    let sse = |start: usize, end: usize| -> f64 {
        let len = (end - start) as f64;
        let sum = prefix_sum[end] - prefix_sum[start];
        let sumsq = prefix_sumsq[end] - prefix_sumsq[start];
        (sumsq - sum * sum / len).max(0.0)
    };
    let constant = |start: usize, end: usize| -> bool {
        pairs[start..end].windows(2).all(|w| w[0].1 == w[1].1)
    };

    // Best admissible split of [start,end): (reduction, position, threshold).
    let best_split = |start: usize, end: usize| -> Option<(f64, usize, f64)> {
        if constant(start, end) {
            return None;
        }
        let base = sse(start, end);
        let mut best: Option<(f64, usize, f64)> = None;
        for pos in start + 1..end {
            if pairs[pos - 1].0 == pairs[pos].0 {
                continue;
            }
            if pos - start < min_leaf || end - pos < min_leaf {
                continue;
            }
            let reduction = base - sse(start, pos) - sse(pos, end);
            if reduction <= 0.0 {
                continue;
            }
            if best.is_none_or(|(r, _, _)| reduction > r) {
                best = Some((reduction, pos, (pairs[pos - 1].0 + pairs[pos].0) / 2.0));
            }
        }
        best
    };

    let mut segments: Vec<(usize, usize)> = vec![(0, n)];
    let mut thresholds = Vec::new();
    while segments.len() < max_bins {
        let mut chosen: Option<(f64, usize, usize, f64)> = None;
        for (i, &(start, end)) in segments.iter().enumerate() {
            if let Some((reduction, pos, threshold)) = best_split(start, end) {
                if chosen.is_none_or(|(r, ..)| reduction > r) {
                    chosen = Some((reduction, i, pos, threshold));
                }
            }
        }
        match chosen {
            None => break,
            Some((_, i, pos, threshold)) => {
                let (start, end) = segments[i];
                segments.splice(i..=i, [(start, pos), (pos, end)]);
                thresholds.push(threshold);
            }
        }
    }
    thresholds.sort_by(f64::total_cmp);
    Discretizer::new(variable, thresholds)
}
