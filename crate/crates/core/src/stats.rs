//! Accuracy metrics, descriptive statistics, and the seeded bootstrap
//! two-sample test used by the set-reduction engine.

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// An (actual, estimate) pair in the units of the dependent variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictionPair {
    pub actual: f64,
    pub estimate: f64,
}

impl PredictionPair {
    pub fn new(actual: f64, estimate: f64) -> Self {
        Self { actual, estimate }
    }
}

/// Mean magnitude of relative error, mean squared deviation, and mean
/// absolute deviation over `n` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccuracyTriple {
    pub mmre: f64,
    pub msd: f64,
    pub mad: f64,
    pub n: usize,
}

/// mmre = mean(|a-e|/|a|), mad = mean(|a-e|), msd = mean((a-e)^2).
pub fn accuracy(pairs: &[PredictionPair]) -> Result<AccuracyTriple> {
    if pairs.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = pairs.len() as f64;
    let mut mmre = 0.0;
    let mut mad = 0.0;
    let mut msd = 0.0;
    for (i, p) in pairs.iter().enumerate() {
        if p.actual == 0.0 {
            return Err(Error::ZeroActual { index: i });
        }
        let dev = (p.actual - p.estimate).abs();
        mmre += dev / p.actual.abs();
        mad += dev;
        msd += dev * dev;
    }
    Ok(AccuracyTriple {
        mmre: mmre / n,
        msd: msd / n,
        mad: mad / n,
        n: pairs.len(),
    })
}

/// Five-number summary plus mean and population standard deviation.
/// Quartiles use linear interpolation of order statistics at p*(n-1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxSummary {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    pub sd: f64,
}

/// Interpolated order statistic of an ascending-sorted slice at probability
/// `p`: position p*(n-1), linear between neighbors.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Median via the same interpolation rule as the quartiles.
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, 0.5)
}

pub fn describe(values: &[f64]) -> Result<BoxSummary> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = mean(&sorted);
    let var = sorted.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / sorted.len() as f64;
    Ok(BoxSummary {
        n: sorted.len(),
        min: sorted[0],
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q3: quantile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
        mean: m,
        sd: var.sqrt(),
    })
}

/// Settings for the bootstrap difference test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapConfig {
    pub draws: usize,
    pub alpha: f64,
    pub seed: u64,
}

/// Default master seed; every run is reproducible unless overridden.
pub const DEFAULT_SEED: u64 = 42;

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            draws: 1000,
            alpha: 0.05,
            seed: DEFAULT_SEED,
        }
    }
}

impl BootstrapConfig {
    pub fn new(draws: usize, alpha: f64, seed: u64) -> Result<Self> {
        let cfg = Self { draws, alpha, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.draws < 1 {
            return Err(Error::InvalidParameter {
                msg: "bootstrap draws must be at least 1".to_string(),
            });
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter {
                msg: format!("alpha must lie in (0,1), got {}", self.alpha),
            });
        }
        Ok(())
    }
}

/// Result of the two-sample bootstrap test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapOutcome {
    pub p_value: f64,
    pub significant: bool,
}

/// Two-sided bootstrap test of "equal means". The observed statistic is
/// t = |mean(a) - mean(b)|. Both samples are centered at their own means
/// (rescaled by sqrt(n/(n-1)) so centering does not shrink their spread) and
/// pooled; each draw resamples group sizes |a| and |b| with replacement from
/// the pool and recomputes the statistic. The p-value uses add-one smoothing:
/// (#{statistic >= t} + 1) / (draws + 1), so p is never 0 and lies in
/// [1/(draws+1), 1]. The procedure is symmetric in its arguments and
/// deterministic for a given seed.
pub fn bootstrap_diff_test(a: &[f64], b: &[f64], cfg: &BootstrapConfig) -> Result<BootstrapOutcome> {
    cfg.validate()?;
    let found = a.len().min(b.len());
    if found < 2 {
        return Err(Error::SampleTooSmall { needed: 2, found });
    }
    let mean_a = mean(a);
    let mean_b = mean(b);
    let t = (mean_a - mean_b).abs();

    // Canonical pool: centered values, sorted; group sizes drawn smaller
    // first. Both make the result invariant under swapping a and b.
    let scale_a = (a.len() as f64 / (a.len() - 1) as f64).sqrt();
    let scale_b = (b.len() as f64 / (b.len() - 1) as f64).sqrt();
    let mut pool: Vec<f64> = Vec::with_capacity(a.len() + b.len());
    pool.extend(a.iter().map(|v| (v - mean_a) * scale_a));
    pool.extend(b.iter().map(|v| (v - mean_b) * scale_b));
    pool.sort_by(f64::total_cmp);
    let n1 = a.len().min(b.len());
    let n2 = a.len().max(b.len());

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let idx = Uniform::new(0, pool.len()).expect("pool is non-empty");
    let mut hits = 0usize;
    for _ in 0..cfg.draws {
        let mut s1 = 0.0;
        for _ in 0..n1 {
            s1 += pool[idx.sample(&mut rng)];
        }
        let mut s2 = 0.0;
        for _ in 0..n2 {
            s2 += pool[idx.sample(&mut rng)];
        }
        let stat = (s1 / n1 as f64 - s2 / n2 as f64).abs();
        if stat >= t {
            hits += 1;
        }
    }
    let p_value = (hits + 1) as f64 / (cfg.draws + 1) as f64;
    Ok(BootstrapOutcome {
        p_value,
        significant: p_value <= cfg.alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_hand_computed() {
        let pairs = [
            PredictionPair::new(100.0, 110.0),
            PredictionPair::new(200.0, 150.0),
        ];
        let t = accuracy(&pairs).unwrap();
        assert!((t.mmre - 0.175).abs() < 1e-12);
        assert!((t.mad - 30.0).abs() < 1e-12);
        assert!((t.msd - 1300.0).abs() < 1e-12);
        assert_eq!(t.n, 2);
    }

    #[test]
    fn accuracy_exact_estimates_are_zero() {
        let pairs = [
            PredictionPair::new(3.0, 3.0),
            PredictionPair::new(-2.0, -2.0),
        ];
        let t = accuracy(&pairs).unwrap();
        assert_eq!((t.mmre, t.msd, t.mad), (0.0, 0.0, 0.0));
    }

    #[test]
    fn accuracy_unit_deviation() {
        let t = accuracy(&[PredictionPair::new(1.0, 2.0)]).unwrap();
        assert_eq!((t.mmre, t.msd, t.mad), (1.0, 1.0, 1.0));
    }

    #[test]
    fn accuracy_errors() {
        assert!(matches!(accuracy(&[]).unwrap_err(), Error::EmptySample));
        let pairs = [PredictionPair::new(0.0, 1.0)];
        assert!(matches!(
            accuracy(&pairs).unwrap_err(),
            Error::ZeroActual { index: 0 }
        ));
    }

    #[test]
    fn describe_integral_positions() {
        let s = describe(&[5.0, 3.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(s.min, 1.0);
        assert_eq!(s.q1, 2.0);
        assert_eq!(s.median, 3.0);
        assert_eq!(s.q3, 4.0);
        assert_eq!(s.max, 5.0);
        assert_eq!(s.mean, 3.0);
    }

    #[test]
    fn describe_constant_data() {
        let s = describe(&[7.0, 7.0, 7.0]).unwrap();
        assert_eq!(s.min, 7.0);
        assert_eq!(s.median, 7.0);
        assert_eq!(s.max, 7.0);
        assert_eq!(s.sd, 0.0);
    }

    #[test]
    fn describe_echoes_extremes_exactly() {
        // Range fixture spanning 0.2868 to 2.0581.
        let values = [0.2868, 0.6743, 1.0, 1.253, 2.0581];
        let s = describe(&values).unwrap();
        assert_eq!(s.min, 0.2868);
        assert_eq!(s.max, 2.0581);
    }

    #[test]
    fn describe_empty_errors() {
        assert!(matches!(describe(&[]).unwrap_err(), Error::EmptySample));
    }

    #[test]
    fn bootstrap_identical_samples_give_p_one() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let out = bootstrap_diff_test(&a, &a, &BootstrapConfig::default()).unwrap();
        assert_eq!(out.p_value, 1.0);
        assert!(!out.significant);
    }

    #[test]
    fn bootstrap_separated_samples_significant() {
        let a: Vec<f64> = (1..=10).map(f64::from).collect();
        let b: Vec<f64> = (101..=110).map(f64::from).collect();
        let out = bootstrap_diff_test(&a, &b, &BootstrapConfig::default()).unwrap();
        assert!(out.significant, "p = {}", out.p_value);
        assert!(out.p_value <= 0.05);
    }

    #[test]
    fn bootstrap_zero_variance_samples() {
        let a = [5.0, 5.0, 5.0, 5.0];
        let out = bootstrap_diff_test(&a, &a, &BootstrapConfig::default()).unwrap();
        assert_eq!(out.p_value, 1.0);
    }

    #[test]
    fn bootstrap_too_small_sample_errors() {
        let err = bootstrap_diff_test(&[1.0], &[1.0, 2.0], &BootstrapConfig::default());
        assert!(matches!(
            err.unwrap_err(),
            Error::SampleTooSmall { needed: 2, found: 1 }
        ));
    }

    #[test]
    fn bootstrap_symmetric_and_deterministic() {
        let a = [1.0, 3.0, 2.0, 8.0, 4.0];
        let b = [2.0, 9.0, 4.0, 4.0, 5.0, 7.0, 1.0];
        let cfg = BootstrapConfig::default().with_seed(7);
        let ab = bootstrap_diff_test(&a, &b, &cfg).unwrap();
        let ba = bootstrap_diff_test(&b, &a, &cfg).unwrap();
        assert_eq!(ab, ba);
        let again = bootstrap_diff_test(&a, &b, &cfg).unwrap();
        assert_eq!(ab, again);
        assert!(ab.p_value >= 1.0 / 1001.0 && ab.p_value <= 1.0);
    }

    #[test]
    fn bootstrap_config_validation() {
        assert!(BootstrapConfig::new(0, 0.05, 1).is_err());
        assert!(BootstrapConfig::new(10, 0.0, 1).is_err());
        assert!(BootstrapConfig::new(10, 1.0, 1).is_err());
        assert!(BootstrapConfig::new(1, 0.5, 1).is_ok());
    }
}
