//! Run configuration: defaults, optional TOML config file, and command-line
//! overrides. Flags always win over the file; the file wins over defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::{CliError, CommonArgs};

/// Fully resolved configuration for one command invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data: PathBuf,
    pub schema: PathBuf,
    pub mapping: Option<PathBuf>,
    pub splits: Vec<PathBuf>,
    pub drop: Vec<String>,
    pub max_missing: f64,
    pub project_missing: f64,
    pub fence_outlier: f64,
    pub fence_extreme: f64,
    pub grid: Option<String>,
    pub folds: String,
    pub alpha: f64,
    pub draws: usize,
    pub seed: u64,
    pub size_var: Option<String>,
    pub out: PathBuf,
    pub lenient_splits: bool,
    pub allow_any_pairing: bool,
}

/// The TOML file schema; every key optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    data: Option<PathBuf>,
    schema: Option<PathBuf>,
    mapping: Option<PathBuf>,
    splits: Option<Vec<PathBuf>>,
    drop: Option<Vec<String>>,
    max_missing: Option<f64>,
    project_missing: Option<f64>,
    fence_outlier: Option<f64>,
    fence_extreme: Option<f64>,
    grid: Option<String>,
    folds: Option<String>,
    alpha: Option<f64>,
    draws: Option<usize>,
    seed: Option<u64>,
    size_var: Option<String>,
    out: Option<PathBuf>,
    lenient_splits: Option<bool>,
    allow_any_pairing: Option<bool>,
}

impl RunConfig {
    /// Merge defaults, the optional config file, and command-line flags.
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => {
                let text = read_text(path)?;
                toml::from_str::<FileConfig>(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let data = args
            .data
            .clone()
            .or(file.data)
            .ok_or_else(|| CliError::Config("no dataset given (--data or config `data`)".into()))?;
        let schema = args
            .schema
            .clone()
            .or(file.schema)
            .ok_or_else(|| CliError::Config("no schema given (--schema or config `schema`)".into()))?;
        let splits = if args.splits.is_empty() {
            file.splits.unwrap_or_default()
        } else {
            args.splits.clone()
        };
        let drop = if args.drop.is_empty() {
            file.drop.unwrap_or_default()
        } else {
            args.drop.clone()
        };
        Ok(Self {
            data,
            schema,
            mapping: args.mapping.clone().or(file.mapping),
            splits,
            drop,
            max_missing: args.max_missing.or(file.max_missing).unwrap_or(0.9),
            project_missing: args
                .project_missing
                .or(file.project_missing)
                .unwrap_or(0.6),
            fence_outlier: file.fence_outlier.unwrap_or(1.5),
            fence_extreme: file.fence_extreme.unwrap_or(3.0),
            grid: args.grid.clone().or(file.grid),
            folds: args
                .folds
                .clone()
                .or(file.folds)
                .unwrap_or_else(|| "loocv".to_string()),
            alpha: args.alpha.or(file.alpha).unwrap_or(0.05),
            draws: args.draws.or(file.draws).unwrap_or(1000),
            seed: args.seed.or(file.seed).unwrap_or(osr_core::stats::DEFAULT_SEED),
            size_var: args.size_var.clone().or(file.size_var),
            out: args
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("osr-out")),
            lenient_splits: args.lenient_splits || file.lenient_splits.unwrap_or(false),
            allow_any_pairing: args.allow_any_pairing || file.allow_any_pairing.unwrap_or(false),
        })
    }
}

/// Parse a `--folds` value: `loocv` or `k:N`.
pub fn parse_fold_strategy(spec: &str) -> Result<osr_core::evaluation::FoldStrategy, CliError> {
    let spec = spec.trim();
    if spec == "loocv" {
        return Ok(osr_core::evaluation::FoldStrategy::Loocv);
    }
    if let Some(k) = spec.strip_prefix("k:") {
        let k: usize = k
            .parse()
            .map_err(|_| CliError::Config(format!("invalid fold count in {spec:?}")))?;
        return Ok(osr_core::evaluation::FoldStrategy::RandomK(k));
    }
    Err(CliError::Config(format!(
        "expected `loocv` or `k:N` for --folds, got {spec:?}"
    )))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> CommonArgs {
        CommonArgs {
            data: Some(PathBuf::from("d.csv")),
            schema: Some(PathBuf::from("s.csv")),
            ..Default::default()
        }
    }

    #[test]
    fn defaults_applied() {
        let cfg = RunConfig::resolve(&args()).unwrap();
        assert_eq!(cfg.max_missing, 0.9);
        assert_eq!(cfg.project_missing, 0.6);
        assert_eq!(cfg.alpha, 0.05);
        assert_eq!(cfg.draws, 1000);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.folds, "loocv");
        assert_eq!(cfg.fence_outlier, 1.5);
        assert_eq!(cfg.fence_extreme, 3.0);
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, "seed = 7\nalpha = 0.01\ndata = \"file.csv\"\n").unwrap();
        let mut a = args();
        a.config = Some(path);
        a.seed = Some(99);
        let cfg = RunConfig::resolve(&a).unwrap();
        assert_eq!(cfg.seed, 99); // flag wins
        assert_eq!(cfg.alpha, 0.01); // file wins over default
        assert_eq!(cfg.data, PathBuf::from("d.csv")); // flag wins
    }

    #[test]
    fn unknown_config_key_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, "sead = 7\n").unwrap();
        let mut a = args();
        a.config = Some(path);
        assert!(matches!(
            RunConfig::resolve(&a).unwrap_err(),
            CliError::Config(_)
        ));
    }

    #[test]
    fn fold_spec_parsing() {
        use osr_core::evaluation::FoldStrategy;
        assert_eq!(parse_fold_strategy("loocv").unwrap(), FoldStrategy::Loocv);
        assert_eq!(parse_fold_strategy("k:5").unwrap(), FoldStrategy::RandomK(5));
        assert!(parse_fold_strategy("k:x").is_err());
        assert!(parse_fold_strategy("bogus").is_err());
    }
}
