//! Run configuration shared by the CLI: tolerance, worker count,
//! output format, and search budgets. Values come from (highest
//! precedence first) command-line flags, a TOML config file, the
//! CENTRALIZER_LAB_WORKERS environment variable, then defaults.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Deserialize;

use crate::interval::parse_tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<OutputFormat> {
        match s {
            "text" => Some(OutputFormat::Text),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

/// Budgets for the bounded searches.
#[derive(Clone, Debug)]
pub struct Limits {
    pub box_bound: u32,
    pub max_exp: u32,
    pub qmax: u64,
    pub radius: usize,
    /// orbit tables larger than this are truncated in the output
    pub table_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            box_bound: 3,
            max_exp: 20,
            qmax: 10,
            radius: 1,
            table_cap: 1000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub tol: BigRational,
    pub workers: Option<usize>,
    pub output: OutputFormat,
    pub limits: Limits,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            // 1e-9
            tol: BigRational::new(BigInt::from(1), BigInt::from(1_000_000_000u64)),
            workers: None,
            output: OutputFormat::Text,
            limits: Limits::default(),
        }
    }
}

/// TOML config file shape; every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub tol: Option<String>,
    pub workers: Option<usize>,
    pub output: Option<String>,
    #[serde(default)]
    pub limits: LimitsFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsFile {
    pub box_bound: Option<u32>,
    pub max_exp: Option<u32>,
    pub qmax: Option<u64>,
    pub radius: Option<usize>,
    pub table_cap: Option<usize>,
}

impl RunConfig {
    /// Fold a config file underneath the current settings (used
    /// before applying command-line flags, which win).
    pub fn merge_file(&mut self, file: &ConfigFile) -> Result<(), String> {
        if let Some(t) = &file.tol {
            self.tol = parse_positive_tol(t)?;
        }
        if let Some(w) = file.workers {
            if w == 0 {
                return Err("workers must be positive".into());
            }
            self.workers = Some(w);
        }
        if let Some(o) = &file.output {
            self.output =
                OutputFormat::parse(o).ok_or_else(|| format!("unknown output format '{}'", o))?;
        }
        let l = &file.limits;
        if let Some(v) = l.box_bound {
            self.limits.box_bound = v;
        }
        if let Some(v) = l.max_exp {
            self.limits.max_exp = v;
        }
        if let Some(v) = l.qmax {
            self.limits.qmax = v;
        }
        if let Some(v) = l.radius {
            self.limits.radius = v;
        }
        if let Some(v) = l.table_cap {
            self.limits.table_cap = v;
        }
        if self.limits.box_bound == 0 || self.limits.max_exp == 0 || self.limits.qmax == 0 {
            return Err("limits must be positive".into());
        }
        Ok(())
    }

    /// Worker count with the environment fallback applied.
    pub fn effective_workers(&self) -> Option<usize> {
        self.workers.or_else(|| {
            std::env::var("CENTRALIZER_LAB_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
                .filter(|&w: &usize| w > 0)
        })
    }
}

pub fn parse_positive_tol(s: &str) -> Result<BigRational, String> {
    let t = parse_tolerance(s).ok_or_else(|| format!("unparseable tolerance '{}'", s))?;
    if !t.is_positive() {
        return Err("tolerance must be positive".into());
    }
    Ok(t)
}

pub fn load_config_file(path: &std::path::Path) -> Result<ConfigFile, String> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {}", path.display(), e))?;
    toml::from_str(&raw).map_err(|e| format!("invalid config {}: {}", path.display(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!(
            c.tol,
            BigRational::new(BigInt::from(1), BigInt::from(1_000_000_000u64))
        );
        assert_eq!(c.output, OutputFormat::Text);
        assert_eq!(c.limits.box_bound, 3);
    }

    #[test]
    fn merge_toml() {
        let file: ConfigFile = toml::from_str(
            r#"
                tol = "1e-6"
                workers = 2
                output = "json"
                [limits]
                box_bound = 5
                qmax = 12
            "#,
        )
        .unwrap();
        let mut c = RunConfig::default();
        c.merge_file(&file).unwrap();
        assert_eq!(c.tol, BigRational::new(1.into(), 1_000_000.into()));
        assert_eq!(c.workers, Some(2));
        assert_eq!(c.output, OutputFormat::Json);
        assert_eq!(c.limits.box_bound, 5);
        assert_eq!(c.limits.qmax, 12);
        assert_eq!(c.limits.max_exp, 20);
    }

    #[test]
    fn rejects_bad_values() {
        let file: ConfigFile = toml::from_str(r#"tol = "zero""#).unwrap();
        assert!(RunConfig::default().merge_file(&file).is_err());
        let file: ConfigFile = toml::from_str("workers = 0").unwrap();
        assert!(RunConfig::default().merge_file(&file).is_err());
        assert!(toml::from_str::<ConfigFile>("unknown_key = 1").is_err());
    }
}
