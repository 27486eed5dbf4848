use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::enumeration::{Budgets, HARD_CAPS};
use crate::error::{LabError, Result};
use crate::machine::MACHINE_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

impl std::str::FromStr for Format {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(LabError::Config(format!("unknown format {other:?}"))),
        }
    }
}

/// Every knob of a lab run. Missing keys in a config file take the defaults.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabConfig {
    pub machine: String,
    pub max_steps: u64,
    pub max_program_bits: u32,
    /// Largest integer condition `k` used by the busy-beaver depth scans.
    pub plain_cap: u32,
    /// Largest `k` in the busy-beaver time probe.
    pub bb_cap: u32,
    pub n_min: u32,
    pub n_max: u32,
    pub slack_min: u32,
    pub slack_max: u32,
    /// Semimeasure tables use `n + width_extra` bits per entry.
    pub width_extra: u32,
    /// Slack inside `k_x`, `k'_x` and `P'_x`.
    pub depth_slack: u32,
    /// Slack for model searches and the weak-sufficiency threshold.
    pub model_slack: u32,
    pub fixpoint_slack: u32,
    pub tetration_max_iter: usize,
    /// Smallest n for the set-model depth bound.
    pub depth_bound_n_min: u32,
    /// String length for pairwise additivity, tetration and structure rows.
    pub probe_n: u32,
    /// Halting-sequence conditions use prefixes of length `2^j`, `j <= halting_levels`.
    pub halting_levels: u32,
    pub random_tables: usize,
    pub seed: u64,
    /// Databases enumerated per shared search.
    pub chunk: usize,
    pub cache_dir: PathBuf,
    pub workers: usize,
    pub format: Format,
}

impl Default for LabConfig {
    fn default() -> Self {
        Self {
            machine: MACHINE_VERSION.to_string(),
            max_steps: 4096,
            max_program_bits: 24,
            plain_cap: 24,
            bb_cap: 12,
            n_min: 2,
            n_max: 6,
            slack_min: 0,
            slack_max: 8,
            width_extra: 4,
            depth_slack: 0,
            model_slack: 3,
            fixpoint_slack: 0,
            tetration_max_iter: 8,
            depth_bound_n_min: 4,
            probe_n: 4,
            halting_levels: 5,
            random_tables: 10_000,
            seed: 0x5eed,
            chunk: 12,
            cache_dir: PathBuf::from("aitlab-cache"),
            workers: 1,
            format: Format::Json,
        }
    }
}

/// The fields that determine results; hashed into every report.
#[derive(Serialize)]
struct Hashed<'a> {
    machine: &'a str,
    max_steps: u64,
    max_program_bits: u32,
    plain_cap: u32,
    bb_cap: u32,
    n_min: u32,
    n_max: u32,
    slack_min: u32,
    slack_max: u32,
    width_extra: u32,
    depth_slack: u32,
    model_slack: u32,
    fixpoint_slack: u32,
    tetration_max_iter: usize,
    depth_bound_n_min: u32,
    probe_n: u32,
    halting_levels: u32,
    random_tables: usize,
    seed: u64,
}

impl LabConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
    }

    pub fn budgets(&self) -> Budgets {
        Budgets::new(self.max_steps, self.max_program_bits)
    }

    pub fn width(&self, n: u32) -> u32 {
        n + self.width_extra
    }

    pub fn lengths(&self) -> std::ops::RangeInclusive<u32> {
        self.n_min..=self.n_max
    }

    pub fn slacks(&self) -> std::ops::RangeInclusive<u32> {
        self.slack_min..=self.slack_max
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::Config(msg));
        if self.machine != MACHINE_VERSION {
            return Err(LabError::VersionMismatch {
                expected: MACHINE_VERSION.into(),
                found: self.machine.clone(),
            });
        }
        self.budgets().check(&HARD_CAPS)?;
        if self.n_min > self.n_max || self.n_max > 8 {
            return bad(format!(
                "n range {}..={} must be ordered and at most 8",
                self.n_min, self.n_max
            ));
        }
        if self.slack_min > self.slack_max {
            return bad(format!(
                "slack range {}..={} is empty",
                self.slack_min, self.slack_max
            ));
        }
        if self.plain_cap > self.max_program_bits || self.bb_cap > self.max_program_bits {
            return bad(format!(
                "plain cap {} and bb cap {} must not exceed the program budget {}",
                self.plain_cap, self.bb_cap, self.max_program_bits
            ));
        }
        if self.width_extra == 0 || self.chunk == 0 || self.workers == 0 {
            return bad("width_extra, chunk and workers must be positive".into());
        }
        if self.halting_levels > 16 {
            return bad(format!("halting_levels {} is above 16", self.halting_levels));
        }
        Ok(())
    }

    /// Canonical JSON of the result-determining fields.
    pub fn canonical(&self) -> String {
        serde_json::to_string(&Hashed {
            machine: &self.machine,
            max_steps: self.max_steps,
            max_program_bits: self.max_program_bits,
            plain_cap: self.plain_cap,
            bb_cap: self.bb_cap,
            n_min: self.n_min,
            n_max: self.n_max,
            slack_min: self.slack_min,
            slack_max: self.slack_max,
            width_extra: self.width_extra,
            depth_slack: self.depth_slack,
            model_slack: self.model_slack,
            fixpoint_slack: self.fixpoint_slack,
            tetration_max_iter: self.tetration_max_iter,
            depth_bound_n_min: self.depth_bound_n_min,
            probe_n: self.probe_n,
            halting_levels: self.halting_levels,
            random_tables: self.random_tables,
            seed: self.seed,
        })
        .expect("plain data serializes")
    }

    /// sha256 of [`LabConfig::canonical`]. Worker count, cache directory and
    /// output format do not enter.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

/// Parses `a..b`, `a..=b`, `a-b` or a single number into an inclusive range.
pub fn parse_range(s: &str) -> Result<(u32, u32)> {
    let num = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|_| LabError::Config(format!("bad range {s:?}")))
    };
    if let Some((a, b)) = s.split_once("..=") {
        return Ok((num(a)?, num(b)?));
    }
    if let Some((a, b)) = s.split_once("..") {
        let b = num(b)?;
        return Ok((
            num(a)?,
            b.checked_sub(1)
                .ok_or_else(|| LabError::Config(format!("empty range {s:?}")))?,
        ));
    }
    if let Some((a, b)) = s.split_once('-') {
        return Ok((num(a)?, num(b)?));
    }
    let v = num(s)?;
    Ok((v, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_hash_ignores_workers() {
        let a = LabConfig::default();
        a.validate().unwrap();
        let b = LabConfig {
            workers: 8,
            cache_dir: "elsewhere".into(),
            ..a.clone()
        };
        assert_eq!(a.hash(), b.hash());
        let c = LabConfig {
            max_steps: 1024,
            ..a.clone()
        };
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn partial_file_takes_defaults() {
        let c: LabConfig = serde_json::from_str(r#"{"n_max": 4}"#).unwrap();
        assert_eq!(c.n_max, 4);
        assert_eq!(c.max_steps, 4096);
        assert!(serde_json::from_str::<LabConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..=6").unwrap(), (2, 6));
        assert_eq!(parse_range("2..6").unwrap(), (2, 5));
        assert_eq!(parse_range("0-8").unwrap(), (0, 8));
        assert_eq!(parse_range("4").unwrap(), (4, 4));
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn invalid_configs() {
        let bad = LabConfig {
            max_program_bits: 25,
            ..LabConfig::default()
        };
        assert!(matches!(bad.validate(), Err(LabError::Config(_))));
        let bad = LabConfig {
            n_min: 5,
            n_max: 3,
            ..LabConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
