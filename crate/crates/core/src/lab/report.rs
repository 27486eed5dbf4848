use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::lab::claims::{Ctx, CLAIMS};
use crate::lab::{ClaimResult, ClaimStatus, Lab, LabConfig, Source};

/// Everything one `report` run produces. Serialization is byte-stable for a
/// given configuration hash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportBundle {
    pub config_hash: String,
    pub config: serde_json::Value,
    pub claims: BTreeMap<String, ClaimResult>,
    /// Claim id → `pass c=…`, `FAIL`, `vacuous` or `info`.
    pub summary: BTreeMap<String, String>,
}

impl ReportBundle {
    pub fn empty(config: &LabConfig) -> Result<Self> {
        Ok(Self {
            config_hash: config.hash(),
            config: serde_json::from_str(&config.canonical())?,
            claims: BTreeMap::new(),
            summary: BTreeMap::new(),
        })
    }

    /// Runs `ids` (in the fixed claim order) on a prepared lab.
    pub fn build(lab: &Lab, ids: &[String]) -> Result<Self> {
        check_ids(ids)?;
        let mut bundle = Self::empty(&lab.config)?;
        if ids.is_empty() {
            return Ok(bundle);
        }
        let ctx = Ctx::new(lab)?;
        for (id, _, _) in CLAIMS.iter().filter(|(id, _, _)| ids.iter().any(|i| i == id)) {
            let r = ctx.run(id)?;
            bundle.summary.insert(id.to_string(), r.summary());
            bundle.claims.insert(id.to_string(), r);
        }
        Ok(bundle)
    }

    pub fn any_fail(&self) -> bool {
        self.claims.values().any(|c| c.status == ClaimStatus::Fail)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle serializes");
        s.push('\n');
        s
    }

    /// One block per claim: `#` metadata lines, a header row, then data rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# config_hash,{}", self.config_hash).unwrap();
        for (id, c) in &self.claims {
            writeln!(s).unwrap();
            writeln!(s, "# claim,{id}").unwrap();
            writeln!(s, "# anchor,{}", csv_field(&c.anchor)).unwrap();
            writeln!(s, "# primary,{}", c.primary).unwrap();
            writeln!(s, "# summary,{}", csv_field(&c.summary())).unwrap();
            for note in &c.notes {
                writeln!(s, "# note,{}", csv_field(note)).unwrap();
            }
            writeln!(s, "{}", csv_row(&c.columns)).unwrap();
            for row in &c.rows {
                writeln!(s, "{}", csv_row(row)).unwrap();
            }
        }
        s
    }

    /// `<status> <id>` lines, one per claim.
    pub fn summary_lines(&self) -> Vec<String> {
        self.claims
            .values()
            .map(|c| {
                format!(
                    "{:<12} {}{}",
                    c.summary(),
                    c.id,
                    if c.primary { "" } else { " (probe)" }
                )
            })
            .collect()
    }
}

fn csv_field(f: &str) -> String {
    if f.contains([',', '"', '\n']) {
        format!("\"{}\"", f.replace('"', "\"\""))
    } else {
        f.to_string()
    }
}

fn csv_row(fields: &[String]) -> String {
    fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",")
}

fn check_ids(ids: &[String]) -> Result<()> {
    for id in ids {
        if !CLAIMS.iter().any(|(c, _, _)| c == id) {
            return Err(LabError::Config(format!("unknown claim id {id:?}")));
        }
    }
    Ok(())
}

/// Runs the selected claims. An empty selection yields the hash-only bundle
/// without touching the cache.
pub fn cmd_report(config: LabConfig, ids: &[String], source: Source) -> Result<ReportBundle> {
    check_ids(ids)?;
    if ids.is_empty() {
        config.validate()?;
        return ReportBundle::empty(&config);
    }
    let mut lab = Lab::open(config, source)?;
    lab.prepare()?;
    ReportBundle::build(&lab, ids)
}
