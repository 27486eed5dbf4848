//! Orchestration: configuration, staged enumeration with an on-disk cache,
//! the claim suites and their report bundle.

mod claims;
mod config;
mod inspect;
mod report;

use std::collections::BTreeSet;
use std::path::PathBuf;

use crate::bits::BitString;
use crate::complexity::{halting_condition, m_depth, Catalog, FUNCTION_DOMAIN_MAX};
use crate::enumeration::{
    enumerate_batch, load, load_plain, store, store_plain, DbKey, HaltingDB, PlainTable, HARD_CAPS,
};
use crate::error::{LabError, Result};
use crate::machine::MACHINE_VERSION;
use crate::statistics::{construct_p_prime, ModelSpace};

pub use claims::{claim_ids, ClaimResult, ClaimStatus, CLAIMS};
pub use config::{parse_range, Format, LabConfig};
pub use inspect::cmd_inspect;
pub use report::{cmd_report, ReportBundle};

/// Where missing databases come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    /// Enumerate and write to the cache; reuse cached files.
    Enumerate,
    /// Read the cache only; a missing file is an error.
    Cache,
}

/// A configured run: the catalog grows stage by stage.
pub struct Lab {
    pub config: LabConfig,
    pub catalog: Catalog,
    source: Source,
    pool: rayon::ThreadPool,
    /// Keys enumerated (not loaded) during this run.
    pub enumerated: usize,
    pub loaded: usize,
}

impl Lab {
    pub fn open(config: LabConfig, source: Source) -> Result<Self> {
        config.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
        let mut catalog = Catalog::new(config.budgets());
        catalog.depth_cap = Some(config.plain_cap);
        Ok(Self {
            config,
            catalog,
            source,
            pool,
            enumerated: 0,
            loaded: 0,
        })
    }

    pub fn db_path(&self, key: &DbKey) -> PathBuf {
        let b = self.config.budgets();
        let cond = if key.condition.is_empty() {
            "e".to_string()
        } else {
            key.condition.to_string()
        };
        self.config.cache_dir.join(format!(
            "hdb-{MACHINE_VERSION}-n{}-c{cond}-t{}-l{}.txt",
            key.n, b.max_steps, b.max_program_bits
        ))
    }

    pub fn plain_path(&self, n: u32) -> PathBuf {
        let b = self.config.budgets();
        self.config.cache_dir.join(format!(
            "plain-{MACHINE_VERSION}-n{n}-t{}-l{}.txt",
            b.max_steps, b.max_program_bits
        ))
    }

    fn cached(&self, key: &DbKey) -> bool {
        self.db_path(key).exists() && (!key.condition.is_empty() || self.plain_path(key.n).exists())
    }

    fn load_one(&mut self, key: &DbKey) -> Result<()> {
        let db = load(&self.db_path(key))?;
        if db.key() != key || db.budgets() != self.config.budgets() {
            return Err(LabError::Config(format!(
                "cache file {} holds {} at other budgets",
                self.db_path(key).display(),
                db.key()
            )));
        }
        let plain = if key.condition.is_empty() {
            Some(load_plain(&self.plain_path(key.n))?)
        } else {
            None
        };
        self.catalog.insert(db, plain);
        self.loaded += 1;
        Ok(())
    }

    fn store_one(&self, db: &HaltingDB, plain: Option<&PlainTable>) -> Result<()> {
        store(db, &self.db_path(db.key()))?;
        if let Some(p) = plain {
            store_plain(p, &self.plain_path(db.n()))?;
        }
        Ok(())
    }

    /// Brings every key into the catalog, in chunks sharing one search.
    pub fn ensure(&mut self, keys: impl IntoIterator<Item = DbKey>) -> Result<()> {
        let missing: Vec<DbKey> = keys
            .into_iter()
            .filter(|k| !self.catalog.contains(k))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut to_enumerate = Vec::new();
        for key in missing {
            if self.cached(&key) {
                self.load_one(&key)?;
            } else if self.source == Source::Cache {
                return Err(LabError::MissingDb {
                    n: key.n,
                    condition: key.condition.to_field(),
                });
            } else {
                to_enumerate.push(key);
            }
        }
        let budgets = self.config.budgets();
        for chunk in to_enumerate.chunks(self.config.chunk) {
            let reqs: Vec<(DbKey, bool)> = chunk
                .iter()
                .map(|k| (k.clone(), k.condition.is_empty()))
                .collect();
            let out = self
                .pool
                .install(|| enumerate_batch(&reqs, budgets, &HARD_CAPS))?;
            for (db, plain) in out {
                self.store_one(&db, plain.as_ref())?;
                self.catalog.insert(db, plain);
                self.enumerated += 1;
            }
        }
        Ok(())
    }

    /// Unconditioned databases, integer conditions `0..=plain_cap`, short
    /// data words for function models and the halting-sequence prefixes.
    pub fn stage_a(&self) -> Vec<DbKey> {
        let c = &self.config;
        let mut keys = Vec::new();
        for n in c.lengths() {
            keys.push(DbKey::plain(n));
            keys.extend((1..=c.plain_cap as u64).map(|k| DbKey::with_int(n, k)));
            keys.extend(
                (0..=FUNCTION_DOMAIN_MAX)
                    .flat_map(BitString::all_of_len)
                    .map(|d| DbKey::new(n, d)),
            );
            keys.extend((0..=c.halting_levels).map(|j| DbKey::new(n, halting_condition(n, c.budgets(), j))));
        }
        keys
    }

    /// Conditions that depend on stage A results: Omega prefixes at each
    /// `k_x`, shortest witnesses (pairwise additivity), every plain set
    /// program and every `P'_x` program (typicality).
    pub fn stage_b(&self) -> Result<Vec<DbKey>> {
        let c = &self.config;
        let mut keys = Vec::new();
        for n in c.lengths() {
            let view = self.catalog.given(n, &BitString::new())?;
            let domain = self.catalog.domain(n)?;
            for x in BitString::all_of_len(n as usize) {
                if let Some(k) = m_depth(view, &x, c.depth_slack) {
                    keys.push(DbKey::new(n, domain.omega_prefix(k as usize)));
                }
                if n == c.probe_n {
                    if let Some(w) = view.table.witness(&x) {
                        keys.push(DbKey::new(n, w.clone()));
                    }
                }
                if let Some(p) = construct_p_prime(&self.catalog, &x, c.depth_slack)? {
                    keys.push(DbKey::new(n, p.model.program));
                }
            }
            let space = ModelSpace::build(&self.catalog, n, c.width(n))?;
            keys.extend(space.plain_sets.iter().map(|m| DbKey::new(n, m.program.clone())));
        }
        Ok(keys)
    }

    /// Runs both stages.
    pub fn prepare(&mut self) -> Result<()> {
        let a = self.stage_a();
        self.ensure(a)?;
        let b = self.stage_b()?;
        self.ensure(b)
    }
}

/// Enumerates (or reuses) every database the report needs. Returns the
/// prepared lab.
pub fn cmd_enumerate(config: LabConfig) -> Result<Lab> {
    let mut lab = Lab::open(config, Source::Enumerate)?;
    lab.prepare()?;
    Ok(lab)
}
