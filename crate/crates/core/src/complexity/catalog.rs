use std::collections::{BTreeMap, BTreeSet};

use crate::bits::BitString;
use crate::complexity::{Complexity, ComplexityTable};
use crate::dyadic::Dyadic;
use crate::enumeration::{
    enumerate_batch, t_k_from_checkpoints, Budgets, DbKey, HaltingDB, PlainTable, HARD_CAPS,
};
use crate::error::{LabError, Result};

/// Longest condition for which a view keeps the program → output map of
/// n-bit outputs; function models read their data words from it.
pub const FUNCTION_DOMAIN_MAX: usize = 3;

/// What the analyses need from one database once its records are dropped.
#[derive(Debug, Clone)]
pub struct DbView {
    pub key: DbKey,
    pub budgets: Budgets,
    pub records: usize,
    pub kraft: Dyadic,
    pub prefix_free: bool,
    /// `(t, Ω^n_t)` wherever the mass grows, from `t = 0`.
    pub omega: Vec<(u64, Dyadic)>,
    pub table: ComplexityTable,
    /// Program → output for every record with an n-bit output; kept only
    /// for short conditions.
    pub nbit_programs: Option<BTreeMap<BitString, BitString>>,
}

impl DbView {
    pub fn from_db(db: &HaltingDB) -> Self {
        let n = db.n() as usize;
        let nbit_programs = (db.condition().len() <= FUNCTION_DOMAIN_MAX).then(|| {
            db.records()
                .iter()
                .filter(|r| r.output.len() == n)
                .map(|r| (r.program.clone(), r.output.clone()))
                .collect()
        });
        Self {
            key: db.key().clone(),
            budgets: db.budgets(),
            records: db.len(),
            kraft: db.kraft_sum(),
            prefix_free: db.is_prefix_free(),
            omega: db.omega_checkpoints(),
            table: ComplexityTable::from_db(db),
            nbit_programs,
        }
    }

    pub fn n(&self) -> u32 {
        self.key.n
    }

    pub fn omega_final(&self) -> &Dyadic {
        &self.omega.last().expect("checkpoints start at t = 0").1
    }

    pub fn t_k(&self, k: u32) -> u64 {
        t_k_from_checkpoints(&self.omega, k)
    }

    pub fn k(&self, x: &BitString) -> Complexity {
        self.table.k(x)
    }

    pub fn k_at(&self, x: &BitString, t: u64) -> Complexity {
        self.table.k_at(x, t)
    }
}

/// The databases of one lab run, all at the same budgets.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub budgets: Budgets,
    /// Largest integer condition `k` the depth scans visit; `None` means
    /// the whole plain sweep.
    pub depth_cap: Option<u32>,
    views: BTreeMap<DbKey, DbView>,
    plain: BTreeMap<u32, PlainTable>,
    domains: BTreeMap<u32, HaltingDB>,
}

impl Catalog {
    pub fn new(budgets: Budgets) -> Self {
        Self {
            budgets,
            depth_cap: None,
            views: BTreeMap::new(),
            plain: BTreeMap::new(),
            domains: BTreeMap::new(),
        }
    }

    /// Enumerates `keys` in one batch. Unconditioned keys also get their
    /// plain table and keep their full record set.
    pub fn build(keys: &[DbKey], budgets: Budgets) -> Result<Self> {
        let mut cat = Self::new(budgets);
        cat.extend(keys, &HARD_CAPS)?;
        Ok(cat)
    }

    /// Enumerates the keys not yet present; duplicates are ignored.
    pub fn extend(&mut self, keys: &[DbKey], caps: &Budgets) -> Result<()> {
        let reqs: Vec<(DbKey, bool)> = keys
            .iter()
            .filter(|k| !self.contains(k))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(|k| (k.clone(), k.condition.is_empty()))
            .collect();
        for (db, plain) in enumerate_batch(&reqs, self.budgets, caps)? {
            self.insert(db, plain);
        }
        Ok(())
    }

    pub fn insert(&mut self, db: HaltingDB, plain: Option<PlainTable>) {
        assert_eq!(db.budgets(), self.budgets, "catalog budgets are fixed");
        let key = db.key().clone();
        self.views.insert(key.clone(), DbView::from_db(&db));
        if let Some(p) = plain {
            self.plain.insert(key.n, p);
        }
        if key.condition.is_empty() {
            self.domains.insert(key.n, db);
        }
    }

    pub fn contains(&self, key: &DbKey) -> bool {
        self.views.contains_key(key)
    }

    pub fn view(&self, key: &DbKey) -> Result<&DbView> {
        self.views.get(key).ok_or_else(|| LabError::MissingDb {
            n: key.n,
            condition: key.condition.to_field(),
        })
    }

    /// The view for `K(· | n, condition)`.
    pub fn given(&self, n: u32, condition: &BitString) -> Result<&DbView> {
        self.view(&DbKey::new(n, condition.clone()))
    }

    /// The view for an integer condition passed through the natural-number association.
    pub fn given_int(&self, n: u32, k: u64) -> Result<&DbView> {
        self.view(&DbKey::with_int(n, k))
    }

    pub fn plain(&self, n: u32) -> Result<&PlainTable> {
        self.plain.get(&n).ok_or_else(|| LabError::MissingDb {
            n,
            condition: "- (plain table)".into(),
        })
    }

    /// The full unconditioned database for `n`.
    pub fn domain(&self, n: u32) -> Result<&HaltingDB> {
        self.domains.get(&n).ok_or_else(|| LabError::MissingDb {
            n,
            condition: "-".into(),
        })
    }

    pub fn views(&self) -> impl Iterator<Item = &DbView> {
        self.views.values()
    }

    pub fn lengths(&self) -> impl Iterator<Item = u32> + '_ {
        self.domains.keys().copied()
    }
}
