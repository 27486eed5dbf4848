use std::collections::{BTreeMap, HashMap};

use crate::bits::BitString;
use crate::complexity::Complexity;
use crate::dyadic::Dyadic;
use crate::enumeration::{Budgets, DbKey, HaltingDB};

/// Everything recorded about one output of a database.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputStats {
    /// Shortest program, earliest in halting-time order among the shortest.
    pub witness: BitString,
    pub witness_steps: u64,
    /// `(t, K_t)` at every step count where `K_t` drops, in increasing `t`.
    pub history: Vec<(u64, u32)>,
    /// Number of programs producing this output, indexed by program length.
    pub length_counts: Vec<u32>,
}

impl OutputStats {
    pub fn k_final(&self) -> u32 {
        self.history.last().expect("nonempty history").1
    }

    pub fn k_at(&self, t: u64) -> Complexity {
        match self.history.iter().take_while(|(s, _)| *s <= t).last() {
            Some(&(_, k)) => Complexity::Finite(k),
            None => Complexity::Infinite,
        }
    }

    /// `Σ 2^-l(p)` over the programs producing this output.
    pub fn mass(&self) -> Dyadic {
        self.length_counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(len, &c)| Dyadic::new(c, len as i64))
            .sum()
    }

    pub fn programs(&self) -> u64 {
        self.length_counts.iter().map(|&c| c as u64).sum()
    }
}

/// Budgeted `K_t(x | condition)` for every output of one database.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityTable {
    pub key: DbKey,
    pub budgets: Budgets,
    entries: BTreeMap<BitString, OutputStats>,
}

impl ComplexityTable {
    pub fn from_db(db: &HaltingDB) -> Self {
        let max_len = db.budgets().max_program_bits as usize;
        let mut entries: HashMap<&BitString, OutputStats> = HashMap::new();
        for r in db.records() {
            let len = r.program.len();
            match entries.get_mut(&r.output) {
                Some(e) => {
                    e.length_counts[len] += 1;
                    if (len as u32) < e.k_final() {
                        e.history.push((r.steps, len as u32));
                        e.witness = r.program.clone();
                        e.witness_steps = r.steps;
                    }
                }
                None => {
                    let mut length_counts = vec![0; max_len.max(len) + 1];
                    length_counts[len] = 1;
                    entries.insert(
                        &r.output,
                        OutputStats {
                            witness: r.program.clone(),
                            witness_steps: r.steps,
                            history: vec![(r.steps, len as u32)],
                            length_counts,
                        },
                    );
                }
            }
        }
        // Canonical order puts the shortest record of each step first, so
        // the history never holds two entries for one step.
        let entries = entries.into_iter().map(|(x, e)| (x.clone(), e)).collect();
        Self {
            key: db.key().clone(),
            budgets: db.budgets(),
            entries,
        }
    }

    pub fn get(&self, x: &BitString) -> Option<&OutputStats> {
        self.entries.get(x)
    }

    /// `K_t(x)`; infinite when no program within `t` steps produces `x`.
    pub fn k_at(&self, x: &BitString, t: u64) -> Complexity {
        self.entries.get(x).map_or(Complexity::Infinite, |e| e.k_at(t))
    }

    /// `K(x)` at the final step budget.
    pub fn k(&self, x: &BitString) -> Complexity {
        self.k_at(x, self.budgets.max_steps)
    }

    pub fn witness(&self, x: &BitString) -> Option<&BitString> {
        self.entries.get(x).map(|e| &e.witness)
    }

    /// All outputs in lexicographic order.
    pub fn outputs(&self) -> impl Iterator<Item = (&BitString, &OutputStats)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
