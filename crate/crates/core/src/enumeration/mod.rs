//! Exhaustive enumeration of the prefix-mode halting domain and the
//! quantities read off it: halting mass `Ω^n_t`, its prefixes, the precision
//! times `t_k`, the halting sequence, and halting-time codes.

mod beta;
mod plain;
mod search;
mod store;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::error::{LabError, Result};
use crate::machine::{condition_cells, run_prefix_word, MachineConfig, MACHINE_VERSION};

pub use beta::{alpha, beta_code, beta_truncated, decode_beta, BetaDecoder};
pub use plain::{BbEntry, PlainEntry, PlainTable};
pub use store::{load, load_plain, store, store_plain, write_atomic, DB_HEADER, PLAIN_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Budgets {
    pub max_steps: u64,
    pub max_program_bits: u32,
}

impl Budgets {
    pub const fn new(max_steps: u64, max_program_bits: u32) -> Self {
        Self {
            max_steps,
            max_program_bits,
        }
    }

    pub fn check(&self, caps: &Budgets) -> Result<()> {
        if !self.max_program_bits.is_multiple_of(3) {
            return Err(LabError::Config(format!(
                "program budget {} bits is not a whole number of opcodes",
                self.max_program_bits
            )));
        }
        if self.max_steps > caps.max_steps || self.max_program_bits > caps.max_program_bits {
            return Err(LabError::Config(format!(
                "budgets (steps {}, bits {}) exceed the hard caps (steps {}, bits {})",
                self.max_steps, self.max_program_bits, caps.max_steps, caps.max_program_bits
            )));
        }
        Ok(())
    }

    /// Component-wise `<=`.
    pub fn within(&self, other: &Budgets) -> bool {
        self.max_steps <= other.max_steps && self.max_program_bits <= other.max_program_bits
    }
}

impl Default for Budgets {
    fn default() -> Self {
        Self::new(4096, 24)
    }
}

/// Hard caps on what a single enumeration may be asked to do.
pub const HARD_CAPS: Budgets = Budgets::new(1 << 20, 36);

/// Which database: the length parameter and the condition word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DbKey {
    pub n: u32,
    pub condition: BitString,
}

impl DbKey {
    pub fn new(n: u32, condition: BitString) -> Self {
        Self { n, condition }
    }

    pub fn plain(n: u32) -> Self {
        Self::new(n, BitString::new())
    }

    /// Integer conditions go through the natural-number association.
    pub fn with_int(n: u32, k: u64) -> Self {
        Self::new(n, BitString::from_nat(k))
    }
}

impl fmt::Display for DbKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} cond={}", self.n, self.condition.to_field())
    }
}

/// One halting computation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HaltRecord {
    pub program: BitString,
    pub steps: u64,
    pub output: BitString,
}

impl HaltRecord {
    /// Halting-time order: steps, then length, then lexicographic.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.steps
            .cmp(&other.steps)
            .then_with(|| self.program.len().cmp(&other.program.len()))
            .then_with(|| self.program.cmp(&other.program))
    }

    /// `2^-l(p)`.
    pub fn weight(&self) -> Dyadic {
        Dyadic::pow2(-(self.program.len() as i64))
    }
}

/// `Σ 2^-l(p)` over `records`, summed per program length.
pub(crate) fn kraft_of(records: &[HaltRecord]) -> Dyadic {
    let mut counts: Vec<u64> = Vec::new();
    for r in records {
        let l = r.program.len();
        if counts.len() <= l {
            counts.resize(l + 1, 0);
        }
        counts[l] += 1;
    }
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(l, &c)| Dyadic::new(c, l as i64))
        .sum()
}

/// The canonical, immutable set of halting records for one
/// (n, condition, budgets).
#[derive(Debug, Clone)]
pub struct HaltingDB {
    machine_version: String,
    key: DbKey,
    budgets: Budgets,
    records: Vec<HaltRecord>,
    /// Record indices sorted by program, for lookups.
    by_program: Vec<u32>,
}

impl PartialEq for HaltingDB {
    fn eq(&self, other: &Self) -> bool {
        self.machine_version == other.machine_version
            && self.key == other.key
            && self.budgets == other.budgets
            && self.records == other.records
    }
}

impl HaltingDB {
    /// Builds a database, sorting records into canonical order.
    pub fn from_records(key: DbKey, budgets: Budgets, mut records: Vec<HaltRecord>) -> Self {
        records.sort_by(HaltRecord::canonical_cmp);
        let mut by_program: Vec<u32> = (0..records.len() as u32).collect();
        by_program.sort_unstable_by(|&a, &b| records[a as usize].program.cmp(&records[b as usize].program));
        Self {
            machine_version: MACHINE_VERSION.to_string(),
            key,
            budgets,
            records,
            by_program,
        }
    }

    pub fn machine_version(&self) -> &str {
        &self.machine_version
    }

    pub fn key(&self) -> &DbKey {
        &self.key
    }

    pub fn n(&self) -> u32 {
        self.key.n
    }

    pub fn condition(&self) -> &BitString {
        &self.key.condition
    }

    pub fn budgets(&self) -> Budgets {
        self.budgets
    }

    pub fn records(&self) -> &[HaltRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, program: &BitString) -> Option<&HaltRecord> {
        self.index_of(program).map(|i| &self.records[i])
    }

    /// Position in halting-time order.
    pub fn index_of(&self, program: &BitString) -> Option<usize> {
        self.by_program
            .binary_search_by(|&i| self.records[i as usize].program.cmp(program))
            .ok()
            .map(|pos| self.by_program[pos] as usize)
    }

    pub fn machine_config(&self) -> MachineConfig {
        MachineConfig {
            max_steps: self.budgets.max_steps,
            max_program_bits: self.budgets.max_program_bits,
            condition: self.key.condition.clone(),
            length_param: self.key.n as u64,
        }
    }

    /// `Σ 2^-l(p)` over every record, whatever its output length.
    pub fn kraft_sum(&self) -> Dyadic {
        kraft_of(&self.records)
    }

    fn counts_for_omega(&self, r: &HaltRecord) -> bool {
        r.output.len() == self.key.n as usize
    }

    /// `Ω^n_t`: mass of programs halting within `t` steps with an n-bit output.
    pub fn omega_t(&self, t: u64) -> Result<Dyadic> {
        if t > self.budgets.max_steps {
            return Err(LabError::BeyondBudget {
                t,
                max: self.budgets.max_steps,
            });
        }
        Ok(self
            .records
            .iter()
            .take_while(|r| r.steps <= t)
            .filter(|r| self.counts_for_omega(r))
            .map(HaltRecord::weight)
            .sum())
    }

    /// `Ω^n` at the final step budget.
    pub fn omega_final(&self) -> Dyadic {
        self.omega_t(self.budgets.max_steps)
            .expect("final budget is within budget")
    }

    /// `(t, Ω^n_t)` at every step count where the mass grows, starting at t = 0.
    pub fn omega_checkpoints(&self) -> Vec<(u64, Dyadic)> {
        let mut out = vec![(0, Dyadic::zero())];
        let mut acc = Dyadic::zero();
        for r in self.records.iter().filter(|r| self.counts_for_omega(r)) {
            acc += &r.weight();
            match out.last_mut() {
                Some((t, v)) if *t == r.steps => *v = acc.clone(),
                _ => out.push((r.steps, acc.clone())),
            }
        }
        out
    }

    /// First `j` bits of the final `Ω^n` (truncated). `j = 0` gives ε.
    pub fn omega_prefix(&self, j: usize) -> BitString {
        self.omega_final().truncate_bits(j)
    }

    /// `t_k`: least `t` with `Ω^n − Ω^n_t <= 2^-k`.
    pub fn t_k(&self, k: u32) -> u64 {
        t_k_from_checkpoints(&self.omega_checkpoints(), k)
    }

    /// Least `t` with `Ω^n_t >= value`.
    pub fn time_to_reach(&self, value: &Dyadic) -> Option<u64> {
        self.omega_checkpoints()
            .into_iter()
            .find(|(_, v)| v >= value)
            .map(|(t, _)| t)
    }

    /// The database at smaller budgets: records within both caps.
    pub fn restrict(&self, budgets: Budgets) -> HaltingDB {
        let records = self
            .records
            .iter()
            .filter(|r| r.steps <= budgets.max_steps && r.program.len() as u32 <= budgets.max_program_bits)
            .cloned()
            .collect();
        HaltingDB::from_records(self.key.clone(), budgets, records)
    }

    /// No record's program is a proper prefix of (or equal to) another's.
    pub fn is_prefix_free(&self) -> bool {
        crate::bits::is_prefix_free(self.records.iter().map(|r| &r.program))
    }

    /// Halting sequence bits `0..len` under this database's budgets; see
    /// [`halting_sequence`].
    pub fn halting_sequence(&self, len: u64) -> BitString {
        halting_sequence(&self.key, self.budgets, len)
    }

    /// Decodes halting verdicts from a truncated `Ω^n`.
    pub fn omega_to_halting(&self, omega_j: &BitString) -> Result<HaltingDecode<'_>> {
        let value = Dyadic::from_fraction_bits(omega_j);
        let t = self
            .time_to_reach(&value)
            .ok_or_else(|| LabError::InvalidPrefix(omega_j.to_string()))?;
        Ok(HaltingDecode {
            db: self,
            j: omega_j.len(),
            t,
        })
    }
}

/// `t_k` over `(t, Ω^n_t)` checkpoints whose last entry is the final value.
pub fn t_k_from_checkpoints(checkpoints: &[(u64, Dyadic)], k: u32) -> u64 {
    let (_, last) = checkpoints.last().expect("checkpoints start at t = 0");
    let target = last - &Dyadic::pow2(-(k as i64));
    checkpoints
        .iter()
        .find(|(_, v)| *v >= target)
        .map(|(t, _)| *t)
        .expect("the final checkpoint always qualifies")
}

/// Halting sequence bits `0..len`: bit `i` is 1 iff the word with index `i`,
/// given as exactly the available bits, makes the machine halt having read
/// all of it within budget. Runs the machine directly.
pub fn halting_sequence(key: &DbKey, budgets: Budgets, len: u64) -> BitString {
    let cfg = MachineConfig {
        max_steps: budgets.max_steps,
        max_program_bits: budgets.max_program_bits,
        condition: key.condition.clone(),
        length_param: key.n as u64,
    };
    (0..len)
        .map(|i| {
            let w = BitString::from_nat(i);
            if w.len() as u32 > budgets.max_program_bits {
                return false;
            }
            let out = run_prefix_word(&w, &cfg);
            out.halted() && out.bits_read as usize == w.len()
        })
        .collect()
}

/// Verdicts recovered from `Ω^{n,j}`: a program halts iff it halts within the
/// first `t` steps, where `t` is the least time the mass reaches the prefix.
#[derive(Debug, Clone, Copy)]
pub struct HaltingDecode<'a> {
    db: &'a HaltingDB,
    pub j: usize,
    pub t: u64,
}

impl HaltingDecode<'_> {
    pub fn verdict(&self, program: &BitString) -> bool {
        self.db.get(program).is_some_and(|r| r.steps <= self.t)
    }

    /// Every program shorter than `j − slack` bits gets the right verdict.
    /// Programs outside the domain are decided "diverges", which is always
    /// right, so only domain members need checking.
    pub fn correct_below(&self, slack: usize) -> bool {
        let bound = self.j.saturating_sub(slack);
        self.db
            .records()
            .iter()
            .filter(|r| r.program.len() < bound)
            .all(|r| self.verdict(&r.program))
    }

    /// Smallest slack at which [`HaltingDecode::correct_below`] holds.
    pub fn min_slack(&self) -> usize {
        (0..=self.j)
            .find(|&c| self.correct_below(c))
            .expect("slack j leaves nothing to decide")
    }
}

/// Enumerates one database per request in a single shared search.
pub fn enumerate_batch(
    requests: &[(DbKey, bool)],
    budgets: Budgets,
    caps: &Budgets,
) -> Result<Vec<(HaltingDB, Option<PlainTable>)>> {
    budgets.check(caps)?;
    let mut seen = std::collections::HashSet::new();
    for (key, _) in requests {
        if !seen.insert(key) {
            return Err(LabError::Config(format!("duplicate request {key}")));
        }
    }
    let presets: Vec<search::Preset> = requests
        .iter()
        .map(|(key, plain)| search::Preset {
            left: condition_cells(key.n as u64, &key.condition),
            collect_plain: *plain,
        })
        .collect();
    let out = search::search(&presets, budgets);
    Ok(requests
        .iter()
        .zip(out.records)
        .zip(out.plain)
        .map(|(((key, _), records), plain)| {
            let db = HaltingDB::from_records(key.clone(), budgets, records);
            let plain = plain.map(|acc| acc.finish(key.clone(), budgets));
            (db, plain)
        })
        .collect())
}

/// Enumerates the halting domain for one (n, condition).
pub fn enumerate_domain(n: u32, condition: &BitString, budgets: Budgets) -> Result<HaltingDB> {
    let key = DbKey::new(n, condition.clone());
    let mut out = enumerate_batch(&[(key, false)], budgets, &HARD_CAPS)?;
    Ok(out.remove(0).0)
}

/// Enumerates the halting domain and the plain-mode table for one (n, condition).
pub fn enumerate_with_plain(
    n: u32,
    condition: &BitString,
    budgets: Budgets,
) -> Result<(HaltingDB, PlainTable)> {
    let key = DbKey::new(n, condition.clone());
    let (db, plain) = enumerate_batch(&[(key, true)], budgets, &HARD_CAPS)?.remove(0);
    Ok((db, plain.expect("plain table requested")))
}
