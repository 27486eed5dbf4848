//! Plain-mode summary gathered during the demand-tree search.
//!
//! A plain program of `m` opcodes either halts on `H`, runs off its end, or
//! fails to halt within budget. The search visits exactly the states where a
//! program runs off its end (every fetch point), and every `H` halt also
//! covers all longer programs sharing that prefix. So one pass yields the
//! minimal plain program per output and the busy-beaver maximum per length.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use crate::bits::BitString;
use crate::enumeration::{Budgets, DbKey, HaltRecord};

/// Shortest plain program found for one output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainEntry {
    pub program: BitString,
    pub steps: u64,
}

impl PlainEntry {
    fn key(&self) -> (usize, u64, &BitString) {
        (self.program.len(), self.steps, &self.program)
    }

    fn better_than(&self, other: &PlainEntry) -> bool {
        self.key() < other.key()
    }
}

/// Largest output (in natural-number order) among the halting plain programs
/// of one length, with the fastest program reaching it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BbEntry {
    pub value: BitString,
    pub champion: BitString,
    pub champion_steps: u64,
}

impl BbEntry {
    fn rank(&self, other: &BbEntry) -> Ordering {
        self.value
            .nat_cmp(&other.value)
            .then_with(|| other.champion_steps.cmp(&self.champion_steps))
            .then_with(|| other.champion.cmp(&self.champion))
    }
}

fn keep_max(slot: &mut Option<BbEntry>, cand: BbEntry) {
    match slot {
        Some(cur) if cur.rank(&cand) != Ordering::Less => {}
        _ => *slot = Some(cand),
    }
}

#[derive(Debug, Clone)]
pub(crate) struct PlainAcc {
    best: HashMap<BitString, PlainEntry>,
    end_max: Vec<Option<BbEntry>>,
    halt_max: Vec<Option<BbEntry>>,
}

impl PlainAcc {
    pub(crate) fn new(max_ops: usize) -> Self {
        Self {
            best: HashMap::new(),
            end_max: vec![None; max_ops + 1],
            halt_max: vec![None; max_ops + 1],
        }
    }

    fn offer(&mut self, record: &HaltRecord) {
        let cand = PlainEntry {
            program: record.program.clone(),
            steps: record.steps,
        };
        match self.best.get_mut(&record.output) {
            Some(cur) if !cand.better_than(cur) => {}
            Some(cur) => *cur = cand,
            None => {
                self.best.insert(record.output.clone(), cand);
            }
        }
    }

    fn bb(record: &HaltRecord) -> BbEntry {
        BbEntry {
            value: record.output.clone(),
            champion: record.program.clone(),
            champion_steps: record.steps,
        }
    }

    /// The `ops`-opcode program ran off its end.
    pub(crate) fn end_at(&mut self, ops: usize, record: &HaltRecord) {
        self.offer(record);
        keep_max(&mut self.end_max[ops], Self::bb(record));
    }

    /// The program halted on `H` after fetching `ops` opcodes.
    pub(crate) fn halt_at(&mut self, ops: usize, record: &HaltRecord) {
        self.offer(record);
        keep_max(&mut self.halt_max[ops], Self::bb(record));
    }

    pub(crate) fn merge(&mut self, other: PlainAcc) {
        for (output, cand) in other.best {
            match self.best.get_mut(&output) {
                Some(cur) if !cand.better_than(cur) => {}
                Some(cur) => *cur = cand,
                None => {
                    self.best.insert(output, cand);
                }
            }
        }
        for (mine, theirs) in self.end_max.iter_mut().zip(other.end_max) {
            if let Some(t) = theirs {
                keep_max(mine, t);
            }
        }
        for (mine, theirs) in self.halt_max.iter_mut().zip(other.halt_max) {
            if let Some(t) = theirs {
                keep_max(mine, t);
            }
        }
    }

    pub(crate) fn finish(self, key: DbKey, budgets: Budgets) -> PlainTable {
        let mut bb: Vec<BbEntry> = Vec::with_capacity(self.end_max.len());
        let mut halted_so_far: Option<BbEntry> = None;
        for (m, end) in self.end_max.into_iter().enumerate() {
            if let Some(h) = self.halt_max[m].clone() {
                keep_max(&mut halted_so_far, h);
            }
            let mut best = end;
            if let Some(h) = halted_so_far.clone() {
                // An `H` halt at fewer opcodes covers every padding of it.
                let pad = crate::machine::ops_to_bits(&vec![0u8; m - h.champion.len() / 3]);
                keep_max(
                    &mut best,
                    BbEntry {
                        champion: h.champion.concat(&pad),
                        ..h
                    },
                );
            }
            bb.push(best.expect("some plain program of every length halts"));
        }
        PlainTable {
            key,
            budgets,
            entries: self.best.into_iter().collect(),
            bb,
        }
    }
}

/// Plain-mode results for one (n, condition) at fixed budgets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainTable {
    pub key: DbKey,
    pub budgets: Budgets,
    /// Output → shortest (then fastest, then lexicographically first) program.
    pub entries: BTreeMap<BitString, PlainEntry>,
    /// Indexed by opcode count.
    pub bb: Vec<BbEntry>,
}

impl PlainTable {
    /// Plain complexity of `x`: length of the shortest plain program
    /// producing it. `None` when nothing within budget does.
    pub fn complexity(&self, x: &BitString) -> Option<u32> {
        self.entries.get(x).map(|e| e.program.len() as u32)
    }

    pub fn witness(&self, x: &BitString) -> Option<&PlainEntry> {
        self.entries.get(x)
    }

    /// Largest plain length (bits) covered by the sweep.
    pub fn max_bits(&self) -> u32 {
        ((self.bb.len() - 1) * 3) as u32
    }

    /// Busy-beaver entry for programs of exactly `k` bits; a trailing
    /// partial opcode is inert, so `k` behaves like `3⌊k/3⌋`.
    pub fn bb_entry(&self, k: u32) -> Option<&BbEntry> {
        self.bb.get((k / 3) as usize)
    }
}
