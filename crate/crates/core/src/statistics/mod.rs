//! Models as machine programs, the sufficiency / weak-sufficiency /
//! typicality deciders, model search, code converters and the explicit
//! weak statistic built from busy-beaver depth.

mod convert;
mod format;
mod models;
mod verdict;
mod weak;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::bits::BitString;
use crate::complexity::{log_bits, Complexity};
use crate::dyadic::Dyadic;

pub use convert::{decode_shannon_fano, func_to_measure, func_to_set, shannon_fano_convert, ShannonFanoCode};
pub use format::{read_model, write_model, MODEL_HEADER};
pub use models::{
    decode_function_model, decode_semimeasure_model, decode_set_model, set_of_output, table_of_output,
    FunctionReject, ModelSpace,
};
pub use verdict::{
    is_sufficient, is_typical, is_weak_sufficient, judge, search_minimal, Definition, Found,
    SufficiencyVerdict, Verdict, VERDICT_CSV_HEADER,
};
pub use weak::{
    bb_time_probe, check_wss_is_tm, construct_p_prime, structure_sweep, wss_census, BbTimeProbe, CensusRow,
    PPrime, TypicalityCheck,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Set,
    Semimeasure,
    Function,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Set => "set",
            ModelKind::Semimeasure => "semimeasure",
            ModelKind::Function => "function",
        })
    }
}

/// Which interpreter the model's program runs on, and so whether its
/// complexity is prefix (`K`) or plain (`C`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MachineMode {
    Prefix,
    Plain,
}

impl fmt::Display for MachineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MachineMode::Prefix => "prefix",
            MachineMode::Plain => "plain",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Extension {
    Set(BTreeSet<BitString>),
    /// Value per n-bit string; strings not listed have mass 0.
    Semimeasure(BTreeMap<BitString, Dyadic>),
    /// Data word → n-bit string. Data words of a function model all have
    /// the same length; converted codes may not.
    Function(BTreeMap<BitString, BitString>),
}

/// A statistic: a program, what it decodes to, and its complexity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Model {
    pub kind: ModelKind,
    pub mode: MachineMode,
    pub n: u32,
    /// Shortest program for the extension in its mode; also the model's
    /// minimal description when used as a condition.
    pub program: BitString,
    pub extension: Extension,
    pub complexity: Complexity,
    /// Built by the lab rather than decoded from the program's output.
    pub derived: bool,
}

impl Model {
    /// `log|S|`, `⌈−log P(x)⌉` or the data length `l(d)` of the shortest
    /// preimage; `None` when `x` is outside the support.
    pub fn log_term(&self, x: &BitString) -> Option<u32> {
        match &self.extension {
            Extension::Set(s) => s.contains(x).then(|| log_bits(s.len() as u64)),
            Extension::Semimeasure(p) => p
                .get(x)
                .filter(|v| v.is_positive())
                .map(|v| v.neg_log2_ceil().expect("positive") as u32),
            Extension::Function(f) => f
                .iter()
                .filter(|(_, y)| *y == x)
                .map(|(d, _)| d.len() as u32)
                .min(),
        }
    }

    pub fn contains(&self, x: &BitString) -> bool {
        self.log_term(x).is_some()
    }

    /// Canonical scan order: complexity, then program.
    pub fn scan_key(&self) -> (Complexity, &BitString) {
        (self.complexity, &self.program)
    }

    pub fn describe(&self) -> String {
        let ext = match &self.extension {
            Extension::Set(s) => format!(
                "{{{}}}",
                s.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ")
            ),
            Extension::Semimeasure(p) => format!("{} points", p.len()),
            Extension::Function(f) => format!("{} data words", f.len()),
        };
        let tag = if self.derived { "+derived" } else { "" };
        format!(
            "{}/{}{} {} p={}",
            self.kind,
            self.mode,
            tag,
            ext,
            self.program.to_field()
        )
    }
}

/// Total mass of a semimeasure extension.
pub fn mass(p: &BTreeMap<BitString, Dyadic>) -> Dyadic {
    p.values().sum()
}
