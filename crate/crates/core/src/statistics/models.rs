use std::collections::{BTreeMap, BTreeSet};

use crate::bits::BitString;
use crate::complexity::{Catalog, Complexity, FUNCTION_DOMAIN_MAX};
use crate::dyadic::Dyadic;
use crate::enumeration::{Budgets, HaltingDB};
use crate::error::{LabError, Result};
use crate::machine::{run_prefix_word, MachineConfig, Status};
use crate::statistics::{Extension, MachineMode, Model, ModelKind};

/// The distinct n-bit blocks of an output whose length is a positive
/// multiple of `n`.
pub fn set_of_output(output: &BitString, n: u32) -> Option<BTreeSet<BitString>> {
    if n == 0 || output.is_empty() {
        return None;
    }
    Some(output.blocks(n as usize)?.into_iter().collect())
}

/// An output of exactly `w · 2^n` bits read as `2^n` numerators over `2^w`,
/// in lexicographic order of the n-bit strings. Zero entries are omitted.
pub fn table_of_output(output: &BitString, n: u32, w: u32) -> Option<BTreeMap<BitString, Dyadic>> {
    let cells = 1usize.checked_shl(n)?;
    if output.len() != cells * w as usize {
        return None;
    }
    let mut total = 0u128;
    let mut table = BTreeMap::new();
    for (y, chunk) in BitString::all_of_len(n as usize).zip(output.blocks(w as usize)?) {
        let num = chunk.to_uint()?;
        total += num as u128;
        if num > 0 {
            table.insert(y, Dyadic::new(num, w as i64));
        }
    }
    (total <= 1u128 << w).then_some(table)
}

fn not_a_model(what: &str, program: &BitString, why: impl std::fmt::Display) -> LabError {
    LabError::Domain(format!("{} is not a {what} model: {why}", program.to_field()))
}

/// Shortest, then lexicographically first, program whose output decodes to
/// the same object.
fn minimal_program<T: PartialEq>(
    db: &HaltingDB,
    target: &T,
    decode: impl Fn(&BitString) -> Option<T>,
) -> BitString {
    db.records()
        .iter()
        .filter(|r| decode(&r.output).as_ref() == Some(target))
        .map(|r| &r.program)
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .expect("the decoded program itself qualifies")
        .clone()
}

/// The set model of a halting prefix program of `db`. Its complexity is the
/// minimum over all programs in `db` whose outputs decode to the same set.
pub fn decode_set_model(db: &HaltingDB, program: &BitString) -> Result<Model> {
    let n = db.n();
    let record = db
        .get(program)
        .ok_or_else(|| not_a_model("set", program, "no halting record"))?;
    let set = set_of_output(&record.output, n).ok_or_else(|| {
        not_a_model(
            "set",
            program,
            format!(
                "output length {} is not a positive multiple of {n}",
                record.output.len()
            ),
        )
    })?;
    let best = minimal_program(db, &set, |o| set_of_output(o, n));
    Ok(Model {
        kind: ModelKind::Set,
        mode: MachineMode::Prefix,
        n,
        complexity: Complexity::Finite(best.len() as u32),
        program: best,
        extension: Extension::Set(set),
        derived: false,
    })
}

/// The semimeasure model of a halting prefix program emitting a width-`w`
/// table.
pub fn decode_semimeasure_model(db: &HaltingDB, program: &BitString, w: u32) -> Result<Model> {
    let n = db.n();
    let record = db
        .get(program)
        .ok_or_else(|| not_a_model("semimeasure", program, "no halting record"))?;
    let table = table_of_output(&record.output, n, w).ok_or_else(|| {
        not_a_model(
            "semimeasure",
            program,
            format!(
                "output of {} bits is not a width-{w} table of mass at most 1",
                record.output.len()
            ),
        )
    })?;
    let best = minimal_program(db, &table, |o| table_of_output(o, n, w));
    Ok(Model {
        kind: ModelKind::Semimeasure,
        mode: MachineMode::Prefix,
        n,
        complexity: Complexity::Finite(best.len() as u32),
        program: best,
        extension: Extension::Semimeasure(table),
        derived: false,
    })
}

/// Why a program is not a function model at some data width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionReject {
    pub program: BitString,
    pub data: BitString,
    pub status: Status,
    pub output_len: usize,
    pub bits_read: u32,
}

impl std::fmt::Display for FunctionReject {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "program {} on data {}: {} after reading {} bits, output length {}",
            self.program.to_field(),
            self.data.to_field(),
            self.status,
            self.bits_read,
            self.output_len
        )
    }
}

/// Runs `program` under every data word of length `m` and collects the map.
/// Every run must halt having read exactly `program` and emit `n` bits. The
/// complexity is the program's own length; [`ModelSpace`] holds the minimal
/// program per function.
pub fn decode_function_model(
    n: u32,
    program: &BitString,
    m: u32,
    budgets: Budgets,
) -> std::result::Result<Model, FunctionReject> {
    let mut map = BTreeMap::new();
    for d in BitString::all_of_len(m as usize) {
        let cfg = MachineConfig::new(budgets.max_steps, budgets.max_program_bits, d.clone(), n as u64)
            .expect("budgets hold whole opcodes");
        let out = run_prefix_word(program, &cfg);
        if !out.halted() || out.bits_read as usize != program.len() || out.output.len() != n as usize {
            return Err(FunctionReject {
                program: program.clone(),
                data: d,
                status: out.status,
                output_len: out.output.len(),
                bits_read: out.bits_read,
            });
        }
        map.insert(d, out.output);
    }
    Ok(Model {
        kind: ModelKind::Function,
        mode: MachineMode::Prefix,
        n,
        program: program.clone(),
        extension: Extension::Function(map),
        complexity: Complexity::Finite(program.len() as u32),
        derived: false,
    })
}

/// Every candidate model for one string length, each kind sorted in scan
/// order (complexity, then program).
#[derive(Debug, Clone)]
pub struct ModelSpace {
    pub n: u32,
    pub width: u32,
    pub prefix_sets: Vec<Model>,
    pub plain_sets: Vec<Model>,
    /// Decoded tables plus the uniform measure on each prefix set model.
    pub prefix_measures: Vec<Model>,
    /// Decoded tables plus the uniform measure on each plain set model.
    pub plain_measures: Vec<Model>,
    /// Function models with data width up to [`FUNCTION_DOMAIN_MAX`].
    pub functions: Vec<Model>,
    plain_set_index: BTreeMap<BTreeSet<BitString>, usize>,
}

fn insert_min<K: Ord>(map: &mut BTreeMap<K, BitString>, key: K, program: &BitString) {
    match map.get(&key) {
        Some(cur) if (cur.len(), cur) <= (program.len(), program) => {}
        _ => {
            map.insert(key, program.clone());
        }
    }
}

fn sorted(mut models: Vec<Model>) -> Vec<Model> {
    models.sort_by(|a, b| a.scan_key().cmp(&b.scan_key()));
    models
}

/// `U_S(y) = 2^-⌈log|S|⌉` on `S`: the set model read as a semimeasure.
pub(crate) fn uniform_on(set_model: &Model) -> Model {
    let Extension::Set(s) = &set_model.extension else {
        panic!("uniform_on needs a set model");
    };
    let p = Dyadic::pow2(-(crate::complexity::log_bits(s.len() as u64) as i64));
    Model {
        kind: ModelKind::Semimeasure,
        extension: Extension::Semimeasure(s.iter().map(|y| (y.clone(), p.clone())).collect()),
        derived: true,
        ..set_model.clone()
    }
}

impl ModelSpace {
    /// Needs the unconditioned view and plain table for `n` and, for
    /// function models, the views conditioned on every word of length at
    /// most [`FUNCTION_DOMAIN_MAX`].
    pub fn build(cat: &Catalog, n: u32, width: u32) -> Result<Self> {
        let base = cat.given(n, &BitString::new())?;
        let plain = cat.plain(n)?;

        let mut sets = BTreeMap::new();
        let mut tables = BTreeMap::new();
        for (out, stats) in base.table.outputs() {
            if let Some(s) = set_of_output(out, n) {
                insert_min(&mut sets, s, &stats.witness);
            }
            if let Some(t) = table_of_output(out, n, width) {
                insert_min(&mut tables, t, &stats.witness);
            }
        }
        let mut plain_sets = BTreeMap::new();
        let mut plain_tables = BTreeMap::new();
        for (out, entry) in &plain.entries {
            if let Some(s) = set_of_output(out, n) {
                insert_min(&mut plain_sets, s, &entry.program);
            }
            if let Some(t) = table_of_output(out, n, width) {
                insert_min(&mut plain_tables, t, &entry.program);
            }
        }

        let model = |kind, mode, program: BitString, extension| Model {
            kind,
            mode,
            n,
            complexity: Complexity::Finite(program.len() as u32),
            program,
            extension,
            derived: false,
        };
        let prefix_sets = sorted(
            sets.into_iter()
                .map(|(s, p)| model(ModelKind::Set, MachineMode::Prefix, p, Extension::Set(s)))
                .collect(),
        );
        let plain_sets = sorted(
            plain_sets
                .into_iter()
                .map(|(s, p)| model(ModelKind::Set, MachineMode::Plain, p, Extension::Set(s)))
                .collect(),
        );
        let prefix_measures = sorted(
            tables
                .into_iter()
                .map(|(t, p)| {
                    model(
                        ModelKind::Semimeasure,
                        MachineMode::Prefix,
                        p,
                        Extension::Semimeasure(t),
                    )
                })
                .chain(prefix_sets.iter().map(uniform_on))
                .collect(),
        );
        let plain_measures = sorted(
            plain_tables
                .into_iter()
                .map(|(t, p)| {
                    model(
                        ModelKind::Semimeasure,
                        MachineMode::Plain,
                        p,
                        Extension::Semimeasure(t),
                    )
                })
                .chain(plain_sets.iter().map(uniform_on))
                .collect(),
        );

        let mut functions = BTreeMap::new();
        for m in 0..=FUNCTION_DOMAIN_MAX {
            let mut common: Option<BTreeMap<BitString, BTreeMap<BitString, BitString>>> = None;
            for d in BitString::all_of_len(m) {
                let view = cat.given(n, &d)?;
                let progs = view
                    .nbit_programs
                    .as_ref()
                    .expect("short conditions keep programs");
                common = Some(match common {
                    None => progs
                        .iter()
                        .map(|(p, y)| (p.clone(), BTreeMap::from([(d.clone(), y.clone())])))
                        .collect(),
                    Some(mut acc) => {
                        acc.retain(|p, map| match progs.get(p) {
                            Some(y) => {
                                map.insert(d.clone(), y.clone());
                                true
                            }
                            None => false,
                        });
                        acc
                    }
                });
            }
            for (p, map) in common.unwrap_or_default() {
                insert_min(&mut functions, map, &p);
            }
        }
        let functions = sorted(
            functions
                .into_iter()
                .map(|(f, p)| {
                    model(
                        ModelKind::Function,
                        MachineMode::Prefix,
                        p,
                        Extension::Function(f),
                    )
                })
                .collect(),
        );

        let plain_set_index = plain_sets
            .iter()
            .enumerate()
            .map(|(i, m)| match &m.extension {
                Extension::Set(s) => (s.clone(), i),
                _ => unreachable!(),
            })
            .collect();
        Ok(Self {
            n,
            width,
            prefix_sets,
            plain_sets,
            prefix_measures,
            plain_measures,
            functions,
            plain_set_index,
        })
    }

    /// Candidates for one kind and mode. Plain function models are not
    /// enumerated.
    pub fn candidates(&self, kind: ModelKind, mode: MachineMode) -> &[Model] {
        match (kind, mode) {
            (ModelKind::Set, MachineMode::Prefix) => &self.prefix_sets,
            (ModelKind::Set, MachineMode::Plain) => &self.plain_sets,
            (ModelKind::Semimeasure, MachineMode::Prefix) => &self.prefix_measures,
            (ModelKind::Semimeasure, MachineMode::Plain) => &self.plain_measures,
            (ModelKind::Function, MachineMode::Prefix) => &self.functions,
            (ModelKind::Function, MachineMode::Plain) => &[],
        }
    }

    /// The plain set model with exactly this extension.
    pub fn plain_set(&self, set: &BTreeSet<BitString>) -> Option<&Model> {
        self.plain_set_index.get(set).map(|&i| &self.plain_sets[i])
    }
}
