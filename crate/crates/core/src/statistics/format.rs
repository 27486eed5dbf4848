//! Plain-text model files.
//!
//! ```text
//! AITLAB-MODEL v1
//! machine AITLAB-M1
//! kind set
//! mode prefix
//! n 2
//! program 110110
//! complexity 6
//! derived false
//! entries 2
//! 00
//! 01
//! ```
//!
//! Semimeasure entries are `y value`, function entries `d y`; `-` is ε.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::bits::BitString;
use crate::complexity::Complexity;
use crate::dyadic::Dyadic;
use crate::error::{LabError, Result};
use crate::machine::MACHINE_VERSION;
use crate::statistics::{Extension, MachineMode, Model, ModelKind};

pub const MODEL_HEADER: &str = "AITLAB-MODEL v1";

pub fn write_model(model: &Model) -> String {
    let mut s = String::new();
    let entries = match &model.extension {
        Extension::Set(e) => e.len(),
        Extension::Semimeasure(e) => e.len(),
        Extension::Function(e) => e.len(),
    };
    writeln!(s, "{MODEL_HEADER}").unwrap();
    writeln!(s, "machine {MACHINE_VERSION}").unwrap();
    writeln!(s, "kind {}", model.kind).unwrap();
    writeln!(s, "mode {}", model.mode).unwrap();
    writeln!(s, "n {}", model.n).unwrap();
    writeln!(s, "program {}", model.program.to_field()).unwrap();
    writeln!(s, "complexity {}", model.complexity).unwrap();
    writeln!(s, "derived {}", model.derived).unwrap();
    writeln!(s, "entries {entries}").unwrap();
    match &model.extension {
        Extension::Set(e) => e.iter().for_each(|y| writeln!(s, "{}", y.to_field()).unwrap()),
        Extension::Semimeasure(e) => e
            .iter()
            .for_each(|(y, v)| writeln!(s, "{} {v}", y.to_field()).unwrap()),
        Extension::Function(e) => e
            .iter()
            .for_each(|(d, y)| writeln!(s, "{} {}", d.to_field(), y.to_field()).unwrap()),
    }
    s
}

fn bad(line: usize, msg: impl Into<String>) -> LabError {
    LabError::Malformed {
        line,
        msg: msg.into(),
    }
}

pub fn read_model(text: &str) -> Result<Model> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| lines.next().ok_or_else(|| bad(0, format!("missing {what}")));
    let (ln, head) = next("header")?;
    if head != MODEL_HEADER {
        return Err(bad(ln, format!("expected {MODEL_HEADER:?}")));
    }
    let mut field = |name: &str| -> Result<(usize, String)> {
        let (ln, l) = next(name)?;
        l.strip_prefix(name)
            .and_then(|r| r.strip_prefix(' '))
            .map(|v| (ln, v.to_string()))
            .ok_or_else(|| bad(ln, format!("expected field {name:?}")))
    };
    let (_, machine) = field("machine")?;
    if machine != MACHINE_VERSION {
        return Err(LabError::VersionMismatch {
            expected: MACHINE_VERSION.into(),
            found: machine,
        });
    }
    let (ln, kind) = field("kind")?;
    let kind = match kind.as_str() {
        "set" => ModelKind::Set,
        "semimeasure" => ModelKind::Semimeasure,
        "function" => ModelKind::Function,
        other => return Err(bad(ln, format!("unknown kind {other:?}"))),
    };
    let (ln, mode) = field("mode")?;
    let mode = match mode.as_str() {
        "prefix" => MachineMode::Prefix,
        "plain" => MachineMode::Plain,
        other => return Err(bad(ln, format!("unknown mode {other:?}"))),
    };
    let (ln, n) = field("n")?;
    let n: u32 = n.parse().map_err(|_| bad(ln, "bad n"))?;
    let (_, program) = field("program")?;
    let program = BitString::from_field(&program)?;
    let (ln, complexity) = field("complexity")?;
    let complexity = match complexity.as_str() {
        "inf" => Complexity::Infinite,
        v => Complexity::Finite(v.parse().map_err(|_| bad(ln, "bad complexity"))?),
    };
    let (ln, derived) = field("derived")?;
    let derived: bool = derived.parse().map_err(|_| bad(ln, "bad derived flag"))?;
    let (ln, entries) = field("entries")?;
    let entries: usize = entries.parse().map_err(|_| bad(ln, "bad entry count"))?;
    let mut rows = Vec::with_capacity(entries);
    for _ in 0..entries {
        rows.push(next("entry")?);
    }
    let pair = |ln: usize, l: &str| -> Result<(String, String)> {
        let (a, b) = l.split_once(' ').ok_or_else(|| bad(ln, "expected two fields"))?;
        Ok((a.to_string(), b.to_string()))
    };
    let extension = match kind {
        ModelKind::Set => Extension::Set(
            rows.iter()
                .map(|(_, l)| BitString::from_field(l))
                .collect::<std::result::Result<BTreeSet<_>, _>>()?,
        ),
        ModelKind::Semimeasure => {
            let mut m = BTreeMap::new();
            for (ln, l) in &rows {
                let (y, v) = pair(*ln, l)?;
                m.insert(BitString::from_field(&y)?, v.parse::<Dyadic>()?);
            }
            Extension::Semimeasure(m)
        }
        ModelKind::Function => {
            let mut m = BTreeMap::new();
            for (ln, l) in &rows {
                let (d, y) = pair(*ln, l)?;
                m.insert(BitString::from_field(&d)?, BitString::from_field(&y)?);
            }
            Extension::Function(m)
        }
    };
    Ok(Model {
        kind,
        mode,
        n,
        program,
        extension,
        complexity,
        derived,
    })
}
