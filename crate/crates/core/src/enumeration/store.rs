//! Line-oriented database files.
//!
//! ```text
//! AITLAB-HDB v1
//! machine=AITLAB-M1
//! n=<int>
//! cond=<bits|->
//! steps=<int>
//! bits=<int>
//! kraft=<num>/2^<exp>
//! <program> <steps> <output|->      (one per record, canonical order)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::enumeration::{kraft_of, BbEntry, Budgets, DbKey, HaltRecord, HaltingDB, PlainEntry, PlainTable};
use crate::error::{LabError, Result};
use crate::machine::MACHINE_VERSION;

pub const DB_HEADER: &str = "AITLAB-HDB v1";
pub const PLAIN_HEADER: &str = "AITLAB-PLAIN v1";

pub(crate) fn render(db: &HaltingDB) -> String {
    let mut s = String::new();
    writeln!(s, "{DB_HEADER}").unwrap();
    writeln!(s, "machine={}", db.machine_version()).unwrap();
    writeln!(s, "n={}", db.n()).unwrap();
    writeln!(s, "cond={}", db.condition().to_field()).unwrap();
    writeln!(s, "steps={}", db.budgets().max_steps).unwrap();
    writeln!(s, "bits={}", db.budgets().max_program_bits).unwrap();
    writeln!(s, "kraft={}", db.kraft_sum()).unwrap();
    for r in db.records() {
        writeln!(s, "{} {} {}", r.program, r.steps, r.output.to_field()).unwrap();
    }
    s
}

/// Writes atomically: a temporary sibling is renamed over `path`.
pub fn store(db: &HaltingDB, path: &Path) -> Result<()> {
    write_atomic(path, render(db).as_bytes())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn check_header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, header: &str) -> Result<()> {
    match lines.next() {
        Some((_, l)) if l == header => {}
        other => {
            return Err(LabError::Malformed {
                line: 1,
                msg: format!("expected {header:?}, got {:?}", other.map(|(_, l)| l)),
            })
        }
    }
    let machine = header_field(lines.next(), "machine")?;
    if machine != MACHINE_VERSION {
        return Err(LabError::VersionMismatch {
            expected: MACHINE_VERSION.to_string(),
            found: machine.to_string(),
        });
    }
    Ok(())
}

fn header_field<'a>(line: Option<(usize, &'a str)>, name: &str) -> Result<&'a str> {
    let (i, line) = line.ok_or_else(|| LabError::Malformed {
        line: 0,
        msg: format!("missing {name}= line"),
    })?;
    line.strip_prefix(name)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| LabError::Malformed {
            line: i + 1,
            msg: format!("expected {name}=…, got {line:?}"),
        })
}

fn parse_num<T: std::str::FromStr>(field: &str, line: usize) -> Result<T> {
    field.parse().map_err(|_| LabError::Malformed {
        line,
        msg: format!("bad number {field:?}"),
    })
}

pub(crate) fn parse(text: &str) -> Result<HaltingDB> {
    let mut lines = text.lines().enumerate();
    check_header(&mut lines, DB_HEADER)?;
    let n: u32 = parse_num(header_field(lines.next(), "n")?, 3)?;
    let condition = BitString::from_field(header_field(lines.next(), "cond")?)?;
    let steps: u64 = parse_num(header_field(lines.next(), "steps")?, 5)?;
    let bits: u32 = parse_num(header_field(lines.next(), "bits")?, 6)?;
    let kraft: Dyadic = header_field(lines.next(), "kraft")?.parse()?;

    let mut records = Vec::new();
    for (i, line) in lines {
        let malformed = |msg: String| LabError::Malformed { line: i + 1, msg };
        let mut fields = line.split(' ');
        let (Some(p), Some(s), Some(o), None) = (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(malformed(format!("expected 3 fields, got {line:?}")));
        };
        let program: BitString = p.parse()?;
        if program.is_empty() || !program.len().is_multiple_of(3) {
            return Err(malformed(format!("program {p:?} is not whole opcodes")));
        }
        records.push(HaltRecord {
            program,
            steps: parse_num(s, i + 1)?,
            output: BitString::from_field(o)?,
        });
    }
    let computed = kraft_of(&records);
    if computed != kraft {
        return Err(LabError::ChecksumMismatch {
            header: kraft.to_string(),
            computed: computed.to_string(),
        });
    }
    let in_order = records.windows(2).all(|w| w[0].canonical_cmp(&w[1]).is_lt());
    if !in_order {
        return Err(LabError::Malformed {
            line: 0,
            msg: "records are not in canonical order".into(),
        });
    }
    Ok(HaltingDB::from_records(
        DbKey::new(n, condition),
        Budgets::new(steps, bits),
        records,
    ))
}

pub fn load(path: &Path) -> Result<HaltingDB> {
    parse(&fs::read_to_string(path)?)
}

/// Plain-table files: the same header fields, then one `bb <ops> <value>
/// <champion> <steps>` line per opcode count and one `<output> <program>
/// <steps>` line per output, in output order.
pub(crate) fn render_plain(table: &PlainTable) -> String {
    let mut s = String::new();
    writeln!(s, "{PLAIN_HEADER}").unwrap();
    writeln!(s, "machine={MACHINE_VERSION}").unwrap();
    writeln!(s, "n={}", table.key.n).unwrap();
    writeln!(s, "cond={}", table.key.condition.to_field()).unwrap();
    writeln!(s, "steps={}", table.budgets.max_steps).unwrap();
    writeln!(s, "bits={}", table.budgets.max_program_bits).unwrap();
    for (m, e) in table.bb.iter().enumerate() {
        writeln!(
            s,
            "bb {m} {} {} {}",
            e.value.to_field(),
            e.champion.to_field(),
            e.champion_steps
        )
        .unwrap();
    }
    for (out, e) in &table.entries {
        writeln!(s, "{} {} {}", out.to_field(), e.program.to_field(), e.steps).unwrap();
    }
    s
}

pub fn store_plain(table: &PlainTable, path: &Path) -> Result<()> {
    write_atomic(path, render_plain(table).as_bytes())
}

pub(crate) fn parse_plain(text: &str) -> Result<PlainTable> {
    let mut lines = text.lines().enumerate();
    check_header(&mut lines, PLAIN_HEADER)?;
    let n: u32 = parse_num(header_field(lines.next(), "n")?, 3)?;
    let condition = BitString::from_field(header_field(lines.next(), "cond")?)?;
    let steps: u64 = parse_num(header_field(lines.next(), "steps")?, 5)?;
    let bits: u32 = parse_num(header_field(lines.next(), "bits")?, 6)?;
    let mut bb = Vec::new();
    let mut entries = std::collections::BTreeMap::new();
    for (i, line) in lines {
        let malformed = |msg: String| LabError::Malformed { line: i + 1, msg };
        let fields: Vec<&str> = line.split(' ').collect();
        match fields.as_slice() {
            ["bb", m, value, champion, st] => {
                if parse_num::<usize>(m, i + 1)? != bb.len() {
                    return Err(malformed(format!("bb rows out of order at {m}")));
                }
                bb.push(BbEntry {
                    value: BitString::from_field(value)?,
                    champion: BitString::from_field(champion)?,
                    champion_steps: parse_num(st, i + 1)?,
                });
            }
            [out, program, st] => {
                entries.insert(
                    BitString::from_field(out)?,
                    PlainEntry {
                        program: BitString::from_field(program)?,
                        steps: parse_num(st, i + 1)?,
                    },
                );
            }
            _ => return Err(malformed(format!("unexpected line {line:?}"))),
        }
    }
    if bb.is_empty() {
        return Err(LabError::Malformed {
            line: 0,
            msg: "plain table has no bb rows".into(),
        });
    }
    Ok(PlainTable {
        key: DbKey::new(n, condition),
        budgets: Budgets::new(steps, bits),
        entries,
        bb,
    })
}

pub fn load_plain(path: &Path) -> Result<PlainTable> {
    parse_plain(&fs::read_to_string(path)?)
}
