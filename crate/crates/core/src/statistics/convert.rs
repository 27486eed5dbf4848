use std::collections::{BTreeMap, BTreeSet};

use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::error::{LabError, Result};
use crate::statistics::{mass, Extension, Model, ModelKind};

/// Prefix code for a semimeasure: `y` with `P(y) > 0` gets
/// `L = ⌈−log P(y)⌉ + 1` bits of `⌈F(y) · 2^L⌉`, where `F(y)` sums `P` over
/// the strings before `y`. That dyadic interval of width `2^-L` sits inside
/// `[F(y), F(y) + P(y))`, so the code is prefix-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShannonFanoCode {
    /// `y → code(y)`.
    pub codes: BTreeMap<BitString, BitString>,
}

impl ShannonFanoCode {
    pub fn new(p: &BTreeMap<BitString, Dyadic>) -> Result<Self> {
        if mass(p) > Dyadic::one() {
            return Err(LabError::Domain(format!(
                "semimeasure mass {} exceeds 1",
                mass(p)
            )));
        }
        let mut before = Dyadic::zero();
        let mut codes = BTreeMap::new();
        for (y, py) in p {
            if !py.is_positive() {
                continue;
            }
            let len = py.neg_log2_ceil().expect("positive") as usize + 1;
            let code = before.ceil_bits(len).expect("interval lies below 1");
            codes.insert(y.clone(), code);
            before += py;
        }
        Ok(Self { codes })
    }

    pub fn decode(&self, word: &BitString) -> Option<&BitString> {
        self.codes.iter().find(|(_, c)| *c == word).map(|(y, _)| y)
    }
}

/// The Shannon-Fano code of a semimeasure model as a function model
/// `code → y`, sharing the source program and complexity.
pub fn shannon_fano_convert(model: &Model) -> Result<Model> {
    let Extension::Semimeasure(p) = &model.extension else {
        return Err(LabError::Domain("shannon-fano needs a semimeasure model".into()));
    };
    let code = ShannonFanoCode::new(p)?;
    Ok(Model {
        kind: ModelKind::Function,
        extension: Extension::Function(code.codes.into_iter().map(|(y, c)| (c, y)).collect()),
        derived: true,
        ..model.clone()
    })
}

/// Decodes one codeword of a converted function model.
pub fn decode_shannon_fano<'a>(model: &'a Model, word: &BitString) -> Option<&'a BitString> {
    match &model.extension {
        Extension::Function(f) => f.get(word),
        _ => None,
    }
}

/// `P(y) = max 2^{−l(d)−1}` over preimages `d` of `y`, else
/// `1/(4(nat(y)+1)^2)`, each truncated to `width` bits.
pub fn func_to_measure(model: &Model, width: u32) -> Result<Model> {
    let Extension::Function(f) = &model.extension else {
        return Err(LabError::Domain("func_to_measure needs a function model".into()));
    };
    let mut shortest: BTreeMap<&BitString, usize> = BTreeMap::new();
    for (d, y) in f {
        let e = shortest.entry(y).or_insert(d.len());
        *e = (*e).min(d.len());
    }
    let mut table = BTreeMap::new();
    for y in BitString::all_of_len(model.n as usize) {
        let exact = match shortest.get(&y) {
            Some(&l) => Dyadic::pow2(-(l as i64) - 1),
            None => {
                let k = y.to_nat().expect("short word") as u128 + 1;
                let den = 4 * k * k;
                // floor(2^width / den) / 2^width
                Dyadic::new((1u128 << width) / den, width as i64)
            }
        };
        let v = Dyadic::new(exact.floor_scaled(width as i64), width as i64);
        if v.is_positive() {
            table.insert(y, v);
        }
    }
    let total = mass(&table);
    assert!(
        total <= Dyadic::one(),
        "fixed-length domains keep the mass below 1, got {total}"
    );
    Ok(Model {
        kind: ModelKind::Semimeasure,
        extension: Extension::Semimeasure(table),
        derived: true,
        ..model.clone()
    })
}

/// The image of a function model as a set model.
pub fn func_to_set(model: &Model) -> Result<Model> {
    let Extension::Function(f) = &model.extension else {
        return Err(LabError::Domain("func_to_set needs a function model".into()));
    };
    let image: BTreeSet<BitString> = f.values().cloned().collect();
    Ok(Model {
        kind: ModelKind::Set,
        extension: Extension::Set(image),
        derived: true,
        ..model.clone()
    })
}
