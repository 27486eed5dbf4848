//! Halting-time codes: each program is named by where its weight falls in
//! the running Kraft sum taken in halting-time order.

use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::enumeration::HaltingDB;

/// `α_p`: running sum of `2^-l(p_j)` over the records up to and including `p`,
/// in canonical halting-time order.
pub fn alpha(db: &HaltingDB) -> Vec<(BitString, Dyadic)> {
    let mut acc = Dyadic::zero();
    db.records()
        .iter()
        .map(|r| {
            acc += &r.weight();
            (r.program.clone(), acc.clone())
        })
        .collect()
}

/// The first `l(p)` bits of `α_p`, taken literally. This matches the plain
/// reading of the construction but is not prefix-free in general: a short
/// program halting just before a longer one whose weight is small yields a
/// prefix of the longer code. See [`beta_code`] for the prefix-free variant.
pub fn beta_truncated(db: &HaltingDB) -> Vec<(BitString, BitString)> {
    alpha(db)
        .into_iter()
        .map(|(p, a)| {
            let len = p.len();
            (p, a.truncate_bits(len))
        })
        .collect()
}

/// Prefix-free halting-time code: `l(p) + 1` bits of the running sum just
/// before `p`, rounded up. Record `i` owns `[α_{i-1}, α_i)`, an interval of
/// width `2^-l(p)`, and the rounded-up point with one extra bit names a
/// dyadic interval inside it, so codes of distinct records never nest.
pub fn beta_code(db: &HaltingDB) -> Vec<(BitString, BitString)> {
    let mut before = Dyadic::zero();
    db.records()
        .iter()
        .map(|r| {
            let len = r.program.len() + 1;
            let code = before
                .ceil_bits(len)
                .expect("Kraft sum <= 1 keeps every code below 1");
            before += &r.weight();
            (r.program.clone(), code)
        })
        .collect()
}

/// Inverse of [`beta_code`].
pub fn decode_beta<'a>(db: &'a HaltingDB, code: &BitString) -> Option<&'a BitString> {
    BetaDecoder::new(db).decode(code)
}

/// Inverse of [`beta_code`] by binary search over the running sums, for
/// decoding many codes against one database.
pub struct BetaDecoder<'a> {
    db: &'a HaltingDB,
    /// Running sum just before each record.
    before: Vec<Dyadic>,
}

impl<'a> BetaDecoder<'a> {
    pub fn new(db: &'a HaltingDB) -> Self {
        let mut acc = Dyadic::zero();
        let before = db
            .records()
            .iter()
            .map(|r| {
                let b = acc.clone();
                acc += &r.weight();
                b
            })
            .collect();
        Self { db, before }
    }

    pub fn decode(&self, code: &BitString) -> Option<&'a BitString> {
        let point = Dyadic::from_fraction_bits(code);
        let i = self.before.partition_point(|b| *b <= point).checked_sub(1)?;
        let r = &self.db.records()[i];
        (point < &self.before[i] + &r.weight() && code.len() == r.program.len() + 1).then_some(&r.program)
    }
}
