//! Finite binary words and the natural-number association
//! `ε → 0, 0 → 1, 1 → 2, 00 → 3, …`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::error::ParseError;

/// A finite binary word. The empty word is valid.
///
/// Bits are packed most-significant first into 64-bit words, so words of up
/// to 64 bits need no heap allocation. Bits past `len` are always zero.
///
/// The ordering is plain lexicographic (a proper prefix sorts first).
/// Use [`BitString::nat_cmp`] for the length-then-lexicographic order that
/// matches the natural-number association.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: SmallVec<[u64; 1]>,
}

#[inline]
fn mask_top(bits: usize) -> u64 {
    match bits {
        0 => 0,
        64.. => u64::MAX,
        b => !(u64::MAX >> b),
    }
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        bits.into_iter().collect()
    }

    /// `len` copies of `bit`.
    pub fn repeat(bit: bool, len: usize) -> Self {
        let mut out = Self::new();
        for _ in 0..len {
            out.push(bit);
        }
        out
    }

    /// The `width`-bit big-endian binary representation of `value`.
    pub fn from_uint(value: u64, width: usize) -> Self {
        (0..width)
            .rev()
            .map(|i| i < 64 && (value >> i) & 1 == 1)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| self.words[i / 64] >> (63 - i % 64) & 1 == 1)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.words[i / 64] >> (63 - i % 64) & 1 == 1)
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (63 - self.len % 64);
        }
        self.len += 1;
    }

    pub fn extend_from(&mut self, other: &BitString) {
        for b in other.iter() {
            self.push(b);
        }
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    /// The first `len` bits (`x^len`); the whole word if shorter.
    pub fn prefix(&self, len: usize) -> BitString {
        let len = len.min(self.len);
        let mut words: SmallVec<[u64; 1]> = self.words[..len.div_ceil(64)].into();
        if !len.is_multiple_of(64) {
            *words.last_mut().expect("nonempty") &= mask_top(len % 64);
        }
        Self { len, words }
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        assert!(
            start <= end && end <= self.len,
            "slice {start}..{end} of {}",
            self.len
        );
        (start..end).map(|i| self.get(i).expect("in range")).collect()
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.len <= other.len && other.prefix(self.len) == *self
    }

    /// Splits into consecutive blocks of `width` bits. `None` unless the
    /// length is a multiple of `width`.
    pub fn blocks(&self, width: usize) -> Option<Vec<BitString>> {
        if width == 0 || !self.len.is_multiple_of(width) {
            return None;
        }
        Some(
            (0..self.len / width)
                .map(|i| self.slice(i * width, (i + 1) * width))
                .collect(),
        )
    }

    /// Big-endian value of the bits, ignoring length. `None` past 64 bits.
    pub fn to_uint(&self) -> Option<u64> {
        match self.len {
            0 => Some(0),
            1..=64 => Some(self.words[0] >> (64 - self.len)),
            _ => None,
        }
    }

    /// Natural-number index: `2^len − 1 + value`. `None` for words of 64 bits or more.
    pub fn to_nat(&self) -> Option<u64> {
        if self.len >= 64 {
            return None;
        }
        Some((1u64 << self.len) - 1 + self.to_uint()?)
    }

    /// Natural-number index without a length limit.
    pub fn to_nat_big(&self) -> BigUint {
        let mut value = BigUint::zero();
        for b in self.iter() {
            value <<= 1u32;
            if b {
                value += 1u32;
            }
        }
        (BigUint::one() << self.len) - 1u32 + value
    }

    /// Inverse of [`BitString::to_nat`].
    pub fn from_nat(index: u64) -> BitString {
        // Words of length L occupy [2^L − 1, 2^(L+1) − 1).
        let shifted = index as u128 + 1;
        let len = 127 - shifted.leading_zeros() as usize;
        let value = (shifted - (1u128 << len)) as u64;
        Self::from_uint(value, len)
    }

    /// Compares by natural-number index: shorter words first, then lexicographic.
    pub fn nat_cmp(&self, other: &BitString) -> Ordering {
        self.len.cmp(&other.len).then_with(|| self.cmp(other))
    }

    /// `"-"` for the empty word, the digits otherwise. Used by the line formats.
    pub fn to_field(&self) -> String {
        if self.is_empty() {
            "-".to_string()
        } else {
            self.to_string()
        }
    }

    pub fn from_field(field: &str) -> Result<BitString, ParseError> {
        if field == "-" {
            Ok(BitString::new())
        } else {
            field.parse()
        }
    }

    /// All words of length `len` in lexicographic order.
    pub fn all_of_len(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64, "enumerating 2^{len} words");
        (0..1u64 << len).map(move |v| BitString::from_uint(v, len))
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut out = BitString::new();
        for b in iter {
            out.push(b);
        }
        out
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        let common = self.len.min(other.len);
        for i in 0..common.div_ceil(64) {
            let mask = mask_top(common - 64 * i);
            let ord = (self.words[i] & mask).cmp(&(other.words[i] & mask));
            if ord.is_ne() {
                return ord;
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits: Vec<u8> = self.iter().map(|b| if b { b'1' } else { b'0' }).collect();
        f.write_str(std::str::from_utf8(&digits).expect("ascii digits"))
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("ε")
        } else {
            write!(f, "{self}")
        }
    }
}

impl FromStr for BitString {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut words = SmallVec::new();
        for chunk in s.as_bytes().chunks(64) {
            let mut w = 0u64;
            for &b in chunk {
                w = match b {
                    b'0' => w << 1,
                    b'1' => w << 1 | 1,
                    _ => {
                        let bad = char::from(b);
                        return Err(ParseError::new(format!("invalid bit {bad:?} in {s:?}")));
                    }
                };
            }
            words.push(w << (64 - chunk.len()));
        }
        Ok(BitString { len: s.len(), words })
    }
}

impl serde::Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// True when no word is a prefix of (or equal to) another.
pub fn is_prefix_free<'a>(words: impl IntoIterator<Item = &'a BitString>) -> bool {
    let mut sorted: Vec<&BitString> = words.into_iter().collect();
    sorted.sort();
    // In lexicographic order a prefix violation always shows up between neighbours.
    sorted.windows(2).all(|w| !w[0].is_prefix_of(w[1]))
}

/// Shorthand for tests and examples: `bs("0101")`. Panics on bad input.
pub fn bs(s: &str) -> BitString {
    s.parse().expect("bit string literal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn nat_association_origin() {
        assert_eq!(bs("").to_nat(), Some(0));
        assert_eq!(bs("0").to_nat(), Some(1));
        assert_eq!(bs("1").to_nat(), Some(2));
        assert_eq!(bs("00").to_nat(), Some(3));
        assert_eq!(BitString::from_nat(0), BitString::new());
    }

    #[test]
    fn nat_association_length_three() {
        // 3..=6 are the length-2 words, 7..=14 the length-3 words.
        let expect = ["00", "01", "10", "11"];
        for (i, w) in expect.iter().enumerate() {
            assert_eq!(bs(w).to_nat(), Some(3 + i as u64));
        }
        assert_eq!(bs("000").to_nat(), Some(7));
        assert_eq!(bs("111").to_nat(), Some(14));
        assert_eq!(BitString::from_nat(14), bs("111"));
    }

    #[test]
    fn big_nat_agrees_with_small() {
        for i in 0..2000u64 {
            let w = BitString::from_nat(i);
            assert_eq!(w.to_nat_big(), BigUint::from(i));
        }
        let long = BitString::repeat(true, 80);
        assert_eq!(long.to_nat(), None);
        assert_eq!(long.to_nat_big(), (BigUint::one() << 81usize) - 2u32);
    }

    #[test]
    fn field_form_uses_dash_for_empty() {
        assert_eq!(BitString::new().to_field(), "-");
        assert_eq!(BitString::from_field("-").unwrap(), BitString::new());
        assert_eq!(BitString::from_field("0110").unwrap(), bs("0110"));
        assert!(BitString::from_field("01a").is_err());
    }

    #[test]
    fn blocks_require_exact_multiple() {
        assert_eq!(bs("0001").blocks(2), Some(vec![bs("00"), bs("01")]));
        assert_eq!(bs("000").blocks(2), None);
        assert_eq!(bs("").blocks(2), Some(vec![]));
    }

    #[test]
    fn prefix_free_detection() {
        let words = [bs("0"), bs("10"), bs("110")];
        assert!(is_prefix_free(words.iter()));
        let words = [bs("0"), bs("10"), bs("101")];
        assert!(!is_prefix_free(words.iter()));
        let words = [bs("01"), bs("01")];
        assert!(!is_prefix_free(words.iter()));
    }

    proptest! {
        #[test]
        fn nat_codec_round_trips(bits in proptest::collection::vec(any::<bool>(), 0..60)) {
            let w = BitString::from_bits(bits);
            let i = w.to_nat().unwrap();
            prop_assert_eq!(BitString::from_nat(i), w);
        }

        #[test]
        fn packed_order_is_lexicographic(
            a in proptest::collection::vec(any::<bool>(), 0..150),
            b in proptest::collection::vec(any::<bool>(), 0..150),
        ) {
            let (wa, wb) = (BitString::from_bits(a.clone()), BitString::from_bits(b.clone()));
            prop_assert_eq!(wa.cmp(&wb), a.cmp(&b));
            prop_assert_eq!(wa == wb, a == b);
            prop_assert_eq!(wa.is_prefix_of(&wb), b.starts_with(&a));
            let cut = a.len() / 2;
            prop_assert_eq!(wa.prefix(cut), BitString::from_bits(a[..cut].to_vec()));
            prop_assert_eq!(wa.iter().collect::<Vec<_>>(), a);
        }

        #[test]
        fn nat_cmp_matches_index_order(a in 0u64..100_000, b in 0u64..100_000) {
            let (wa, wb) = (BitString::from_nat(a), BitString::from_nat(b));
            prop_assert_eq!(wa.nat_cmp(&wb), a.cmp(&b));
        }
    }
}
