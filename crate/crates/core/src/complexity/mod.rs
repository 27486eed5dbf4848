//! Budgeted complexity measures read off halting databases.

mod catalog;
mod depth;
mod probes;
mod table;

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::error::{LabError, Result};

pub use catalog::{Catalog, DbView, FUNCTION_DOMAIN_MAX};
pub use depth::{bb, bb_depth, bb_time, m_depth, DepthProfile};
pub use probes::{
    additivity_check, coding_gap, halting_condition, k_given_halting, tetration_iterate, witness_census,
    TetrationTrace,
};
pub use table::{ComplexityTable, OutputStats};

/// A budgeted complexity: a bit count, or explicitly infinite when no
/// program within budget produces the string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Complexity {
    Finite(u32),
    Infinite,
}

impl Complexity {
    pub fn finite(self) -> Option<u32> {
        match self {
            Complexity::Finite(k) => Some(k),
            Complexity::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Complexity::Finite(_))
    }

    /// `self − other` when both are finite.
    pub fn diff(self, other: Complexity) -> Option<i64> {
        Some(self.finite()? as i64 - other.finite()? as i64)
    }

    /// `self <= other + slack`, with every value below infinity.
    pub fn at_most(self, other: Complexity, slack: u32) -> bool {
        match (self, other) {
            (_, Complexity::Infinite) => true,
            (Complexity::Infinite, _) => false,
            (Complexity::Finite(a), Complexity::Finite(b)) => a <= b + slack,
        }
    }
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Complexity::Finite(k) => write!(f, "{k}"),
            Complexity::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Complexity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Complexity::Finite(k) => s.serialize_u32(*k),
            Complexity::Infinite => s.serialize_str("inf"),
        }
    }
}

/// `log k` as a whole number of bits: `⌈log₂ max(k, 1)⌉`.
pub fn log_bits(k: u64) -> u32 {
    if k <= 1 {
        0
    } else {
        64 - (k - 1).leading_zeros()
    }
}

/// `slog v = max{k : ²k <= v}` over the tower `1, 2, 4, 16, 65536, …`.
pub fn slog(v: &BigUint) -> Result<u32> {
    if v.bits() == 0 {
        return Err(LabError::Domain("slog is undefined at 0".into()));
    }
    let mut tower = BigUint::one();
    let mut k = 0;
    loop {
        // The next tower value is 2^tower; it exceeds v once tower >= bits(v).
        let next_exceeds = match tower.to_u64() {
            Some(t) => t >= v.bits(),
            None => true,
        };
        if next_exceeds {
            return Ok(k);
        }
        tower = BigUint::one() << tower.to_u64().expect("checked above");
        k += 1;
    }
}

/// One row of the complexity CSV report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplexityRow {
    pub quantity: String,
    pub n: u32,
    pub x: String,
    pub slack: u32,
    pub value: String,
    pub witness: String,
}

pub const COMPLEXITY_CSV_HEADER: &str = "quantity,n,x,slack,value,witness";

impl ComplexityRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.quantity, self.n, self.x, self.slack, self.value, self.witness
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slog_u(v: u64) -> u32 {
        slog(&BigUint::from(v)).unwrap()
    }

    #[test]
    fn slog_tower() {
        assert_eq!(slog_u(1), 0);
        assert_eq!(slog_u(2), 1);
        assert_eq!(slog_u(3), 1);
        assert_eq!(slog_u(4), 2);
        assert_eq!(slog_u(15), 2);
        assert_eq!(slog_u(16), 3);
        assert_eq!(slog_u(65535), 3);
        assert_eq!(slog_u(65536), 4);
        assert_eq!(slog(&(BigUint::one() << 70000usize)).unwrap(), 5);
        assert!(slog(&BigUint::from(0u32)).is_err());
    }

    #[test]
    fn slog_matches_naive_tower() {
        let tower = [1u64, 2, 4, 16, 65536];
        for v in 1..200_000u64 {
            let naive = tower.iter().rposition(|&t| t <= v).unwrap() as u32;
            assert_eq!(slog_u(v), naive, "v={v}");
        }
    }

    #[test]
    fn log_bits_rounds_up() {
        let cases = [
            (0, 0),
            (1, 0),
            (2, 1),
            (3, 2),
            (4, 2),
            (5, 3),
            (8, 3),
            (9, 4),
            (24, 5),
        ];
        for (k, want) in cases {
            assert_eq!(log_bits(k), want, "k={k}");
        }
    }

    #[test]
    fn infinity_is_explicit() {
        use Complexity::*;
        assert!(Finite(3) < Infinite);
        assert_eq!(Infinite.diff(Finite(2)), None);
        assert_eq!(Finite(5).diff(Finite(7)), Some(-2));
        assert!(Finite(9).at_most(Infinite, 0));
        assert!(!Infinite.at_most(Finite(9), 100));
        assert!(Finite(9).at_most(Finite(7), 2));
        assert!(!Finite(10).at_most(Finite(7), 2));
        assert_eq!(Infinite.to_string(), "inf");
    }
}
