//! Budget-relativized algorithmic statistics on a tiny universal machine.
//!
//! Everything here is exact: halting masses and semimeasure values are
//! dyadic rationals, complexities are whole bits, and every quantity that is
//! uncomputable in the limit is evaluated under explicit step and
//! program-length budgets.

pub mod bits;
pub mod complexity;
pub mod dyadic;
pub mod enumeration;
pub mod error;
pub mod lab;
pub mod machine;
pub mod statistics;

pub use bits::BitString;
pub use complexity::{Catalog, Complexity};
pub use dyadic::Dyadic;
pub use enumeration::{Budgets, DbKey, HaltRecord, HaltingDB, PlainTable};
pub use error::{LabError, Result};
