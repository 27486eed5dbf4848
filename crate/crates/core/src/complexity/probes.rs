use serde::Serialize;

use crate::bits::BitString;
use crate::complexity::{Catalog, Complexity, DbView};
use crate::enumeration::{halting_sequence, Budgets, DbKey, HaltingDB};
use crate::error::Result;

/// Every program producing `w` with length at most `K(w) + slack`, in
/// halting-time order.
pub fn witness_census(db: &HaltingDB, w: &BitString, slack: u32) -> Vec<BitString> {
    let Some(k) = db
        .records()
        .iter()
        .filter(|r| &r.output == w)
        .map(|r| r.program.len())
        .min()
    else {
        return Vec::new();
    };
    db.records()
        .iter()
        .filter(|r| &r.output == w && r.program.len() <= k + slack as usize)
        .map(|r| r.program.clone())
        .collect()
}

/// `K(x) − ⌈−log₂ m(x)⌉` where `m(x)` sums `2^-l(p)` over the programs
/// producing `x`. Never negative, since the witness alone contributes
/// `2^-K(x)`.
pub fn coding_gap(view: &DbView, x: &BitString) -> Option<i64> {
    let stats = view.table.get(x)?;
    let neg_log = stats.mass().neg_log2_ceil().expect("positive mass");
    Some(stats.k_final() as i64 - neg_log)
}

/// `K(x,y) − K(x) − K(y | x*)` with the pair written as the concatenation
/// `xy`. `None` when any term is infinite.
pub fn additivity_check(cat: &Catalog, x: &BitString, y: &BitString) -> Result<Option<i64>> {
    let n = x.len() as u32;
    let base = cat.given(n, &BitString::new())?;
    let Some(x_star) = base.table.witness(x) else {
        return Ok(None);
    };
    let pair = base.k(&x.concat(y));
    let kx = base.k(x);
    let ky = cat.given(n, x_star)?.k(y);
    Ok((|| {
        Some(pair.finite()? as i64 - kx.finite()? as i64 - ky.finite()? as i64)
    })())
}

/// The condition word `H^{n, 2^j}`.
pub fn halting_condition(n: u32, budgets: Budgets, j: u32) -> BitString {
    halting_sequence(&DbKey::plain(n), budgets, 1 << j)
}

/// `K(x | H^{n, 2^j})`.
pub fn k_given_halting(cat: &Catalog, x: &BitString, j: u32) -> Result<Complexity> {
    let n = x.len() as u32;
    let cond = halting_condition(n, cat.budgets, j);
    Ok(cat.given(n, &cond)?.k(x))
}

/// `k_1 = K(x)`, `k_{i+1} = K(x | k_i)` until two consecutive values are
/// within the fixpoint slack.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TetrationTrace {
    pub x: BitString,
    pub values: Vec<Complexity>,
    /// Index (1-based) of the first value reproduced by the next one.
    pub length: Option<usize>,
    pub fixpoint: Option<u32>,
}

pub fn tetration_iterate(
    cat: &Catalog,
    x: &BitString,
    fix_slack: u32,
    max_iter: usize,
) -> Result<TetrationTrace> {
    let n = x.len() as u32;
    let mut values = vec![cat.given(n, &BitString::new())?.k(x)];
    let mut length = None;
    while values.len() <= max_iter {
        let Some(prev) = values.last().and_then(|k| k.finite()) else {
            break;
        };
        let next = cat.given_int(n, prev as u64)?.k(x);
        values.push(next);
        if next
            .diff(Complexity::Finite(prev))
            .is_some_and(|d| d.unsigned_abs() <= fix_slack as u64)
        {
            length = Some(values.len() - 1);
            break;
        }
    }
    let fixpoint = length.map(|i| values[i - 1].finite().expect("finite before convergence"));
    Ok(TetrationTrace {
        x: x.clone(),
        values,
        length,
        fixpoint,
    })
}
