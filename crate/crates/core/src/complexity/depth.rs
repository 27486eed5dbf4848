use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::bits::BitString;
use crate::complexity::{Catalog, Complexity, DbView};
use crate::enumeration::PlainTable;
use crate::error::Result;

/// Busy-beaver value for `k`-bit plain programs, as the natural number of
/// the largest output. `None` past the plain sweep.
pub fn bb(plain: &PlainTable, k: u32) -> Option<BigUint> {
    plain.bb_entry(k).map(|e| e.value.to_nat_big())
}

/// `bb(k)` used as a step bound, capped at the step budget.
pub fn bb_time(plain: &PlainTable, k: u32) -> Option<u64> {
    let cap = plain.budgets.max_steps;
    bb(plain, k).map(|v| v.to_u64().map_or(cap, |v| v.min(cap)))
}

/// `k_x`: least `k` with `K_{t_k}(x) <= K(x) + slack`. `None` when `K(x)`
/// is infinite at this budget.
pub fn m_depth(view: &DbView, x: &BitString, slack: u32) -> Option<u32> {
    let k = view.k(x);
    k.finite()?;
    let last = view.omega.last().expect("nonempty checkpoints").0;
    for j in 0.. {
        let t = view.t_k(j);
        if view.k_at(x, t).at_most(k, slack) {
            return Some(j);
        }
        if t == last {
            return None;
        }
    }
    unreachable!()
}

/// `k'_x`: least `k` with `K_{bb(k)}(x | k) <= K(x | k) + slack` and
/// `K(x | k)` finite, over `k` within the plain sweep and the catalog's
/// depth cap.
pub fn bb_depth(cat: &Catalog, x: &BitString, slack: u32) -> Result<Option<u32>> {
    let n = x.len() as u32;
    let plain = cat.plain(n)?;
    let top = cat
        .depth_cap
        .map_or(plain.max_bits(), |c| c.min(plain.max_bits()));
    for k in 0..=top {
        let view = cat.given_int(n, k as u64)?;
        let full = view.k(x);
        let t = bb_time(plain, k).expect("k within the sweep");
        if full.is_finite() && view.k_at(x, t).at_most(full, slack) {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthProfile {
    pub x: BitString,
    pub slack_c: u32,
    pub k: Complexity,
    pub k_x: Option<u32>,
    /// `t_k` for `k = 0..=k_x`.
    pub t_k_list: BTreeMap<u32, u64>,
    pub kprime_x: Option<u32>,
    /// `bb(k)` for `k = 0..=k'_x`, as decimal strings.
    pub bb_values: BTreeMap<u32, String>,
}

impl DepthProfile {
    pub fn compute(cat: &Catalog, x: &BitString, slack: u32) -> Result<Self> {
        let n = x.len() as u32;
        let view = cat.given(n, &BitString::new())?;
        let k_x = m_depth(view, x, slack);
        let t_k_list = (0..=k_x.unwrap_or(0)).map(|k| (k, view.t_k(k))).collect();
        let kprime_x = bb_depth(cat, x, slack)?;
        let plain = cat.plain(n)?;
        let bb_values = (0..=kprime_x.unwrap_or(plain.max_bits()))
            .filter_map(|k| bb(plain, k).map(|v| (k, v.to_string())))
            .collect();
        Ok(Self {
            x: x.clone(),
            slack_c: slack,
            k: view.k(x),
            k_x,
            t_k_list,
            kprime_x,
            bb_values,
        })
    }
}
