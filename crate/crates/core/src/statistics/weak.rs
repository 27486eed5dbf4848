use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use serde::Serialize;

use crate::bits::BitString;
use crate::complexity::{bb, bb_depth, bb_time, log_bits, Catalog, Complexity};
use crate::dyadic::Dyadic;
use crate::enumeration::PlainTable;
use crate::error::Result;
use crate::statistics::{
    is_typical, is_weak_sufficient, mass, Extension, MachineMode, Model, ModelKind, ModelSpace,
    SufficiencyVerdict, Verdict,
};

/// The semimeasure built from busy-beaver depth `k'` of `x`:
/// `P(y) = 2^{−K_{bb(k')}(y|k') + k' − c}` for every `y` whose own
/// busy-beaver depth is `k'`, else 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PPrime {
    pub x: BitString,
    pub slack: u32,
    pub k_prime: u32,
    /// Smallest non-negative normalizer keeping the mass at most 1.
    pub c: i64,
    pub mass: Dyadic,
    pub contains_x: bool,
    /// Largest `bb(j) < bb(k')` over `j < k'`, and `bb(k')`, as step bounds.
    pub t_prev: Option<u64>,
    pub t_now: u64,
    /// Latest step count at which some `y` in the support first reached its
    /// `K_{bb(k')}(y|k')` value.
    pub slowest_stabilization: u64,
    pub model: Model,
}

/// `None` when `k'_x` is undefined at this budget.
pub fn construct_p_prime(cat: &Catalog, x: &BitString, slack: u32) -> Result<Option<PPrime>> {
    let n = x.len() as u32;
    let Some(k_prime) = bb_depth(cat, x, slack)? else {
        return Ok(None);
    };
    let plain = cat.plain(n)?;
    let view = cat.given_int(n, k_prime as u64)?;
    let t_now = bb_time(plain, k_prime).expect("k' within the sweep");
    let t_prev = (0..k_prime)
        .rev()
        .filter_map(|k| bb_time(plain, k))
        .find(|&t| t < t_now);

    let mut levels = BTreeMap::new();
    let mut slowest = 0;
    for y in BitString::all_of_len(n as usize) {
        let Some(a) = view.k_at(&y, t_now).finite() else {
            continue;
        };
        if bb_depth(cat, &y, slack)? != Some(k_prime) {
            continue;
        }
        let stats = view.table.get(&y).expect("finite complexity has a record");
        let reached = stats
            .history
            .iter()
            .find(|(_, k)| *k <= a)
            .expect("value reached by t_now")
            .0;
        slowest = slowest.max(reached);
        levels.insert(y, k_prime as i64 - a as i64);
    }
    // Σ 2^{e_y − c} <= 1  ⇔  c >= log2 Σ 2^{e_y}.
    let raw: Dyadic = levels.values().map(|&e| Dyadic::pow2(e)).sum();
    let c = match raw.neg_log2_ceil() {
        Some(b) if Dyadic::pow2(-b) < raw => 1 - b,
        Some(b) => -b,
        None => 0,
    }
    .max(0);
    let table: BTreeMap<BitString, Dyadic> = levels
        .into_iter()
        .map(|(y, e)| (y, Dyadic::pow2(e - c)))
        .collect();
    let total = mass(&table);
    assert!(total <= Dyadic::one());
    let champion = plain
        .bb_entry(k_prime)
        .expect("k' within the sweep")
        .champion
        .clone();
    let pad = BitString::repeat(false, (k_prime as usize).saturating_sub(champion.len()));
    let model = Model {
        kind: ModelKind::Semimeasure,
        mode: MachineMode::Plain,
        n,
        program: champion.concat(&pad),
        extension: Extension::Semimeasure(table),
        complexity: Complexity::Finite(k_prime),
        derived: true,
    };
    Ok(Some(PPrime {
        x: x.clone(),
        slack,
        k_prime,
        c,
        mass: total,
        contains_x: model.contains(x),
        t_prev,
        t_now,
        slowest_stabilization: slowest,
        model,
    }))
}

/// One cylinder `S_i = {x^i v : v ∈ 2^{n−i}}` and its weak-sufficiency verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub i: u32,
    pub prefix: BitString,
    pub verdict: SufficiencyVerdict,
}

fn cylinder(x: &BitString, i: usize) -> BTreeSet<BitString> {
    let head = x.prefix(i);
    BitString::all_of_len(x.len() - i)
        .map(|v| head.concat(&v))
        .collect()
}

/// Weak-sufficiency verdicts for the `n + 1` cylinders through `x`. A
/// cylinder with no plain program within budget is out of budget.
pub fn wss_census(cat: &Catalog, space: &ModelSpace, x: &BitString, slack: u32) -> Result<Vec<CensusRow>> {
    let n = x.len();
    (0..=n)
        .map(|i| {
            let set = cylinder(x, i);
            let verdict = match space.plain_set(&set) {
                Some(model) => is_weak_sufficient(cat, x, model, slack)?,
                None => {
                    let missing = Model {
                        kind: ModelKind::Set,
                        mode: MachineMode::Plain,
                        n: n as u32,
                        program: BitString::new(),
                        extension: Extension::Set(set),
                        complexity: Complexity::Infinite,
                        derived: false,
                    };
                    is_weak_sufficient(cat, x, &missing, slack)?
                }
            };
            Ok(CensusRow {
                i: i as u32,
                prefix: x.prefix(i),
                verdict,
            })
        })
        .collect()
}

/// Typicality of every weak sufficient statistic handed in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypicalityCheck {
    pub x: BitString,
    pub slack: u32,
    /// `(weak-sufficiency verdict, typicality verdict)` per model.
    pub rows: Vec<(SufficiencyVerdict, SufficiencyVerdict)>,
    /// Least `c` with every typicality deficiency within `slack + c`;
    /// `None` when nothing was checked or something was out of budget.
    pub c_emp: Option<u32>,
    /// Models whose typicality side is out of budget.
    pub unresolved: usize,
}

impl TypicalityCheck {
    pub fn vacuous(&self) -> bool {
        self.rows.is_empty()
    }
}

/// For each model passing weak sufficiency at `slack`, the extra slack its
/// typicality verdict needs. Needs the views conditioned on each model's
/// program.
pub fn check_wss_is_tm<'a>(
    cat: &Catalog,
    x: &BitString,
    models: impl IntoIterator<Item = &'a Model>,
    slack: u32,
) -> Result<TypicalityCheck> {
    let mut rows = Vec::new();
    let mut c_emp = 0u32;
    let mut unresolved = 0;
    for m in models {
        let wss = is_weak_sufficient(cat, x, m, slack)?;
        if !wss.verdict.passed() {
            continue;
        }
        let tm = is_typical(cat, x, m, slack)?;
        match tm.deficiency {
            Some(d) => c_emp = c_emp.max((d.unsigned_abs() as u32).saturating_sub(slack)),
            None => unresolved += 1,
        }
        let tm = if tm.verdict == Verdict::OutOfBudget {
            tm
        } else {
            tm.at_slack(slack + c_emp)
        };
        rows.push((wss, tm));
    }
    let c_emp = (!rows.is_empty() && unresolved == 0).then_some(c_emp);
    Ok(TypicalityCheck {
        x: x.clone(),
        slack,
        rows,
        c_emp,
        unresolved,
    })
}

/// How far back a busy-beaver time bound can reach while still exhibiting
/// the `k`-bit maximum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BbTimeProbe {
    pub k: u32,
    pub bb: String,
    /// Steps taken by the fastest program reaching `bb(k)`.
    pub champion_steps: u64,
    /// Least `c` with `bb(k − c)` steps enough; `Some(0)` whenever the
    /// champion halts within `bb(k)` steps.
    pub min_slack: Option<u32>,
    /// Largest `c <= k` with `bb(k − c)` steps enough.
    pub max_lookback: Option<u32>,
}

pub fn bb_time_probe(plain: &PlainTable, k: u32) -> Option<BbTimeProbe> {
    let entry = plain.bb_entry(k)?;
    let steps = entry.champion_steps;
    let enough = |j: u32| bb(plain, j).is_some_and(|v| v >= BigUint::from(steps));
    Some(BbTimeProbe {
        k,
        bb: entry.value.to_nat_big().to_string(),
        champion_steps: steps,
        min_slack: (0..=k).find(|&c| enough(k - c)),
        max_lookback: (0..=k).rev().find(|&c| enough(k - c)),
    })
}

/// `h_x(α)`: least `log|S|` over prefix set models containing `x` with
/// `K(S) <= α`, for `α = 0..=max_alpha`.
pub fn structure_sweep(space: &ModelSpace, x: &BitString, max_alpha: u32) -> Vec<(u32, Option<u32>)> {
    let mut best: Option<u32> = None;
    let mut models = space.prefix_sets.iter().filter(|m| m.contains(x)).peekable();
    (0..=max_alpha)
        .map(|alpha| {
            while let Some(m) = models.next_if(|m| m.complexity <= Complexity::Finite(alpha)) {
                let Extension::Set(s) = &m.extension else {
                    unreachable!()
                };
                let l = log_bits(s.len() as u64);
                best = Some(best.map_or(l, |b| b.min(l)));
            }
            (alpha, best)
        })
        .collect()
}
