use std::fmt;

use serde::Serialize;

use crate::bits::BitString;
use crate::complexity::{Catalog, Complexity};
use crate::error::Result;
use crate::statistics::{MachineMode, Model, ModelKind};

/// Which balance a verdict checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Definition {
    /// `K(Z) + log term` against `K(x)`.
    Ss,
    /// `C(Z) + log term` against `K(x | C(Z))`.
    Wss,
    /// `log term` against `K(x | Z*)`.
    Tm,
}

impl Definition {
    /// Machine mode whose complexity the definition charges.
    pub fn mode(self) -> MachineMode {
        match self {
            Definition::Ss => MachineMode::Prefix,
            Definition::Wss | Definition::Tm => MachineMode::Plain,
        }
    }
}

impl fmt::Display for Definition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Definition::Ss => "ss",
            Definition::Wss => "wss",
            Definition::Tm => "tm",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Sufficient,
    NotSufficient,
    /// `x` is outside the model's support; the balance is undefined.
    NotInSupport,
    /// A complexity on either side is infinite at this budget.
    OutOfBudget,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Sufficient
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Sufficient => "sufficient",
            Verdict::NotSufficient => "not-sufficient",
            Verdict::NotInSupport => "not-in-support",
            Verdict::OutOfBudget => "out-of-budget",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SufficiencyVerdict {
    pub defn: Definition,
    pub kind: ModelKind,
    pub n: u32,
    pub x: BitString,
    pub slack: u32,
    pub complexity: Complexity,
    pub log_term: Option<u32>,
    pub lhs: Option<i64>,
    pub rhs: Complexity,
    pub verdict: Verdict,
    /// `lhs − rhs` when both are finite.
    pub deficiency: Option<i64>,
}

pub const VERDICT_CSV_HEADER: &str = "defn,kind,n,x,slack,complexity,logterm,rhs,verdict,deficiency";

fn opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

impl SufficiencyVerdict {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.defn,
            self.kind,
            self.n,
            self.x.to_field(),
            self.slack,
            self.complexity,
            opt(self.log_term),
            self.rhs,
            self.verdict,
            opt(self.deficiency)
        )
    }

    /// Same evaluation at another slack.
    pub fn at_slack(&self, slack: u32) -> Self {
        let verdict = match (self.verdict, self.deficiency) {
            (Verdict::Sufficient | Verdict::NotSufficient, Some(d)) => {
                if d.unsigned_abs() <= slack as u64 {
                    Verdict::Sufficient
                } else {
                    Verdict::NotSufficient
                }
            }
            (v, _) => v,
        };
        Self {
            slack,
            verdict,
            ..self.clone()
        }
    }
}

/// Evaluates one definition for `(x, model)`. Needs the unconditioned view
/// (SS), the view conditioned on `C(Z)` (WSS) or on the model program (TM).
pub fn judge(
    cat: &Catalog,
    x: &BitString,
    model: &Model,
    defn: Definition,
    slack: u32,
) -> Result<SufficiencyVerdict> {
    let n = x.len() as u32;
    let log_term = model.log_term(x);
    let mut v = SufficiencyVerdict {
        defn,
        kind: model.kind,
        n,
        x: x.clone(),
        slack,
        complexity: model.complexity,
        log_term,
        lhs: None,
        rhs: Complexity::Infinite,
        verdict: Verdict::NotInSupport,
        deficiency: None,
    };
    let Some(log_term) = log_term else {
        return Ok(v);
    };
    let charged = match defn {
        Definition::Ss | Definition::Wss => model.complexity.finite(),
        Definition::Tm => Some(0),
    };
    let Some(charged) = charged else {
        v.verdict = Verdict::OutOfBudget;
        return Ok(v);
    };
    let lhs = charged as i64 + log_term as i64;
    v.lhs = Some(lhs);
    v.rhs = match defn {
        Definition::Ss => cat.given(n, &BitString::new())?.k(x),
        Definition::Wss => cat.given_int(n, charged as u64)?.k(x),
        Definition::Tm => cat.given(n, &model.program)?.k(x),
    };
    match v.rhs.finite() {
        None => v.verdict = Verdict::OutOfBudget,
        Some(r) => {
            let d = lhs - r as i64;
            v.deficiency = Some(d);
            v.verdict = if d.unsigned_abs() <= slack as u64 {
                Verdict::Sufficient
            } else {
                Verdict::NotSufficient
            };
        }
    }
    Ok(v)
}

pub fn is_sufficient(cat: &Catalog, x: &BitString, model: &Model, slack: u32) -> Result<SufficiencyVerdict> {
    judge(cat, x, model, Definition::Ss, slack)
}

pub fn is_weak_sufficient(
    cat: &Catalog,
    x: &BitString,
    model: &Model,
    slack: u32,
) -> Result<SufficiencyVerdict> {
    judge(cat, x, model, Definition::Wss, slack)
}

pub fn is_typical(cat: &Catalog, x: &BitString, model: &Model, slack: u32) -> Result<SufficiencyVerdict> {
    judge(cat, x, model, Definition::Tm, slack)
}

/// Outcome of a minimal-model search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum Found {
    Model {
        model: Box<Model>,
        verdict: SufficiencyVerdict,
        /// Complexity plus log term of the model found.
        l: u32,
    },
    NoModel {
        scanned: usize,
        /// Largest complexity scanned.
        frontier: Complexity,
    },
}

impl Found {
    pub fn model(&self) -> Option<&Model> {
        match self {
            Found::Model { model, .. } => Some(model),
            Found::NoModel { .. } => None,
        }
    }

    pub fn l(&self) -> Option<u32> {
        match self {
            Found::Model { l, .. } => Some(*l),
            Found::NoModel { .. } => None,
        }
    }
}

/// First candidate in scan order (complexity, then program) that passes.
/// Candidates of another kind or mode are skipped.
pub fn search_minimal<'a>(
    cat: &Catalog,
    x: &BitString,
    kind: ModelKind,
    defn: Definition,
    slack: u32,
    candidates: impl IntoIterator<Item = &'a Model>,
) -> Result<Found> {
    let mut pool: Vec<&Model> = candidates
        .into_iter()
        .filter(|m| m.kind == kind && m.mode == defn.mode())
        .collect();
    pool.sort_by(|a, b| a.scan_key().cmp(&b.scan_key()));
    let mut frontier = Complexity::Finite(0);
    for m in &pool {
        if !m.contains(x) {
            continue;
        }
        frontier = frontier.max(m.complexity);
        let v = judge(cat, x, m, defn, slack)?;
        if v.verdict.passed() {
            let l = v.lhs.expect("passing verdicts have a finite side") as u32;
            let l = match defn {
                Definition::Tm => l + m.complexity.finite().unwrap_or(0),
                _ => l,
            };
            return Ok(Found::Model {
                model: Box::new((*m).clone()),
                verdict: v,
                l,
            });
        }
    }
    Ok(Found::NoModel {
        scanned: pool.len(),
        frontier,
    })
}
