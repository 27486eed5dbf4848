use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;

use num_bigint::BigUint;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::{is_prefix_free, BitString};
use crate::complexity::{
    additivity_check, bb, coding_gap, k_given_halting, log_bits, m_depth, slog, tetration_iterate,
    witness_census, Complexity,
};
use crate::dyadic::Dyadic;
use crate::enumeration::{beta_code, enumerate_domain, BetaDecoder, Budgets};
use crate::error::Result;
use crate::lab::Lab;
use crate::statistics::{
    bb_time_probe, check_wss_is_tm, construct_p_prime, func_to_measure, func_to_set, is_typical,
    is_weak_sufficient, mass, search_minimal, structure_sweep, wss_census, Definition, Extension, Found,
    Model, ModelKind, ModelSpace, PPrime, ShannonFanoCode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimStatus {
    Pass,
    Fail,
    /// Nothing at this budget satisfies the claim's premise.
    Vacuous,
    /// Measured table without a pass/fail criterion.
    Info,
}

impl ClaimStatus {
    pub fn label(self) -> &'static str {
        match self {
            ClaimStatus::Pass => "pass",
            ClaimStatus::Fail => "FAIL",
            ClaimStatus::Vacuous => "vacuous",
            ClaimStatus::Info => "info",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimResult {
    pub id: String,
    pub anchor: String,
    pub primary: bool,
    pub status: ClaimStatus,
    /// Measured minimal constant or slack, when the claim has one.
    pub constant: Option<i64>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
}

impl ClaimResult {
    /// `pass c=…`, `FAIL`, `vacuous` or `info`.
    pub fn summary(&self) -> String {
        match (self.status, self.constant) {
            (ClaimStatus::Pass, Some(c)) => format!("pass c={c}"),
            (s, _) => s.label().to_string(),
        }
    }
}

/// `(id, anchor, primary)` for every claim, in report order.
pub const CLAIMS: &[(&str, &str, bool)] = &[
    (
        "kraft.prefix-free",
        "Σ_{p ∈ dom Φ} 2^{-l(p)} ≤ 1 with dom Φ prefix-free",
        true,
    ),
    (
        "convergence.monotone",
        "K_t(x) non-increasing and Ω_t non-decreasing in t; smaller budgets restrict larger",
        true,
    ),
    ("omega.decode", "Ω^{n,j} decides Φ(p)↓ for l(p) < j − c", true),
    ("omega.prefix-complexity", "K(Ω^{n,j} | n) ≥ j − c", true),
    ("beta.code", "p ↦ β_p injective with prefix-free image", true),
    (
        "beta.residual",
        "K(x) − k_x − K(x | Ω^{n,k_x}) ≤ 2 log k_x + c",
        true,
    ),
    (
        "converters.shannon-fano",
        "code(y) prefix-free, injective, l(code(y)) ≤ ⌈−log P(y)⌉ + 1",
        true,
    ),
    (
        "converters.func-to-measure",
        "P(y) = max{2^{−l(d)−1} : F(d) = y}, Σ_y P(y) ≤ 1",
        true,
    ),
    ("sets.depth-bound", "l^S_x ≥ k_x − 2 log k_x − c", true),
    (
        "sets.half-complexity",
        "K(x) = n/2 ⇒ l^P_x ≥ l^S_x − c and log|S^F| ≤ n/2 − l^F_x + c",
        false,
    ),
    ("weak.p-prime-mass", "Σ_y P'_x(y) ≤ 1", true),
    (
        "weak.p-prime-sufficient",
        "C(P'_x) − log P'_x(x) = K(x | C(P'_x)) ± s",
        true,
    ),
    (
        "weak.sufficient-is-typical",
        "C(Z) + log-term(Z) = K(x | C(Z)) ± s ⇒ log-term(Z) = K(x | Z*) ± (s + c)",
        true,
    ),
    (
        "weak.typical-complexity",
        "log-term(P) = K(x | P*) ± s ⇒ C(P) ≥ k'_x − c",
        true,
    ),
    ("weak.depth-relation", "|k'_x − k_{x|k'_x}| ≤ c", true),
    (
        "weak.bb-time",
        "running k-bit programs for bb(k − c) steps exhibits bb(k)",
        true,
    ),
    (
        "weak.cylinder-census",
        "#{i ≤ n : S_i = x^i 2^{n−i} weak sufficient} ≥ ρ n",
        false,
    ),
    ("weak.p-prime-typical", "−log P'_x(x) = K(x | P'_x*) ± c", false),
    (
        "weak.stabilization",
        "slowest stabilization in supp P'_x ≥ bb(k'_x − c)",
        false,
    ),
    (
        "tetration.trace",
        "len(k_1, k_2, …) ≤ slog x + c and |k_∞ − C(x)| ≤ c′",
        true,
    ),
    (
        "complexity.coding-gap",
        "K(x) − ⌈−log Σ_{Φ(p)=x} 2^{−l(p)}⌉ ≤ c",
        false,
    ),
    (
        "complexity.witness-census",
        "#{p : Φ(p) = w, l(p) ≤ K(w) + s} ≤ c",
        false,
    ),
    ("complexity.additivity", "K(x, y) = K(x) + K(y | x*) ± c", false),
    (
        "complexity.halting-information",
        "K(x) − K(x | H) ≥ k_x − 2 log k_x − c",
        false,
    ),
    ("complexity.plain-prefix", "C(x) = K(x | C(x)) ± c", false),
    ("sets.structure", "h_x(α) = min{log|S| : x ∈ S, K(S) ≤ α}", false),
];

pub fn claim_ids() -> impl Iterator<Item = &'static str> {
    CLAIMS.iter().map(|(id, _, _)| *id)
}

fn s<T: Display>(v: T) -> String {
    v.to_string()
}

fn o<T: Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn log_k(k: u32) -> i64 {
    log_bits(k as u64) as i64
}

/// Shared per-run state: model spaces and `P'_x` per string.
pub(crate) struct Ctx<'a> {
    pub lab: &'a Lab,
    spaces: BTreeMap<u32, ModelSpace>,
    p_primes: BTreeMap<BitString, Option<PPrime>>,
}

impl<'a> Ctx<'a> {
    pub fn new(lab: &'a Lab) -> Result<Self> {
        let cat = &lab.catalog;
        let c = &lab.config;
        let mut spaces = BTreeMap::new();
        let mut p_primes = BTreeMap::new();
        for n in c.lengths() {
            spaces.insert(n, ModelSpace::build(cat, n, c.width(n))?);
            for x in BitString::all_of_len(n as usize) {
                let p = construct_p_prime(cat, &x, c.depth_slack)?;
                p_primes.insert(x, p);
            }
        }
        Ok(Self {
            lab,
            spaces,
            p_primes,
        })
    }

    fn space(&self, n: u32) -> &ModelSpace {
        &self.spaces[&n]
    }

    fn base_k(&self, x: &BitString) -> Result<Complexity> {
        Ok(self.lab.catalog.given(x.len() as u32, &BitString::new())?.k(x))
    }

    fn k_x(&self, x: &BitString) -> Result<Option<u32>> {
        let view = self.lab.catalog.given(x.len() as u32, &BitString::new())?;
        Ok(m_depth(view, x, self.lab.config.depth_slack))
    }

    /// Strings of length `n` with finite `K` at the budget, and the count left out.
    fn resolved(&self, n: u32) -> Result<(Vec<BitString>, usize)> {
        let mut keep = Vec::new();
        let mut dropped = 0;
        for x in BitString::all_of_len(n as usize) {
            if self.base_k(&x)?.is_finite() {
                keep.push(x);
            } else {
                dropped += 1;
            }
        }
        Ok((keep, dropped))
    }

    fn p_prime(&self, x: &BitString) -> Option<&PPrime> {
        self.p_primes.get(x).and_then(Option::as_ref)
    }

    fn result(&self, id: &str) -> ClaimResult {
        let &(id, anchor, primary) = CLAIMS.iter().find(|(i, _, _)| *i == id).expect("known claim");
        ClaimResult {
            id: id.to_string(),
            anchor: anchor.to_string(),
            primary,
            status: ClaimStatus::Info,
            constant: None,
            columns: Vec::new(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn slack_max(&self) -> i64 {
        self.lab.config.slack_max as i64
    }

    /// Smallest slack in range covering every deficiency.
    fn min_slack(&self, deficiencies: impl IntoIterator<Item = i64>) -> Option<i64> {
        let worst = deficiencies.into_iter().map(i64::abs).max().unwrap_or(0);
        let c = &self.lab.config;
        (c.slack_min as i64..=c.slack_max as i64).find(|&s| s >= worst)
    }

    pub fn run(&self, id: &str) -> Result<ClaimResult> {
        match id {
            "kraft.prefix-free" => self.kraft(),
            "convergence.monotone" => self.monotone(),
            "omega.decode" => self.omega_decode(),
            "omega.prefix-complexity" => self.omega_prefix_complexity(),
            "beta.code" => self.beta_code(),
            "beta.residual" => self.beta_residual(),
            "converters.shannon-fano" => self.shannon_fano(),
            "converters.func-to-measure" => self.func_to_measure(),
            "sets.depth-bound" => self.depth_bound(),
            "sets.half-complexity" => self.half_complexity(),
            "weak.p-prime-mass" => self.p_prime_mass(),
            "weak.p-prime-sufficient" => self.p_prime_sufficient(),
            "weak.sufficient-is-typical" => self.sufficient_is_typical(),
            "weak.typical-complexity" => self.typical_complexity(),
            "weak.depth-relation" => self.depth_relation(),
            "weak.bb-time" => self.bb_time(),
            "weak.cylinder-census" => self.cylinder_census(),
            "weak.p-prime-typical" => self.p_prime_typical(),
            "weak.stabilization" => self.stabilization(),
            "tetration.trace" => self.tetration(),
            "complexity.coding-gap" => self.coding_gap(),
            "complexity.witness-census" => self.witness_census(),
            "complexity.additivity" => self.additivity(),
            "complexity.halting-information" => self.halting_information(),
            "complexity.plain-prefix" => self.plain_prefix(),
            "sets.structure" => self.structure(),
            other => Err(crate::error::LabError::Config(format!("unknown claim {other:?}"))),
        }
    }

    fn kraft(&self) -> Result<ClaimResult> {
        let mut r = self.result("kraft.prefix-free");
        r.columns = cols(&["n", "condition", "records", "kraft", "omega_n", "prefix_free"]);
        let mut bad = 0;
        for v in self.lab.catalog.views() {
            let n = v.n() as usize;
            let omega_n: Dyadic = v
                .table
                .outputs()
                .filter(|(y, _)| y.len() == n)
                .map(|(_, st)| st.mass())
                .sum();
            let ok = v.prefix_free && v.kraft <= Dyadic::one();
            bad += usize::from(!ok);
            r.rows.push(vec![
                s(v.n()),
                v.key.condition.to_field(),
                s(v.records),
                s(&v.kraft),
                s(omega_n),
                s(v.prefix_free),
            ]);
        }
        r.notes
            .push(format!("{} databases, {bad} violations", r.rows.len()));
        r.status = pass_if(bad == 0);
        Ok(r)
    }

    fn monotone(&self) -> Result<ClaimResult> {
        let mut r = self.result("convergence.monotone");
        r.columns = cols(&["check", "n", "condition", "steps", "bits", "violations"]);
        let cat = &self.lab.catalog;
        let mut bad = 0;
        for v in cat.views() {
            let mut viol = 0;
            for (_, st) in v.table.outputs() {
                viol += st
                    .history
                    .windows(2)
                    .filter(|w| !(w[0].0 < w[1].0 && w[0].1 > w[1].1))
                    .count();
            }
            viol += v
                .omega
                .windows(2)
                .filter(|w| w[0].1 > w[1].1 || w[0].0 >= w[1].0)
                .count();
            bad += viol;
            r.rows.push(vec![
                "history".into(),
                s(v.n()),
                v.key.condition.to_field(),
                s(v.budgets.max_steps),
                s(v.budgets.max_program_bits),
                s(viol),
            ]);
        }
        let b = self.lab.config.budgets();
        let mut smaller = vec![Budgets::new(b.max_steps / 4, b.max_program_bits)];
        if b.max_program_bits >= 6 {
            smaller.push(Budgets::new(b.max_steps, b.max_program_bits - 3));
        }
        for n in self.lab.config.lengths() {
            let full = cat.domain(n)?;
            for &sb in &smaller {
                let fresh = self
                    .lab
                    .pool
                    .install(|| enumerate_domain(n, &BitString::new(), sb))?;
                let restricted = full.restrict(sb);
                let viol = usize::from(fresh != restricted);
                bad += viol;
                r.rows.push(vec![
                    "restriction".into(),
                    s(n),
                    "-".into(),
                    s(sb.max_steps),
                    s(sb.max_program_bits),
                    s(viol),
                ]);
            }
        }
        r.notes.push(format!("{bad} violations"));
        r.status = pass_if(bad == 0);
        Ok(r)
    }

    fn omega_decode(&self) -> Result<ClaimResult> {
        const CAP: i64 = 6;
        let mut r = self.result("omega.decode");
        r.columns = cols(&["n", "j", "feasible", "t", "min_slack"]);
        let mut worst = 0i64;
        for n in self.lab.config.lengths() {
            let db = self.lab.catalog.domain(n)?;
            let mut c_n = 0;
            for j in 1..=db.budgets().max_program_bits as usize {
                let dec = db.omega_to_halting(&db.omega_prefix(j))?;
                let c = dec.min_slack() as i64;
                let feasible = j <= n as usize;
                if feasible {
                    c_n = c_n.max(c);
                }
                r.rows.push(vec![s(n), s(j), s(feasible), s(dec.t), s(c)]);
            }
            r.notes.push(format!("n={n}: c_emp={c_n}"));
            worst = worst.max(c_n);
        }
        r.constant = Some(worst);
        r.status = pass_if(worst <= CAP);
        r.notes.push(format!(
            "c_emp must be at most {CAP}; rows with j > n are informational"
        ));
        Ok(r)
    }

    fn omega_prefix_complexity(&self) -> Result<ClaimResult> {
        let mut r = self.result("omega.prefix-complexity");
        r.columns = cols(&["n", "j", "prefix", "K", "j_minus_K"]);
        let mut worst: Option<i64> = None;
        for n in self.lab.config.lengths() {
            let db = self.lab.catalog.domain(n)?;
            let view = self.lab.catalog.given(n, &BitString::new())?;
            for j in 1..=db.budgets().max_program_bits as usize {
                let prefix = db.omega_prefix(j);
                let k = view.k(&prefix);
                let gap = k.finite().map(|k| j as i64 - k as i64);
                if let Some(g) = gap {
                    worst = Some(worst.map_or(g, |w| w.max(g)));
                }
                r.rows.push(vec![s(n), s(j), prefix.to_field(), s(k), o(gap)]);
            }
        }
        let c = worst.map(|w| w.max(0));
        r.constant = c;
        r.status = match c {
            None => ClaimStatus::Vacuous,
            Some(c) => pass_if(c <= self.slack_max()),
        };
        r.notes
            .push("prefixes with infinite K satisfy the bound at any c".into());
        Ok(r)
    }

    fn beta_code(&self) -> Result<ClaimResult> {
        let mut r = self.result("beta.code");
        r.columns = cols(&[
            "n",
            "records",
            "prefix_free",
            "round_trip_failures",
            "max_code_len",
        ]);
        let mut ok = true;
        for n in self.lab.config.lengths() {
            let db = self.lab.catalog.domain(n)?;
            let codes = beta_code(db);
            let pf = is_prefix_free(codes.iter().map(|(_, c)| c));
            let distinct: BTreeSet<&BitString> = codes.iter().map(|(_, c)| c).collect();
            let decoder = BetaDecoder::new(db);
            let failures = codes.iter().filter(|(p, c)| decoder.decode(c) != Some(p)).count()
                + (codes.len() - distinct.len());
            ok &= pf && failures == 0;
            let longest = codes.iter().map(|(_, c)| c.len()).max().unwrap_or(0);
            r.rows
                .push(vec![s(n), s(codes.len()), s(pf), s(failures), s(longest)]);
        }
        r.status = pass_if(ok);
        Ok(r)
    }

    fn beta_residual(&self) -> Result<ClaimResult> {
        let mut r = self.result("beta.residual");
        r.columns = cols(&["n", "x", "K", "k_x", "K_given_omega", "residual", "2log_k_x"]);
        let mut upper: Option<i64> = None;
        let mut lower: Option<i64> = None;
        let mut unresolved = 0;
        for n in self.lab.config.lengths() {
            let db = self.lab.catalog.domain(n)?;
            let (xs, dropped) = self.resolved(n)?;
            unresolved += dropped;
            for x in xs {
                let k = self.base_k(&x)?.finite().expect("resolved");
                let kx = self.k_x(&x)?.expect("finite K has a depth");
                let cond = db.omega_prefix(kx as usize);
                let kg = self.lab.catalog.given(n, &cond)?.k(&x);
                let res = kg.finite().map(|kg| k as i64 - kx as i64 - kg as i64);
                match res {
                    Some(v) => {
                        upper = Some(upper.map_or(v - 2 * log_k(kx), |u| u.max(v - 2 * log_k(kx))));
                        lower = Some(lower.map_or(-v - 2 * log_k(kx), |l| l.max(-v - 2 * log_k(kx))));
                    }
                    None => unresolved += 1,
                }
                r.rows.push(vec![
                    s(n),
                    x.to_field(),
                    s(k),
                    s(kx),
                    s(kg),
                    o(res),
                    s(2 * log_k(kx)),
                ]);
            }
        }
        let c = upper.map(|u| u.max(0));
        r.constant = c;
        r.notes.push(format!(
            "upper residual constant {}, lower residual constant {} (−residual ≤ 2 log k_x + c)",
            o(upper),
            o(lower)
        ));
        r.notes.push(format!(
            "{unresolved} strings excluded: infinite K or K given the prefix"
        ));
        r.status = match c {
            None => ClaimStatus::Vacuous,
            Some(c) => pass_if(c <= self.slack_max()),
        };
        Ok(r)
    }

    fn shannon_fano(&self) -> Result<ClaimResult> {
        let mut r = self.result("converters.shannon-fano");
        r.columns = cols(&["family", "tables", "violations"]);
        let mut total_bad = 0;

        let mut bad = 0;
        let mut count = 0;
        for_each_table(8, 3, 8, &mut |nums| {
            count += 1;
            bad += usize::from(!sf_ok(&table_from(3, 3, nums)));
        });
        r.rows
            .push(vec!["all width-3 tables on 2^3".into(), s(count), s(bad)]);
        total_bad += bad;

        let (mut bad, mut count) = (0, 0);
        for_each_pow2_table(8, 6, &mut |nums| {
            count += 1;
            bad += usize::from(!sf_ok(&table_from(3, 6, nums)));
        });
        r.rows.push(vec![
            "power-of-two width-6 tables on 2^3".into(),
            s(count),
            s(bad),
        ]);
        total_bad += bad;

        let mut rng = ChaCha8Rng::seed_from_u64(self.lab.config.seed);
        let mut bad = 0;
        for _ in 0..self.lab.config.random_tables {
            let mut nums: Vec<u64> = (0..16)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        rng.random_range(1..64)
                    } else {
                        0
                    }
                })
                .collect();
            let sum: u64 = nums.iter().sum();
            if sum > 64 {
                nums.iter_mut().for_each(|v| *v = *v * 64 / sum);
            }
            bad += usize::from(!sf_ok(&table_from(4, 6, &nums)));
        }
        r.rows.push(vec![
            "random width-6 tables on 2^4".into(),
            s(self.lab.config.random_tables),
            s(bad),
        ]);
        total_bad += bad;

        r.status = pass_if(total_bad == 0);
        Ok(r)
    }

    fn func_to_measure(&self) -> Result<ClaimResult> {
        let mut r = self.result("converters.func-to-measure");
        r.columns = cols(&["n", "function_models", "max_mass", "violations"]);
        let mut bad = 0;
        for n in self.lab.config.lengths() {
            let mut max_mass = Dyadic::zero();
            let mut viol = 0;
            let fs = &self.space(n).functions;
            for f in fs {
                let p = func_to_measure(f, self.lab.config.width(n))?;
                let Extension::Semimeasure(t) = &p.extension else {
                    unreachable!()
                };
                let m = mass(t);
                viol += usize::from(m > Dyadic::one());
                max_mass = max_mass.max(m);
            }
            bad += viol;
            r.rows.push(vec![s(n), s(fs.len()), s(max_mass), s(viol)]);
        }
        r.status = pass_if(bad == 0);
        Ok(r)
    }

    /// Minimal SS of `kind` for `x`, at the model slack or, failing that,
    /// the first larger slack in range.
    fn minimal_ss(&self, x: &BitString, kind: ModelKind) -> Result<(Found, u32)> {
        let c = &self.lab.config;
        let space = self.space(x.len() as u32);
        let cands = space.candidates(kind, Definition::Ss.mode());
        let mut last = None;
        for slack in c.model_slack.max(c.slack_min)..=c.slack_max.max(c.model_slack) {
            let f = search_minimal(&self.lab.catalog, x, kind, Definition::Ss, slack, cands)?;
            if f.model().is_some() {
                return Ok((f, slack));
            }
            last = Some((f, slack));
        }
        Ok(last.expect("nonempty slack range"))
    }

    fn depth_bound(&self) -> Result<ClaimResult> {
        const CAP: i64 = 8;
        let mut r = self.result("sets.depth-bound");
        r.columns = cols(&["n", "x", "K", "k_x", "l_S", "bound", "slack", "model"]);
        let c = &self.lab.config;
        let mut worst = 0i64;
        let mut missing = 0;
        let mut dropped_total = 0;
        for n in c.depth_bound_n_min.max(c.n_min)..=c.n_max {
            let (xs, dropped) = self.resolved(n)?;
            dropped_total += dropped;
            for x in xs {
                let k = self.base_k(&x)?;
                let kx = self.k_x(&x)?.expect("finite K has a depth");
                let bound = kx as i64 - 2 * log_k(kx);
                let (found, slack) = self.minimal_ss(&x, ModelKind::Set)?;
                match found.l() {
                    Some(l) => worst = worst.max(bound - l as i64),
                    None => missing += 1,
                }
                r.rows.push(vec![
                    s(n),
                    x.to_field(),
                    s(k),
                    s(kx),
                    o(found.l()),
                    s(bound),
                    s(slack),
                    found.model().map_or("none".into(), Model::describe),
                ]);
            }
        }
        r.constant = Some(worst);
        r.notes.push(format!(
            "{dropped_total} strings with infinite K excluded; {missing} without a set model"
        ));
        r.status = if r.rows.is_empty() {
            ClaimStatus::Vacuous
        } else {
            pass_if(missing == 0 && worst <= CAP)
        };
        Ok(r)
    }

    fn half_complexity(&self) -> Result<ClaimResult> {
        let mut r = self.result("sets.half-complexity");
        r.columns = cols(&["n", "x", "l_S", "l_P", "l_F", "log_image", "n/2 - l_F"]);
        for n in self.lab.config.lengths().filter(|n| n % 2 == 0) {
            for x in BitString::all_of_len(n as usize) {
                if self.base_k(&x)? != Complexity::Finite(n / 2) {
                    continue;
                }
                let (ls, _) = self.minimal_ss(&x, ModelKind::Set)?;
                let (lp, _) = self.minimal_ss(&x, ModelKind::Semimeasure)?;
                let (lf, _) = self.minimal_ss(&x, ModelKind::Function)?;
                let image = match lf.model() {
                    Some(f) => match func_to_set(f)?.extension {
                        Extension::Set(s) => Some(log_bits(s.len() as u64)),
                        _ => None,
                    },
                    None => None,
                };
                r.rows.push(vec![
                    s(n),
                    x.to_field(),
                    o(ls.l()),
                    o(lp.l()),
                    o(lf.l()),
                    o(image),
                    o(lf.l().map(|l| n as i64 / 2 - l as i64)),
                ]);
            }
        }
        if r.rows.is_empty() {
            r.status = ClaimStatus::Vacuous;
            r.notes.push("no string has K(x) = n/2 at this budget".into());
        }
        Ok(r)
    }

    fn all_p_primes(&self) -> impl Iterator<Item = &PPrime> {
        self.p_primes.values().filter_map(Option::as_ref)
    }

    fn p_prime_mass(&self) -> Result<ClaimResult> {
        let mut r = self.result("weak.p-prime-mass");
        r.columns = cols(&["n", "x", "k_prime", "c", "mass", "support", "contains_x"]);
        let mut bad = 0;
        for p in self.all_p_primes() {
            let Extension::Semimeasure(t) = &p.model.extension else {
                unreachable!()
            };
            bad += usize::from(mass(t) > Dyadic::one() || mass(t) != p.mass);
            r.rows.push(vec![
                s(p.model.n),
                p.x.to_field(),
                s(p.k_prime),
                s(p.c),
                s(&p.mass),
                s(t.len()),
                s(p.contains_x),
            ]);
        }
        let undefined = self.p_primes.values().filter(|p| p.is_none()).count();
        r.notes
            .push(format!("{undefined} strings without k'_x at this budget"));
        r.status = if r.rows.is_empty() {
            ClaimStatus::Vacuous
        } else {
            pass_if(bad == 0)
        };
        Ok(r)
    }

    fn p_prime_sufficient(&self) -> Result<ClaimResult> {
        let mut r = self.result("weak.p-prime-sufficient");
        r.columns = cols(&["n", "x", "k_prime", "lhs", "rhs", "verdict", "deficiency"]);
        let mut defs = Vec::new();
        let mut unresolved = 0;
        for p in self.all_p_primes() {
            let v = is_weak_sufficient(&self.lab.catalog, &p.x, &p.model, 0)?;
            match v.deficiency {
                Some(d) => defs.push(d),
                None => unresolved += 1,
            }
            r.rows.push(vec![
                s(p.model.n),
                p.x.to_field(),
                s(p.k_prime),
                o(v.lhs),
                s(v.rhs),
                s(v.verdict),
                o(v.deficiency),
            ]);
        }
        let slack = self.min_slack(defs.iter().copied());
        r.constant = slack;
        r.notes.push(format!(
            "{unresolved} strings where P'_x(x) = 0 or a side is out of budget"
        ));
        r.status = if r.rows.is_empty() {
            ClaimStatus::Vacuous
        } else {
            pass_if(unresolved == 0 && slack.is_some())
        };
        Ok(r)
    }

    /// Plain candidates for `x`: set models, their uniform semimeasures and `P'_x`.
    fn plain_candidates(&self, x: &BitString) -> Vec<&Model> {
        let space = self.space(x.len() as u32);
        space
            .plain_sets
            .iter()
            .chain(&space.plain_measures)
            .chain(self.p_prime(x).map(|p| &p.model))
            .filter(|m| m.contains(x))
            .collect()
    }

    fn sufficient_is_typical(&self) -> Result<ClaimResult> {
        let mut r = self.result("weak.sufficient-is-typical");
        r.columns = cols(&["n", "x", "model", "wss_deficiency", "tm_deficiency", "tm_verdict"]);
        let s_wss = self.lab.config.model_slack;
        let mut c_emp = 0u32;
        let mut unresolved = 0;
        for n in self.lab.config.lengths() {
            let (xs, _) = self.resolved(n)?;
            for x in xs {
                let check = check_wss_is_tm(&self.lab.catalog, &x, self.plain_candidates(&x), s_wss)?;
                unresolved += check.unresolved;
                for (w, t) in &check.rows {
                    if let Some(d) = t.deficiency {
                        c_emp = c_emp.max((d.unsigned_abs() as u32).saturating_sub(s_wss));
                    }
                    r.rows.push(vec![
                        s(n),
                        x.to_field(),
                        format!("{}:{}", w.kind, w.complexity),
                        o(w.deficiency),
                        o(t.deficiency),
                        s(t.verdict),
                    ]);
                }
            }
        }
        r.notes.push(format!(
            "weak sufficiency at slack {s_wss}; {} weak sufficient statistics found, {unresolved} with K(x | Z*) out of budget",
            r.rows.len()
        ));
        if r.rows.is_empty() {
            r.status = ClaimStatus::Vacuous;
            r.notes
                .push("no weak sufficient statistic found at this budget".into());
        } else {
            r.constant = Some(c_emp as i64);
            r.status = pass_if(unresolved == 0);
        }
        Ok(r)
    }

    fn typical_complexity(&self) -> Result<ClaimResult> {
        let mut r = self.result("weak.typical-complexity");
        r.columns = cols(&["n", "x", "k_prime", "model", "C", "k_prime_minus_C"]);
        let slack = self.lab.config.model_slack;
        let mut worst: Option<i64> = None;
        let mut scanned = 0;
        for n in self.lab.config.lengths() {
            let (xs, _) = self.resolved(n)?;
            for x in xs {
                let Some(kp) = self.p_prime(&x).map(|p| p.k_prime) else {
                    continue;
                };
                for m in self.plain_candidates(&x) {
                    if m.kind != ModelKind::Semimeasure {
                        continue;
                    }
                    scanned += 1;
                    let v = is_typical(&self.lab.catalog, &x, m, slack)?;
                    if !v.verdict.passed() {
                        continue;
                    }
                    let cm = m.complexity.finite().expect("typical models are in budget");
                    let gap = kp as i64 - cm as i64;
                    worst = Some(worst.map_or(gap, |w| w.max(gap)));
                    r.rows
                        .push(vec![s(n), x.to_field(), s(kp), m.describe(), s(cm), s(gap)]);
                }
            }
        }
        r.notes.push(format!(
            "{scanned} probabilistic candidates checked for typicality at slack {slack}"
        ));
        match worst {
            None => {
                r.status = ClaimStatus::Vacuous;
                r.notes
                    .push("no typical probabilistic model found at this budget".into());
            }
            Some(w) => {
                r.constant = Some(w.max(0));
                r.status = pass_if(w.max(0) <= self.slack_max());
            }
        }
        Ok(r)
    }

    fn depth_relation(&self) -> Result<ClaimResult> {
        let mut r = self.result("weak.depth-relation");
        r.columns = cols(&["n", "x", "k_prime", "k_x_given_k_prime", "difference"]);
        let mut worst = 0i64;
        let mut unresolved = 0;
        for p in self.all_p_primes() {
            let n = p.model.n;
            let view = self.lab.catalog.given_int(n, p.k_prime as u64)?;
            let kk = m_depth(view, &p.x, self.lab.config.depth_slack);
            let diff = kk.map(|k| p.k_prime as i64 - k as i64);
            match diff {
                Some(d) => worst = worst.max(d.abs()),
                None => unresolved += 1,
            }
            r.rows
                .push(vec![s(n), p.x.to_field(), s(p.k_prime), o(kk), o(diff)]);
        }
        r.constant = Some(worst);
        r.status = if r.rows.is_empty() {
            ClaimStatus::Vacuous
        } else {
            pass_if(unresolved == 0 && worst <= self.slack_max())
        };
        Ok(r)
    }

    fn bb_time(&self) -> Result<ClaimResult> {
        let mut r = self.result("weak.bb-time");
        r.columns = cols(&["n", "k", "bb", "champion_steps", "min_slack", "max_lookback"]);
        let mut worst = 0i64;
        let mut bad = 0;
        for n in self.lab.config.lengths() {
            let plain = self.lab.catalog.plain(n)?;
            for k in 0..=self.lab.config.bb_cap {
                match bb_time_probe(plain, k) {
                    Some(p) => {
                        match p.min_slack {
                            Some(c) => worst = worst.max(c as i64),
                            None => bad += 1,
                        }
                        r.rows.push(vec![
                            s(n),
                            s(k),
                            p.bb,
                            s(p.champion_steps),
                            o(p.min_slack),
                            o(p.max_lookback),
                        ]);
                    }
                    None => bad += 1,
                }
            }
        }
        r.constant = Some(worst);
        r.status = pass_if(bad == 0);
        Ok(r)
    }

    fn cylinder_census(&self) -> Result<ClaimResult> {
        let mut r = self.result("weak.cylinder-census");
        r.columns = cols(&["n", "x", "K", "passing", "passing_i"]);
        let slack = self.lab.config.model_slack;
        for n in self.lab.config.lengths() {
            let (xs, _) = self.resolved(n)?;
            let mut min_ratio: Option<(usize, u32)> = None;
            for x in xs {
                let rows = wss_census(&self.lab.catalog, self.space(n), &x, slack)?;
                let passing: Vec<String> = rows
                    .iter()
                    .filter(|row| row.verdict.verdict.passed())
                    .map(|row| row.i.to_string())
                    .collect();
                let cnt = passing.len();
                if min_ratio.is_none_or(|(c, _)| cnt < c) {
                    min_ratio = Some((cnt, n));
                }
                r.rows.push(vec![
                    s(n),
                    x.to_field(),
                    s(self.base_k(&x)?),
                    s(cnt),
                    passing.join(" "),
                ]);
            }
            if let Some((c, n)) = min_ratio {
                r.notes.push(format!(
                    "n={n}: every x has at least {c} of {} cylinders weak sufficient",
                    n + 1
                ));
            }
        }
        Ok(r)
    }

    fn p_prime_typical(&self) -> Result<ClaimResult> {
        let mut r = self.result("weak.p-prime-typical");
        r.columns = cols(&["n", "x", "log_term", "K_given_program", "deficiency"]);
        let mut worst: Option<i64> = None;
        for p in self.all_p_primes() {
            let v = is_typical(&self.lab.catalog, &p.x, &p.model, 0)?;
            if let Some(d) = v.deficiency {
                worst = Some(worst.map_or(d.abs(), |w| w.max(d.abs())));
            }
            r.rows.push(vec![
                s(p.model.n),
                p.x.to_field(),
                o(v.log_term),
                s(v.rhs),
                o(v.deficiency),
            ]);
        }
        r.constant = worst;
        Ok(r)
    }

    fn stabilization(&self) -> Result<ClaimResult> {
        let mut r = self.result("weak.stabilization");
        r.columns = cols(&["n", "x", "k_prime", "slowest", "c_emp"]);
        for p in self.all_p_primes() {
            let plain = self.lab.catalog.plain(p.model.n)?;
            let slowest = BigUint::from(p.slowest_stabilization);
            let c = (0..=p.k_prime).find(|&c| bb(plain, p.k_prime - c).is_some_and(|b| b <= slowest));
            r.rows.push(vec![
                s(p.model.n),
                p.x.to_field(),
                s(p.k_prime),
                s(p.slowest_stabilization),
                o(c),
            ]);
        }
        Ok(r)
    }

    fn tetration(&self) -> Result<ClaimResult> {
        let mut r = self.result("tetration.trace");
        r.columns = cols(&[
            "x",
            "trace",
            "length",
            "slog",
            "fixpoint",
            "C",
            "length_minus_slog",
            "fixpoint_minus_C",
        ]);
        let c = &self.lab.config;
        let n = c.probe_n;
        let mut c_len: Option<i64> = None;
        let mut c_fix = 0i64;
        let mut unresolved = 0;
        if !c.lengths().contains(&n) {
            r.status = ClaimStatus::Vacuous;
            r.notes.push(format!("probe length {n} outside the n range"));
            return Ok(r);
        }
        let plain = self.lab.catalog.plain(n)?;
        for x in BitString::all_of_len(n as usize) {
            let tr = tetration_iterate(&self.lab.catalog, &x, c.fixpoint_slack, c.tetration_max_iter)?;
            let sl = slog(&x.to_nat_big())?;
            let cx = plain.complexity(&x);
            let len_gap = tr.length.map(|l| l as i64 - sl as i64);
            let fix_gap = match (tr.fixpoint, cx) {
                (Some(f), Some(cv)) => Some(f as i64 - cv as i64),
                _ => None,
            };
            match (len_gap, fix_gap) {
                (Some(a), Some(b)) => {
                    c_len = Some(c_len.map_or(a, |w| w.max(a)));
                    c_fix = c_fix.max(b.abs());
                }
                _ => unresolved += 1,
            }
            let trace: Vec<String> = tr.values.iter().map(|v| v.to_string()).collect();
            r.rows.push(vec![
                x.to_field(),
                trace.join(" "),
                o(tr.length),
                s(sl),
                o(tr.fixpoint),
                o(cx),
                o(len_gap),
                o(fix_gap),
            ]);
        }
        let c_len = c_len.unwrap_or(0).max(0);
        r.notes
            .push(format!("c = {c_len}, c' = {c_fix}, {unresolved} unresolved"));
        r.constant = Some(c_len.max(c_fix));
        r.status = pass_if(unresolved == 0 && c_len.max(c_fix) <= self.slack_max());
        Ok(r)
    }

    fn coding_gap(&self) -> Result<ClaimResult> {
        let mut r = self.result("complexity.coding-gap");
        r.columns = cols(&["n", "strings", "max_gap", "argmax"]);
        let mut worst = 0;
        for n in self.lab.config.lengths() {
            let view = self.lab.catalog.given(n, &BitString::new())?;
            let mut best: Option<(i64, BitString)> = None;
            let mut count = 0;
            for x in BitString::all_of_len(n as usize) {
                if let Some(g) = coding_gap(view, &x) {
                    count += 1;
                    if best.as_ref().is_none_or(|(b, _)| g > *b) {
                        best = Some((g, x));
                    }
                }
            }
            if let Some((g, _)) = &best {
                worst = worst.max(*g);
            }
            r.rows.push(vec![
                s(n),
                s(count),
                o(best.as_ref().map(|b| b.0)),
                o(best.as_ref().map(|b| b.1.to_field())),
            ]);
        }
        r.constant = Some(worst);
        Ok(r)
    }

    fn witness_census(&self) -> Result<ClaimResult> {
        let mut r = self.result("complexity.witness-census");
        r.columns = cols(&["n", "slack", "max_census", "argmax"]);
        for n in self.lab.config.lengths() {
            let db = self.lab.catalog.domain(n)?;
            for slack in 0..=2 {
                let mut best: Option<(usize, BitString)> = None;
                for x in BitString::all_of_len(n as usize) {
                    let c = witness_census(db, &x, slack).len();
                    if c > 0 && best.as_ref().is_none_or(|(b, _)| c > *b) {
                        best = Some((c, x));
                    }
                }
                r.rows.push(vec![
                    s(n),
                    s(slack),
                    o(best.as_ref().map(|b| b.0)),
                    o(best.as_ref().map(|b| b.1.to_field())),
                ]);
            }
        }
        Ok(r)
    }

    fn additivity(&self) -> Result<ClaimResult> {
        let mut r = self.result("complexity.additivity");
        r.columns = cols(&["x", "y", "deficiency"]);
        let n = self.lab.config.probe_n;
        if !self.lab.config.lengths().contains(&n) {
            r.status = ClaimStatus::Vacuous;
            return Ok(r);
        }
        let (mut lo, mut hi) = (i64::MAX, i64::MIN);
        let mut unresolved = 0;
        for x in BitString::all_of_len(n as usize) {
            for y in BitString::all_of_len(n as usize) {
                let d = additivity_check(&self.lab.catalog, &x, &y)?;
                match d {
                    Some(d) => {
                        lo = lo.min(d);
                        hi = hi.max(d);
                    }
                    None => unresolved += 1,
                }
                r.rows.push(vec![x.to_field(), y.to_field(), o(d)]);
            }
        }
        if hi >= lo {
            r.constant = Some(hi.max(-lo));
            r.notes.push(format!(
                "deficiency range [{lo}, {hi}], {unresolved} pairs out of budget"
            ));
        }
        Ok(r)
    }

    fn halting_information(&self) -> Result<ClaimResult> {
        let mut r = self.result("complexity.halting-information");
        r.columns = cols(&["n", "x", "K", "K_H", "I", "k_x", "I_minus_bound"]);
        let mut worst: Option<i64> = None;
        for n in self.lab.config.lengths() {
            let (xs, _) = self.resolved(n)?;
            for x in xs {
                let k = self.base_k(&x)?.finite().expect("resolved") as i64;
                let mut kh = Complexity::Infinite;
                for j in 0..=self.lab.config.halting_levels {
                    kh = kh.min(k_given_halting(&self.lab.catalog, &x, j)?);
                }
                let kx = self.k_x(&x)?.expect("finite K has a depth");
                let info = kh.finite().map(|h| k - h as i64);
                let gap = info.map(|i| i - (kx as i64 - 2 * log_k(kx)));
                if let Some(g) = gap {
                    worst = Some(worst.map_or(-g, |w| w.max(-g)));
                }
                r.rows
                    .push(vec![s(n), x.to_field(), s(k), s(kh), o(info), s(kx), o(gap)]);
            }
        }
        r.constant = worst.map(|w| w.max(0));
        Ok(r)
    }

    fn plain_prefix(&self) -> Result<ClaimResult> {
        let mut r = self.result("complexity.plain-prefix");
        r.columns = cols(&["n", "x", "C", "K_given_C", "difference"]);
        let mut worst: Option<i64> = None;
        for n in self.lab.config.lengths() {
            let plain = self.lab.catalog.plain(n)?;
            for x in BitString::all_of_len(n as usize) {
                let Some(cx) = plain.complexity(&x) else { continue };
                if cx > self.lab.config.plain_cap {
                    continue;
                }
                let kc = self.lab.catalog.given_int(n, cx as u64)?.k(&x);
                let d = kc.finite().map(|k| cx as i64 - k as i64);
                if let Some(d) = d {
                    worst = Some(worst.map_or(d.abs(), |w| w.max(d.abs())));
                }
                r.rows.push(vec![s(n), x.to_field(), s(cx), s(kc), o(d)]);
            }
        }
        r.constant = worst;
        Ok(r)
    }

    fn structure(&self) -> Result<ClaimResult> {
        let mut r = self.result("sets.structure");
        r.columns = cols(&["x", "alpha", "h"]);
        let n = self.lab.config.probe_n;
        if !self.lab.config.lengths().contains(&n) {
            r.status = ClaimStatus::Vacuous;
            return Ok(r);
        }
        let top = self.lab.config.max_program_bits;
        for x in BitString::all_of_len(n as usize) {
            let mut prev = None;
            for (alpha, h) in structure_sweep(self.space(n), &x, top) {
                if h != prev {
                    r.rows.push(vec![x.to_field(), s(alpha), o(h)]);
                    prev = h;
                }
            }
        }
        Ok(r)
    }
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|c| c.to_string()).collect()
}

fn pass_if(ok: bool) -> ClaimStatus {
    if ok {
        ClaimStatus::Pass
    } else {
        ClaimStatus::Fail
    }
}

fn table_from(n: u32, w: u32, nums: &[u64]) -> BTreeMap<BitString, Dyadic> {
    BitString::all_of_len(n as usize)
        .zip(nums)
        .filter(|(_, &v)| v > 0)
        .map(|(y, &v)| (y, Dyadic::new(v, w as i64)))
        .collect()
}

fn sf_ok(p: &BTreeMap<BitString, Dyadic>) -> bool {
    let Ok(code) = ShannonFanoCode::new(p) else {
        return false;
    };
    let words: Vec<&BitString> = code.codes.values().collect();
    let distinct: BTreeSet<&BitString> = words.iter().copied().collect();
    code.codes.len() == p.len()
        && distinct.len() == words.len()
        && is_prefix_free(words.iter().copied())
        && code.codes.iter().all(|(y, c)| {
            c.len() as i64 <= p[y].neg_log2_ceil().expect("positive") + 1 && code.decode(c) == Some(y)
        })
}

/// Every vector of `cells` numerators in `0..2^w` summing to at most `total`.
fn for_each_table(cells: usize, w: u32, total: u64, f: &mut dyn FnMut(&[u64])) {
    fn go(buf: &mut Vec<u64>, cells: usize, max: u64, left: u64, f: &mut dyn FnMut(&[u64])) {
        if buf.len() == cells {
            f(buf);
            return;
        }
        for v in 0..=max.min(left) {
            buf.push(v);
            go(buf, cells, max, left - v, f);
            buf.pop();
        }
    }
    go(&mut Vec::with_capacity(cells), cells, (1 << w) - 1, total, f);
}

/// Every width-`w` table whose entries are 0 or `2^-e`, `1 <= e <= w`, with
/// mass at most 1.
fn for_each_pow2_table(cells: usize, w: u32, f: &mut dyn FnMut(&[u64])) {
    fn go(buf: &mut Vec<u64>, cells: usize, w: u32, left: u64, f: &mut dyn FnMut(&[u64])) {
        if buf.len() == cells {
            f(buf);
            return;
        }
        buf.push(0);
        go(buf, cells, w, left, f);
        buf.pop();
        for e in 1..=w {
            let v = 1u64 << (w - e);
            if v <= left {
                buf.push(v);
                go(buf, cells, w, left - v, f);
                buf.pop();
            }
        }
    }
    go(&mut Vec::with_capacity(cells), cells, w, 1 << w, f);
}
