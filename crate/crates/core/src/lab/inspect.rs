use std::fmt::Write as _;

use crate::bits::BitString;
use crate::complexity::{bb_depth, m_depth, tetration_iterate};
use crate::error::{LabError, Result};
use crate::lab::Lab;
use crate::statistics::{
    construct_p_prime, search_minimal, structure_sweep, Definition, Extension, ModelKind, ModelSpace,
};

/// A human-readable dossier for one string.
pub fn cmd_inspect(x: &BitString, lab: &Lab) -> Result<String> {
    let c = &lab.config;
    let n = x.len() as u32;
    if !c.lengths().contains(&n) {
        return Err(LabError::Config(format!(
            "string length {n} outside the configured range {}..={}",
            c.n_min, c.n_max
        )));
    }
    let cat = &lab.catalog;
    let view = cat.given(n, &BitString::new())?;
    let mut s = String::new();
    writeln!(
        s,
        "x = {x}  (n = {n}, steps = {}, bits = {})",
        c.max_steps, c.max_program_bits
    )
    .unwrap();

    match view.table.get(x) {
        Some(st) => {
            writeln!(s, "K(x) = {}", st.k_final()).unwrap();
            writeln!(s, "witness = {} ({} steps)", st.witness, st.witness_steps).unwrap();
            let hist: Vec<String> = st.history.iter().map(|(t, k)| format!("t={t}:{k}")).collect();
            writeln!(s, "K_t history = {}", hist.join(" ")).unwrap();
            writeln!(s, "programs = {}, mass = {}", st.programs(), st.mass()).unwrap();
        }
        None => writeln!(s, "K(x) = inf").unwrap(),
    }
    match cat.plain(n)?.witness(x) {
        Some(e) => writeln!(s, "C(x) = {} via {}", e.program.len(), e.program).unwrap(),
        None => writeln!(s, "C(x) = inf").unwrap(),
    }
    let kx = m_depth(view, x, c.depth_slack);
    writeln!(s, "k_x = {}", kx.map_or("undefined".into(), |k| k.to_string())).unwrap();
    let kp = bb_depth(cat, x, c.depth_slack)?;
    writeln!(s, "k'_x = {}", kp.map_or("undefined".into(), |k| k.to_string())).unwrap();

    let space = ModelSpace::build(cat, n, c.width(n))?;
    let sweep: Vec<String> = structure_sweep(&space, x, c.max_program_bits)
        .into_iter()
        .map(|(a, h)| format!("{a}:{}", h.map_or("-".into(), |h| h.to_string())))
        .collect();
    writeln!(s, "structure h_x(alpha) = {}", sweep.join(" ")).unwrap();

    let p_prime = construct_p_prime(cat, x, c.depth_slack)?;
    for defn in [Definition::Ss, Definition::Wss, Definition::Tm] {
        for kind in [ModelKind::Set, ModelKind::Semimeasure, ModelKind::Function] {
            let mut cands: Vec<_> = space.candidates(kind, defn.mode()).to_vec();
            if kind == ModelKind::Semimeasure && defn != Definition::Ss {
                cands.extend(p_prime.as_ref().map(|p| p.model.clone()));
            }
            if cands.is_empty() {
                continue;
            }
            let found = search_minimal(cat, x, kind, defn, c.model_slack, &cands)?;
            let line = match found.model() {
                Some(m) => format!("l = {} via {}", found.l().expect("found"), m.describe()),
                None => "none".to_string(),
            };
            writeln!(s, "minimal {defn:?} {kind} (slack {}) = {line}", c.model_slack).unwrap();
        }
    }

    match &p_prime {
        Some(p) => {
            writeln!(
                s,
                "P'_x: k' = {}, c = {}, mass = {}, contains x = {}, slowest stabilization = {}",
                p.k_prime, p.c, p.mass, p.contains_x, p.slowest_stabilization
            )
            .unwrap();
            if let Extension::Semimeasure(t) = &p.model.extension {
                for (y, v) in t {
                    writeln!(s, "  {y} {v}").unwrap();
                }
            }
        }
        None => writeln!(s, "P'_x: undefined").unwrap(),
    }

    let tr = tetration_iterate(cat, x, c.fixpoint_slack, c.tetration_max_iter)?;
    let values: Vec<String> = tr.values.iter().map(|v| v.to_string()).collect();
    writeln!(
        s,
        "tetration trace = {} (length {}, fixpoint {})",
        values.join(" "),
        tr.length.map_or("-".into(), |l| l.to_string()),
        tr.fixpoint.map_or("-".into(), |f| f.to_string())
    )
    .unwrap();
    Ok(s)
}
