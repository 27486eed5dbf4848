use std::collections::BTreeMap;

use aitlab::bits::{bs, BitString};
use aitlab::dyadic::Dyadic;
use aitlab::enumeration::{
    alpha, beta_code, beta_truncated, decode_beta, enumerate_batch, enumerate_domain, enumerate_with_plain,
    load, store, Budgets, DbKey, HaltRecord, HaltingDB, HARD_CAPS,
};
use aitlab::error::LabError;
use aitlab::machine::{run_plain, run_prefix_word, MachineConfig};

/// Runs every whole-opcode word up to the bit budget directly.
fn brute_force_domain(n: u32, cond: &BitString, budgets: Budgets) -> Vec<HaltRecord> {
    let cfg = MachineConfig::new(
        budgets.max_steps,
        budgets.max_program_bits,
        cond.clone(),
        n as u64,
    )
    .unwrap();
    let mut out = Vec::new();
    for len in (3..=budgets.max_program_bits as usize).step_by(3) {
        for w in BitString::all_of_len(len) {
            let r = run_prefix_word(&w, &cfg);
            if r.halted() && r.bits_read as usize == len {
                out.push(HaltRecord {
                    program: w,
                    steps: r.steps,
                    output: r.output,
                });
            }
        }
    }
    out.sort_by(HaltRecord::canonical_cmp);
    out
}

#[test]
fn single_opcode_domain_is_the_halt_instruction() {
    let db = enumerate_domain(0, &BitString::new(), Budgets::new(10, 3)).unwrap();
    assert_eq!(db.len(), 1);
    assert_eq!(db.records()[0].program, bs("111"));
    assert_eq!(db.kraft_sum(), Dyadic::pow2(-3));
    assert_eq!(db.omega_t(0).unwrap(), Dyadic::zero());
    assert_eq!(db.omega_t(10).unwrap(), Dyadic::pow2(-3));
    assert_eq!(db.omega_prefix(3), bs("001"));
    assert_eq!(db.omega_prefix(5), bs("00100"));
    // At k = 3 the gap 1/8 − 0 already meets 2^-3, so t = 0 qualifies.
    assert_eq!(db.t_k(3), 0);
    for k in 4..8 {
        assert_eq!(db.t_k(k), db.records()[0].steps);
    }
    assert_eq!(db.t_k(0), 0);
    assert!(matches!(db.omega_t(11), Err(LabError::BeyondBudget { .. })));
}

#[test]
fn search_matches_brute_force() {
    let budgets = Budgets::new(300, 12);
    for (n, cond) in [(0, ""), (2, ""), (3, "1"), (2, "0110"), (5, "00")] {
        let cond = bs(cond);
        let db = enumerate_domain(n, &cond, budgets).unwrap();
        assert_eq!(
            db.records(),
            &brute_force_domain(n, &cond, budgets)[..],
            "n={n} cond={cond:?}"
        );
    }
}

#[test]
fn batch_matches_individual_runs() {
    let budgets = Budgets::new(500, 12);
    let keys: Vec<DbKey> = vec![
        DbKey::plain(2),
        DbKey::plain(3),
        DbKey::with_int(2, 5),
        DbKey::new(2, bs("0101")),
        DbKey::new(2, bs("01011")),
        DbKey::with_int(4, 0),
    ];
    let reqs: Vec<(DbKey, bool)> = keys.iter().map(|k| (k.clone(), true)).collect();
    let batch = enumerate_batch(&reqs, budgets, &HARD_CAPS).unwrap();
    for (key, (db, plain)) in keys.iter().zip(batch) {
        let (solo, solo_plain) = enumerate_with_plain(key.n, &key.condition, budgets).unwrap();
        assert_eq!(db, solo, "{key}");
        assert_eq!(plain.unwrap(), solo_plain, "{key}");
    }
}

#[test]
fn duplicate_requests_and_oversized_budgets_are_rejected() {
    let reqs = vec![(DbKey::plain(2), false), (DbKey::plain(2), true)];
    assert!(matches!(
        enumerate_batch(&reqs, Budgets::new(10, 6), &HARD_CAPS),
        Err(LabError::Config(_))
    ));
    assert!(matches!(
        enumerate_domain(2, &BitString::new(), Budgets::new(10, 7)),
        Err(LabError::Config(_))
    ));
    assert!(matches!(
        enumerate_batch(&[(DbKey::plain(2), false)], Budgets::new(10, 39), &HARD_CAPS),
        Err(LabError::Config(_))
    ));
}

#[test]
fn plain_table_matches_brute_force() {
    let budgets = Budgets::new(300, 12);
    for n in [0u32, 3] {
        let (_, table) = enumerate_with_plain(n, &BitString::new(), budgets).unwrap();
        let cfg = MachineConfig::new(300, 12, BitString::new(), n as u64).unwrap();
        let mut best: BTreeMap<BitString, usize> = BTreeMap::new();
        let mut bb = vec![BitString::new(); 13];
        for (len, champion) in bb.iter_mut().enumerate() {
            for p in BitString::all_of_len(len) {
                let r = run_plain(&p, &cfg);
                if !r.halted() {
                    continue;
                }
                let e = best.entry(r.output.clone()).or_insert(len);
                *e = (*e).min(len);
                if r.output.nat_cmp(champion).is_gt() {
                    *champion = r.output.clone();
                }
            }
        }
        for (x, len) in &best {
            assert_eq!(table.complexity(x), Some(*len as u32), "x={x:?}");
        }
        assert_eq!(table.entries.len(), best.len());
        for k in 0..=12u32 {
            let entry = table.bb_entry(k).unwrap();
            assert_eq!(entry.value, bb[k as usize], "k={k}");
            let r = run_plain(&entry.champion, &cfg);
            assert_eq!(r.output, entry.value);
            assert_eq!(r.steps, entry.champion_steps);
        }
    }
}

#[test]
fn plain_spot_values() {
    let (_, table) = enumerate_with_plain(1, &BitString::new(), Budgets::new(100, 9)).unwrap();
    assert_eq!(table.complexity(&BitString::new()), Some(0));
    assert_eq!(table.complexity(&bs("0")), Some(3));
    assert_eq!(table.bb_entry(0).unwrap().value.to_nat(), Some(0));
    assert_eq!(table.bb_entry(3).unwrap().value.to_nat(), Some(1));
}

#[test]
fn halting_sequence_small_indices() {
    let db = enumerate_domain(2, &BitString::new(), Budgets::new(100, 6)).unwrap();
    let h = db.halting_sequence(127);
    assert_eq!(h.get(0), Some(false));
    assert_eq!(h.get(bs("111").to_nat().unwrap() as usize), Some(true));
    for i in 0..127u64 {
        let w = BitString::from_nat(i);
        if !w.len().is_multiple_of(3) {
            assert_eq!(h.get(i as usize), Some(false));
        } else {
            assert_eq!(h.get(i as usize), Some(db.get(&w).is_some()), "{w:?}");
        }
    }
}

#[test]
fn literal_truncation_of_two_record_sums() {
    let key = DbKey::plain(0);
    let records = vec![
        HaltRecord {
            program: bs("111"),
            steps: 5,
            output: BitString::new(),
        },
        HaltRecord {
            program: bs("110"),
            steps: 9,
            output: BitString::new(),
        },
    ];
    let db = HaltingDB::from_records(key, Budgets::new(10, 3), records);
    let a: Vec<Dyadic> = alpha(&db).into_iter().map(|(_, a)| a).collect();
    assert_eq!(a, vec![Dyadic::pow2(-3), Dyadic::new(2, 3)]);
    let b: Vec<BitString> = beta_truncated(&db).into_iter().map(|(_, b)| b).collect();
    assert_eq!(b, vec![bs("001"), bs("010")]);
}

#[test]
fn literal_truncation_can_nest_but_rounded_code_cannot() {
    let key = DbKey::plain(0);
    let records = vec![
        HaltRecord {
            program: bs("111"),
            steps: 1,
            output: BitString::new(),
        },
        HaltRecord {
            program: bs("110111"),
            steps: 2,
            output: bs("0"),
        },
    ];
    let db = HaltingDB::from_records(key, Budgets::new(10, 6), records);
    let lit: Vec<BitString> = beta_truncated(&db).into_iter().map(|(_, b)| b).collect();
    assert_eq!(lit, vec![bs("001"), bs("001001")]);
    assert!(!aitlab::bits::is_prefix_free(lit.iter()));
    let code: Vec<BitString> = beta_code(&db).into_iter().map(|(_, b)| b).collect();
    assert_eq!(code, vec![bs("0000"), bs("0010000")]);
    assert!(aitlab::bits::is_prefix_free(code.iter()));
}

#[test]
fn rounded_code_is_prefix_free_and_invertible() {
    let db = enumerate_domain(3, &BitString::new(), Budgets::new(400, 12)).unwrap();
    let codes = beta_code(&db);
    assert_eq!(codes.len(), db.len());
    assert!(aitlab::bits::is_prefix_free(codes.iter().map(|(_, c)| c)));
    for (p, c) in &codes {
        assert_eq!(c.len(), p.len() + 1);
        assert_eq!(decode_beta(&db, c), Some(p));
    }
    assert_eq!(decode_beta(&db, &bs("1111111")), None);
}

#[test]
fn omega_decode_is_exact_at_full_precision() {
    let db = enumerate_domain(2, &BitString::new(), Budgets::new(600, 12)).unwrap();
    let omega = db.omega_final();
    let full = omega.exponent().max(1) as usize;
    let dec = db.omega_to_halting(&db.omega_prefix(full)).unwrap();
    for r in db.records() {
        assert!(dec.verdict(&r.program) || r.output.len() != 2 && r.steps > dec.t);
    }
    assert_eq!(dec.min_slack(), 0);
    let too_big = omega.ceil_bits(full + 2).unwrap_or_else(|| bs("1"));
    let bigger = Dyadic::from_fraction_bits(&too_big) + Dyadic::pow2(-(full as i64) - 2);
    let bad = bigger.truncate_bits(full + 2);
    assert!(matches!(
        db.omega_to_halting(&bad),
        Err(LabError::InvalidPrefix(_))
    ));
}

#[test]
fn decode_verdicts_never_claim_false_halts() {
    let db = enumerate_domain(3, &BitString::new(), Budgets::new(600, 12)).unwrap();
    for j in 1..=20 {
        let dec = db.omega_to_halting(&db.omega_prefix(j)).unwrap();
        for r in db.records() {
            if dec.verdict(&r.program) {
                assert!(r.steps <= dec.t);
            }
        }
        assert!(!dec.verdict(&bs("000000000000000")));
    }
}

#[test]
fn store_round_trip_and_tamper_detection() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("db.txt");
    let db = enumerate_domain(2, &bs("01"), Budgets::new(200, 9)).unwrap();
    store(&db, &path).unwrap();
    assert_eq!(load(&path).unwrap(), db);

    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    assert_eq!(lines[0], "AITLAB-HDB v1");
    assert_eq!(lines[1], "machine=AITLAB-M1");
    assert_eq!(lines[3], "cond=01");

    let mut tampered = lines.clone();
    let last = tampered.len() - 1;
    let fields: Vec<&str> = tampered[last].split(' ').collect();
    tampered[last] = format!("{}000 {} {}", fields[0], fields[1], fields[2]);
    std::fs::write(&path, tampered.join("\n")).unwrap();
    assert!(matches!(load(&path), Err(LabError::ChecksumMismatch { .. })));

    lines[1] = "machine=AITLAB-M0".into();
    std::fs::write(&path, lines.join("\n")).unwrap();
    assert!(matches!(load(&path), Err(LabError::VersionMismatch { .. })));

    std::fs::write(&path, "AITLAB-HDB v1\nmachine=AITLAB-M1\nn=x\n").unwrap();
    assert!(matches!(load(&path), Err(LabError::Malformed { .. })));
}

#[test]
fn smaller_budgets_are_restrictions() {
    let big = enumerate_domain(3, &BitString::new(), Budgets::new(400, 12)).unwrap();
    for (t, l) in [(10, 3), (100, 9), (400, 6), (57, 12)] {
        let small = enumerate_domain(3, &BitString::new(), Budgets::new(t, l)).unwrap();
        assert_eq!(small, big.restrict(Budgets::new(t, l)));
    }
}
