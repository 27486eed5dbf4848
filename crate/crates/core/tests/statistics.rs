use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use aitlab::bits::{bs, is_prefix_free, BitString};
use aitlab::complexity::{bb_depth, bb_time, log_bits, Complexity};
use aitlab::dyadic::Dyadic;
use aitlab::lab::{Lab, LabConfig, Source};
use aitlab::statistics::{
    construct_p_prime, func_to_measure, func_to_set, judge, read_model, search_minimal, set_of_output,
    shannon_fano_convert, structure_sweep, table_of_output, write_model, wss_census, Definition, Extension,
    MachineMode, Model, ModelKind, ModelSpace, ShannonFanoCode, Verdict,
};
use proptest::prelude::*;

fn model(kind: ModelKind, extension: Extension) -> Model {
    Model {
        kind,
        mode: MachineMode::Prefix,
        n: 2,
        program: bs("110"),
        extension,
        complexity: Complexity::Finite(3),
        derived: false,
    }
}

fn dy(num: u64, exp: i64) -> Dyadic {
    Dyadic::new(num, exp)
}

/// A lab at n = 2..=3 with small budgets, prepared once.
fn lab() -> &'static Lab {
    static LAB: OnceLock<(tempfile::TempDir, Lab)> = OnceLock::new();
    &LAB.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let config = LabConfig {
            max_steps: 300,
            max_program_bits: 12,
            plain_cap: 12,
            bb_cap: 12,
            n_min: 2,
            n_max: 3,
            halting_levels: 3,
            probe_n: 2,
            depth_bound_n_min: 2,
            random_tables: 16,
            cache_dir: dir.path().to_path_buf(),
            ..LabConfig::default()
        };
        let mut lab = Lab::open(config, Source::Enumerate).unwrap();
        lab.prepare().unwrap();
        (dir, lab)
    })
    .1
}

#[test]
fn shannon_fano_on_uniform_quarters() {
    let p: BTreeMap<_, _> = BitString::all_of_len(2).map(|y| (y, dy(1, 2))).collect();
    let code = ShannonFanoCode::new(&p).unwrap();
    let got: Vec<String> = code.codes.values().map(|c| c.to_string()).collect();
    assert_eq!(got, ["000", "010", "100", "110"]);
    assert_eq!(code.decode(&bs("100")), Some(&bs("10")));
    assert_eq!(code.decode(&bs("01")), None);
}

#[test]
fn shannon_fano_on_unit_mass() {
    let p = BTreeMap::from([(bs("01"), Dyadic::one())]);
    let code = ShannonFanoCode::new(&p).unwrap();
    assert_eq!(code.codes[&bs("01")], bs("0"));
}

#[test]
fn shannon_fano_rejects_excess_mass() {
    let p = BTreeMap::from([(bs("00"), dy(3, 2)), (bs("01"), dy(1, 1))]);
    assert!(ShannonFanoCode::new(&p).is_err());
}

#[test]
fn shannon_fano_model_inverts_codes() {
    let p = BTreeMap::from([(bs("00"), dy(1, 1)), (bs("11"), dy(1, 3))]);
    let m = model(ModelKind::Semimeasure, Extension::Semimeasure(p));
    let f = shannon_fano_convert(&m).unwrap();
    assert_eq!(f.kind, ModelKind::Function);
    assert!(f.derived);
    assert_eq!(f.complexity, m.complexity);
    let Extension::Function(map) = &f.extension else {
        panic!()
    };
    // 00: L = 2, F = 0 -> 00.  11: L = 4, F = 1/2 -> 1000.
    assert_eq!(
        map,
        &BTreeMap::from([(bs("00"), bs("00")), (bs("1000"), bs("11"))])
    );
}

#[test]
fn func_to_measure_single_preimage() {
    let f = model(
        ModelKind::Function,
        Extension::Function(BTreeMap::from([(bs("01"), bs("10"))])),
    );
    let m = func_to_measure(&f, 8).unwrap();
    let Extension::Semimeasure(p) = &m.extension else {
        panic!()
    };
    assert_eq!(p[&bs("10")], dy(1, 3));
    // Others: floor(256 / (4 (nat + 1)^2)) / 256 with nat(00) = 3, nat(01) = 4, nat(11) = 6.
    assert_eq!(p[&bs("00")], dy(256 / 64, 8));
    assert_eq!(p[&bs("01")], dy(256 / 100, 8));
    assert_eq!(p[&bs("11")], dy(256 / 196, 8));
}

#[test]
fn func_to_measure_takes_shortest_preimage() {
    let map = BTreeMap::from([(bs("0"), bs("11")), (bs("101"), bs("11")), (bs("1"), bs("00"))]);
    let m = func_to_measure(&model(ModelKind::Function, Extension::Function(map)), 6).unwrap();
    let Extension::Semimeasure(p) = &m.extension else {
        panic!()
    };
    assert_eq!(p[&bs("11")], dy(1, 2));
    assert_eq!(p[&bs("00")], dy(1, 2));
}

#[test]
fn func_to_set_is_the_image() {
    let map = BTreeMap::from([(bs("0"), bs("11")), (bs("1"), bs("11"))]);
    let s = func_to_set(&model(ModelKind::Function, Extension::Function(map))).unwrap();
    assert_eq!(s.extension, Extension::Set(BTreeSet::from([bs("11")])));
    assert!(func_to_set(&model(ModelKind::Set, Extension::Set(BTreeSet::new()))).is_err());
}

#[test]
fn set_outputs_decode_to_blocks() {
    assert_eq!(
        set_of_output(&bs("0001"), 2),
        Some(BTreeSet::from([bs("00"), bs("01")]))
    );
    assert_eq!(set_of_output(&bs("000000"), 2), Some(BTreeSet::from([bs("00")])));
    assert_eq!(set_of_output(&bs("000"), 2), None);
    assert_eq!(set_of_output(&BitString::new(), 2), None);
}

#[test]
fn table_outputs_decode_to_numerators() {
    // n = 1, w = 2: entries for 0 and 1.
    assert_eq!(
        table_of_output(&bs("0100"), 1, 2),
        Some(BTreeMap::from([(bs("0"), dy(1, 2))]))
    );
    assert_eq!(
        table_of_output(&bs("1000"), 1, 2),
        Some(BTreeMap::from([(bs("0"), dy(1, 1))]))
    );
    assert_eq!(table_of_output(&bs("1111"), 1, 2), None);
    assert_eq!(table_of_output(&bs("010"), 1, 2), None);
}

#[test]
fn model_file_round_trip() {
    let cases = [
        model(
            ModelKind::Set,
            Extension::Set(BTreeSet::from([bs("00"), bs("01")])),
        ),
        model(
            ModelKind::Semimeasure,
            Extension::Semimeasure(BTreeMap::from([(bs("10"), dy(3, 3))])),
        ),
        Model {
            mode: MachineMode::Plain,
            program: BitString::new(),
            complexity: Complexity::Infinite,
            derived: true,
            ..model(
                ModelKind::Function,
                Extension::Function(BTreeMap::from([(BitString::new(), bs("11"))])),
            )
        },
    ];
    for m in cases {
        let text = write_model(&m);
        assert_eq!(read_model(&text).unwrap(), m, "{text}");
    }
}

#[test]
fn model_file_errors() {
    let good = write_model(&model(ModelKind::Set, Extension::Set(BTreeSet::from([bs("00")]))));
    assert!(read_model(&good.replace("AITLAB-MODEL v1", "MODEL")).is_err());
    assert!(read_model(&good.replace("kind set", "kind cube")).is_err());
    assert!(read_model(&good.replace("entries 1", "entries 2")).is_err());
    assert!(matches!(
        read_model(&good.replace("machine AITLAB-M1", "machine OTHER")),
        Err(aitlab::LabError::VersionMismatch { .. })
    ));
}

#[test]
fn log_terms_per_kind() {
    let set = model(
        ModelKind::Set,
        Extension::Set(BitString::all_of_len(2).take(3).collect()),
    );
    assert_eq!(set.log_term(&bs("00")), Some(2));
    assert_eq!(set.log_term(&bs("11")), None);
    let p = model(
        ModelKind::Semimeasure,
        Extension::Semimeasure(BTreeMap::from([(bs("01"), dy(3, 3))])),
    );
    assert_eq!(p.log_term(&bs("01")), Some(2));
    let f = model(
        ModelKind::Function,
        Extension::Function(BTreeMap::from([(bs("000"), bs("11")), (bs("1"), bs("11"))])),
    );
    assert_eq!(f.log_term(&bs("11")), Some(1));
}

#[test]
fn outside_support_is_not_judged() {
    let cat = &lab().catalog;
    let m = model(ModelKind::Set, Extension::Set(BTreeSet::from([bs("00")])));
    for defn in [Definition::Ss, Definition::Wss, Definition::Tm] {
        let v = judge(cat, &bs("11"), &m, defn, 3).unwrap();
        assert_eq!(v.verdict, Verdict::NotInSupport);
        assert_eq!(v.deficiency, None);
    }
}

#[test]
fn sufficiency_balance_matches_direct_sum() {
    let lab = lab();
    let cat = &lab.catalog;
    for n in lab.config.lengths() {
        let space = ModelSpace::build(cat, n, lab.config.width(n)).unwrap();
        let view = cat.given(n, &BitString::new()).unwrap();
        for x in BitString::all_of_len(n as usize) {
            for m in space.prefix_sets.iter().filter(|m| m.contains(&x)) {
                let Extension::Set(s) = &m.extension else {
                    unreachable!()
                };
                let lhs = m.program.len() as i64 + log_bits(s.len() as u64) as i64;
                let v = judge(cat, &x, m, Definition::Ss, 1).unwrap();
                match view.k(&x).finite() {
                    Some(k) => {
                        assert_eq!(v.deficiency, Some(lhs - k as i64));
                        assert_eq!(v.verdict.passed(), (lhs - k as i64).abs() <= 1);
                    }
                    None => assert_eq!(v.verdict, Verdict::OutOfBudget),
                }
            }
        }
    }
}

#[test]
fn search_returns_first_passing_in_scan_order() {
    let lab = lab();
    let cat = &lab.catalog;
    for n in lab.config.lengths() {
        let space = ModelSpace::build(cat, n, lab.config.width(n)).unwrap();
        for x in BitString::all_of_len(n as usize) {
            let cands = space.candidates(ModelKind::Set, MachineMode::Prefix);
            let found = search_minimal(cat, &x, ModelKind::Set, Definition::Ss, 2, cands).unwrap();
            let first = cands
                .iter()
                .find(|m| m.contains(&x) && judge(cat, &x, m, Definition::Ss, 2).unwrap().verdict.passed());
            assert_eq!(found.model(), first);
        }
    }
}

#[test]
fn model_space_keeps_shortest_programs() {
    let lab = lab();
    let cat = &lab.catalog;
    let n = 2;
    let space = ModelSpace::build(cat, n, lab.config.width(n)).unwrap();
    let db = cat.domain(n).unwrap();
    let mut best: BTreeMap<BTreeSet<BitString>, BitString> = BTreeMap::new();
    for r in db.records() {
        if let Some(s) = set_of_output(&r.output, n) {
            let e = best.entry(s).or_insert_with(|| r.program.clone());
            if (r.program.len(), &r.program) < (e.len(), &*e) {
                *e = r.program.clone();
            }
        }
    }
    let got: BTreeMap<_, _> = space
        .prefix_sets
        .iter()
        .map(|m| match &m.extension {
            Extension::Set(s) => (s.clone(), m.program.clone()),
            _ => unreachable!(),
        })
        .collect();
    assert_eq!(got, best);
    assert!(space
        .prefix_sets
        .windows(2)
        .all(|w| w[0].scan_key() <= w[1].scan_key()));
}

#[test]
fn structure_function_is_non_increasing() {
    let lab = lab();
    let space = ModelSpace::build(&lab.catalog, 3, lab.config.width(3)).unwrap();
    for x in BitString::all_of_len(3) {
        let sweep = structure_sweep(&space, &x, 12);
        let values: Vec<u32> = sweep.iter().filter_map(|(_, h)| *h).collect();
        assert!(values.windows(2).all(|w| w[0] >= w[1]), "{x}: {sweep:?}");
    }
}

#[test]
fn census_has_one_row_per_cylinder() {
    let lab = lab();
    let cat = &lab.catalog;
    let space = ModelSpace::build(cat, 2, lab.config.width(2)).unwrap();
    for x in BitString::all_of_len(2) {
        let rows = wss_census(cat, &space, &x, 3).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert_eq!(r.prefix, x.prefix(r.i as usize));
            assert_eq!(r.verdict.log_term, Some(2 - r.i));
        }
    }
}

#[test]
fn p_prime_matches_definition() {
    let lab = lab();
    let cat = &lab.catalog;
    let slack = lab.config.depth_slack;
    let mut defined = 0;
    for n in lab.config.lengths() {
        let plain = cat.plain(n).unwrap();
        for x in BitString::all_of_len(n as usize) {
            let Some(p) = construct_p_prime(cat, &x, slack).unwrap() else {
                assert_eq!(bb_depth(cat, &x, slack).unwrap(), None);
                continue;
            };
            defined += 1;
            let k = p.k_prime;
            assert_eq!(p.t_now, bb_time(plain, k).unwrap());
            let view = cat.given_int(n, k as u64).unwrap();
            let mut want = BTreeMap::new();
            for y in BitString::all_of_len(n as usize) {
                if bb_depth(cat, &y, slack).unwrap() != Some(k) {
                    continue;
                }
                if let Some(a) = view.k_at(&y, p.t_now).finite() {
                    want.insert(y, Dyadic::pow2(k as i64 - a as i64 - p.c));
                }
            }
            let Extension::Semimeasure(t) = &p.model.extension else {
                panic!()
            };
            assert_eq!(t, &want, "{x}");
            let total: Dyadic = want.values().sum();
            assert_eq!(p.mass, total);
            assert!(total <= Dyadic::one());
            if p.c > 0 {
                assert!(total.mul_pow2(1) > Dyadic::one(), "{x}: c = {} is not least", p.c);
            }
            assert!(p.contains_x, "{x}");
            assert_eq!(p.model.complexity, Complexity::Finite(k));
            assert_eq!(p.model.program.len(), k as usize);
        }
    }
    assert!(defined > 0);
}

fn table_strategy() -> impl Strategy<Value = BTreeMap<BitString, Dyadic>> {
    // Numerators over 2^6 for the 3-bit strings, scaled down until the mass fits.
    prop::collection::vec(0u64..40, 8).prop_map(|nums| {
        let total: u64 = nums.iter().sum();
        let shift = if total > 64 {
            64 - (total - 1).leading_zeros() as i64
        } else {
            6
        };
        BitString::all_of_len(3)
            .zip(nums)
            .filter(|(_, v)| *v > 0)
            .map(|(y, v)| (y, Dyadic::new(v, shift)))
            .collect()
    })
}

proptest! {
    #[test]
    fn shannon_fano_codes_are_prefix_free_and_short(p in table_strategy()) {
        prop_assume!(p.values().sum::<Dyadic>() <= Dyadic::one());
        let code = ShannonFanoCode::new(&p).unwrap();
        prop_assert!(is_prefix_free(code.codes.values()));
        let mut before = Dyadic::zero();
        for (y, py) in &p {
            let c = &code.codes[y];
            // 2^{-(L-1)} <= P(y) < 2^{-(L-2)}
            prop_assert!(Dyadic::pow2(1 - c.len() as i64) <= *py);
            prop_assert!(*py < Dyadic::pow2(2 - c.len() as i64));
            let lo = Dyadic::from_fraction_bits(c);
            prop_assert!(before <= lo);
            prop_assert!(lo + Dyadic::pow2(-(c.len() as i64)) <= before.clone() + py.clone());
            before += py;
        }
    }

    #[test]
    fn func_to_measure_mass_at_most_one(
        map in prop::collection::btree_map(0u64..64, 0u64..8, 0..12),
        width in 4u32..12,
    ) {
        let map: BTreeMap<BitString, BitString> = map
            .into_iter()
            .map(|(d, y)| (BitString::from_nat(d), BitString::from_uint(y, 3)))
            .collect();
        let f = Model { n: 3, ..model(ModelKind::Function, Extension::Function(map.clone())) };
        let m = func_to_measure(&f, width).unwrap();
        let Extension::Semimeasure(p) = &m.extension else { unreachable!() };
        prop_assert!(p.values().sum::<Dyadic>() <= Dyadic::one());
        for (d, y) in &map {
            // Each preimage bounds the value from below, up to truncation.
            let exact = Dyadic::pow2(-(d.len() as i64) - 1);
            let floor = Dyadic::new(exact.floor_scaled(width as i64), width as i64);
            prop_assert!(p.get(y).cloned().unwrap_or_default() >= floor);
        }
    }

    #[test]
    fn model_files_round_trip(
        set in prop::collection::btree_set(0u64..16, 0..10),
        table in table_strategy(),
        program in 0u64..500,
        k in prop::option::of(0u32..40),
        plain in any::<bool>(),
    ) {
        let base = Model {
            mode: if plain { MachineMode::Plain } else { MachineMode::Prefix },
            program: BitString::from_nat(program),
            complexity: k.map_or(Complexity::Infinite, Complexity::Finite),
            ..model(ModelKind::Set, Extension::Set(BTreeSet::new()))
        };
        let s = Model {
            n: 4,
            extension: Extension::Set(set.into_iter().map(|v| BitString::from_uint(v, 4)).collect()),
            ..base.clone()
        };
        let p = Model {
            kind: ModelKind::Semimeasure,
            n: 3,
            extension: Extension::Semimeasure(table),
            ..base
        };
        for m in [s, p] {
            prop_assert_eq!(read_model(&write_model(&m)).unwrap(), m);
        }
    }
}
