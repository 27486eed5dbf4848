use std::collections::HashMap;

use aitlab::bits::{bs, is_prefix_free, BitString};
use aitlab::machine::{assemble, run_plain, run_prefix_word, MachineConfig, Status};
use proptest::prelude::*;

/// Outcome of the reference interpreter: status, output, opcodes fetched, steps.
type Reference = (Status, BitString, usize, u64);

/// A direct transcription of the opcode table over a hash-map tape. `ops`
/// holds every opcode available (already cut to the opcode budget); running
/// past it halts in plain mode unless the program was cut, and exhausts the
/// budget in prefix mode.
fn reference(ops: &[u8], plain: bool, cut: bool, cfg: &MachineConfig) -> Reference {
    let mut tape: HashMap<i64, u64> = HashMap::new();
    tape.insert(-1, cfg.length_param);
    for (i, b) in cfg.condition.iter().enumerate() {
        tape.insert(-2 - i as i64, 1 + b as u64);
    }
    let (mut head, mut pc, mut steps, mut fetched) = (0i64, 0usize, 0u64, 0usize);
    let mut out = BitString::new();
    let end = |fetched, steps, out| {
        let status = if plain && !cut {
            Status::Halted
        } else {
            Status::BudgetExhausted
        };
        (status, out, fetched, steps)
    };
    loop {
        if pc >= ops.len() {
            return end(fetched, steps, out);
        }
        fetched = fetched.max(pc + 1);
        if steps >= cfg.max_steps {
            return (Status::BudgetExhausted, out, fetched, steps);
        }
        steps += 1;
        let cell = *tape.get(&head).unwrap_or(&0);
        match ops[pc] {
            0 => head += 1,
            1 => head -= 1,
            2 => *tape.entry(head).or_insert(0) += 1,
            3 => *tape.entry(head).or_insert(0) = cell.saturating_sub(1),
            4 if cell == 0 => {
                let mut depth = 1;
                while depth > 0 {
                    pc += 1;
                    if pc >= ops.len() {
                        return end(fetched, steps, out);
                    }
                    fetched = fetched.max(pc + 1);
                    if steps >= cfg.max_steps {
                        return (Status::BudgetExhausted, out, fetched, steps);
                    }
                    steps += 1;
                    match ops[pc] {
                        4 => depth += 1,
                        5 => depth -= 1,
                        _ => {}
                    }
                }
            }
            5 if cell != 0 => {
                let mut depth = 1;
                while depth > 0 {
                    if pc == 0 {
                        return (Status::MachineError, out, fetched, steps);
                    }
                    pc -= 1;
                    if steps >= cfg.max_steps {
                        return (Status::BudgetExhausted, out, fetched, steps);
                    }
                    steps += 1;
                    match ops[pc] {
                        5 => depth += 1,
                        4 => depth -= 1,
                        _ => {}
                    }
                }
            }
            6 => out.push(cell % 2 == 1),
            7 => return (Status::Halted, out, fetched, steps),
            _ => {}
        }
        pc += 1;
    }
}

fn ops_of(word: &BitString) -> Vec<u8> {
    let b = |i: usize| word.get(i).unwrap() as u8;
    (0..word.len() / 3)
        .map(|i| b(3 * i) << 2 | b(3 * i + 1) << 1 | b(3 * i + 2))
        .collect()
}

fn cfg(steps: u64, bits: u32) -> MachineConfig {
    MachineConfig::new(steps, bits, BitString::new(), 0).unwrap()
}

#[test]
fn natural_association_examples() {
    for (w, k) in [("", 0), ("0", 1), ("1", 2), ("00", 3), ("111", 14)] {
        let w = BitString::from_field(if w.is_empty() { "-" } else { w }).unwrap();
        assert_eq!(w.to_nat(), Some(k));
        assert_eq!(BitString::from_nat(k), w);
    }
}

#[test]
fn prefix_examples() {
    let c = cfg(100, 24);
    let r = run_prefix_word(&bs("111"), &c);
    assert_eq!((r.status, r.output.len(), r.bits_read), (Status::Halted, 0, 3));
    let r = run_prefix_word(&bs("110111"), &c);
    assert_eq!((r.status, r.output, r.bits_read), (Status::Halted, bs("0"), 6));
    for word in ["100", "100000000", "100111"] {
        assert!(!run_prefix_word(&bs(word), &c).halted(), "{word}");
    }
}

#[test]
fn plain_examples() {
    let c = cfg(100, 24);
    let r = run_plain(&bs("110"), &c);
    assert_eq!((r.status, r.output.to_nat()), (Status::Halted, Some(1)));
    let r = run_plain(&BitString::new(), &c);
    assert_eq!((r.status, r.output.len()), (Status::Halted, 0));
    let r = run_plain(&bs("100101"), &c);
    assert_eq!((r.status, r.output.len()), (Status::Halted, 0));
}

#[test]
fn condition_cells_are_readable() {
    // cell[-1] = n, cell[-2] = 1 + y_0, cell[-3] = 1 + y_1, cell[-4] = 0.
    let c = MachineConfig::new(100, 24, bs("10"), 3).unwrap();
    assert_eq!(run_plain(&assemble("<O<O<O<O"), &c).output, bs("1010"));
    let c = MachineConfig::new(100, 24, bs("01"), 2).unwrap();
    assert_eq!(run_plain(&assemble("<O<O<O<O"), &c).output, bs("0100"));
}

#[test]
fn halting_domain_is_prefix_free() {
    let c = cfg(60, 12);
    let mut halting = Vec::new();
    for len in 0..=12 {
        for w in BitString::all_of_len(len) {
            let r = run_prefix_word(&w, &c);
            if r.halted() && r.bits_read as usize == len {
                halting.push(w);
            }
        }
    }
    assert!(halting.len() > 100);
    assert!(is_prefix_free(&halting));
}

fn word(max_bits: usize) -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), 0..=max_bits).prop_map(BitString::from_bits)
}

fn config() -> impl Strategy<Value = MachineConfig> {
    (0u64..400, 0u32..=8, word(6), 0u64..8)
        .prop_map(|(steps, ops, cond, n)| MachineConfig::new(steps, 3 * ops, cond, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn prefix_mode_matches_reference(w in word(30), c in config()) {
        let all = ops_of(&w);
        let avail = &all[..all.len().min(c.max_ops())];
        let (status, output, fetched, steps) = reference(avail, false, false, &c);
        let r = run_prefix_word(&w, &c);
        prop_assert_eq!(r.status, status);
        prop_assert_eq!(r.output, output);
        prop_assert_eq!(r.bits_read as usize, 3 * fetched);
        prop_assert_eq!(r.steps, steps);
    }

    #[test]
    fn plain_mode_matches_reference(w in word(30), c in config()) {
        let all = ops_of(&w);
        let cut = all.len() > c.max_ops();
        let avail = &all[..all.len().min(c.max_ops())];
        let (status, output, _, steps) = reference(avail, true, cut, &c);
        let r = run_plain(&w, &c);
        prop_assert_eq!(r.status, status);
        prop_assert_eq!(r.output, output);
        prop_assert_eq!(r.steps, steps);
    }

    #[test]
    fn halting_is_monotone_in_budgets(
        ops in prop::collection::vec(0u8..7, 0..8),
        tail in word(6),
        c in config(),
        more_steps in 0u64..200,
        more_ops in 0u32..4,
    ) {
        // Ending the opcodes with H makes most runs halt.
        let mut w = aitlab::machine::ops_to_bits(&ops).concat(&bs("111"));
        w.extend_from(&tail);
        let r = run_prefix_word(&w, &c);
        if !r.halted() {
            return Ok(());
        }
        prop_assert!(r.steps <= c.max_steps && r.bits_read <= c.max_program_bits);
        prop_assert_eq!(r.bits_read % 3, 0);
        let bigger = MachineConfig::new(
            c.max_steps + more_steps,
            c.max_program_bits + 3 * more_ops,
            c.condition.clone(),
            c.length_param,
        )
        .unwrap();
        prop_assert_eq!(run_prefix_word(&w, &bigger), r.clone());
        // The consumed prefix alone gives the same run.
        prop_assert_eq!(run_prefix_word(&w.prefix(r.bits_read as usize), &c), r);
    }

    #[test]
    fn runs_are_repeatable(w in word(30), c in config()) {
        prop_assert_eq!(run_prefix_word(&w, &c), run_prefix_word(&w, &c));
        prop_assert_eq!(run_plain(&w, &c), run_plain(&w, &c));
    }

    #[test]
    fn natural_association_round_trips(k in 0u64..1_000_000) {
        prop_assert_eq!(BitString::from_nat(k).to_nat(), Some(k));
    }
}
