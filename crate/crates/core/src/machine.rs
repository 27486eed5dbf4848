//! The AITLAB-M1 machine: eight 3-bit opcodes over a bi-infinite tape of
//! unbounded non-negative cells.
//!
//! | bits | op  | effect                                             |
//! |------|-----|----------------------------------------------------|
//! | 000  | `>` | move the data head right                           |
//! | 001  | `<` | move the data head left                            |
//! | 010  | `+` | increment the current cell                         |
//! | 011  | `-` | decrement the current cell, saturating at 0        |
//! | 100  | `[` | if the cell is 0, jump past the matching `]`       |
//! | 101  | `]` | if the cell is not 0, jump just after matching `[` |
//! | 110  | `O` | append (cell mod 2) to the output                  |
//! | 111  | `H` | halt                                               |
//!
//! Before a run the tape is zero except `cell[-1] = n` and
//! `cell[-2-i] = 1 + y_i` for the condition bits `y`; the first zero left of
//! the condition terminates it. The head starts on cell 0.
//!
//! Every executed opcode costs one step, and so does every program position
//! visited while scanning for a matching bracket. In prefix mode opcodes are
//! fetched from a bit source on demand, three bits at a time, so a halted run
//! never asks for more bits than it used. In plain mode the program is given
//! whole and running off its end is a normal halt; a trailing partial opcode
//! (1 or 2 bits) counts as the end.

use std::fmt;

use crate::bits::BitString;
use crate::error::{LabError, Result};

pub const MACHINE_VERSION: &str = "AITLAB-M1";
pub const OPCODE_BITS: u32 = 3;

pub const OP_RIGHT: u8 = 0;
pub const OP_LEFT: u8 = 1;
pub const OP_INC: u8 = 2;
pub const OP_DEC: u8 = 3;
pub const OP_OPEN: u8 = 4;
pub const OP_CLOSE: u8 = 5;
pub const OP_OUT: u8 = 6;
pub const OP_HALT: u8 = 7;

const MNEMONICS: [char; 8] = ['>', '<', '+', '-', '[', ']', 'O', 'H'];

/// Renders opcodes as mnemonics, e.g. `"O+OH"`.
pub fn disassemble(ops: &[u8]) -> String {
    ops.iter().map(|&op| MNEMONICS[op as usize]).collect()
}

/// Parses mnemonics back into program bits. Panics on unknown characters;
/// intended for tests and hand-written programs.
pub fn assemble(src: &str) -> BitString {
    let ops: Vec<u8> = src
        .chars()
        .map(|c| {
            MNEMONICS
                .iter()
                .position(|&m| m == c)
                .unwrap_or_else(|| panic!("unknown mnemonic {c:?}")) as u8
        })
        .collect();
    ops_to_bits(&ops)
}

pub fn ops_to_bits(ops: &[u8]) -> BitString {
    let mut out = BitString::new();
    for &op in ops {
        out.push(op & 4 != 0);
        out.push(op & 2 != 0);
        out.push(op & 1 != 0);
    }
    out
}

/// Complete opcodes of `bits`; a trailing partial opcode is dropped.
pub fn bits_to_ops(bits: &BitString) -> Vec<u8> {
    (0..bits.len() / 3)
        .map(|i| {
            let b = |j| bits.get(3 * i + j).expect("in range") as u8;
            b(0) << 2 | b(1) << 1 | b(2)
        })
        .collect()
}

/// Left-of-origin cells for a length parameter and condition:
/// `[n, 1 + y_0, 1 + y_1, …]`, implicitly followed by zeros.
pub fn condition_cells(length_param: u64, condition: &BitString) -> Vec<u64> {
    std::iter::once(length_param)
        .chain(condition.iter().map(|b| 1 + b as u64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineConfig {
    pub max_steps: u64,
    pub max_program_bits: u32,
    pub condition: BitString,
    pub length_param: u64,
}

impl MachineConfig {
    pub fn new(
        max_steps: u64,
        max_program_bits: u32,
        condition: BitString,
        length_param: u64,
    ) -> Result<Self> {
        if !max_program_bits.is_multiple_of(OPCODE_BITS) {
            return Err(LabError::Config(format!(
                "max_program_bits = {max_program_bits} is not a multiple of {OPCODE_BITS}"
            )));
        }
        Ok(Self {
            max_steps,
            max_program_bits,
            condition,
            length_param,
        })
    }

    pub fn max_ops(&self) -> usize {
        (self.max_program_bits / OPCODE_BITS) as usize
    }

    fn preset(&self) -> Vec<u64> {
        condition_cells(self.length_param, &self.condition)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Halted,
    BudgetExhausted,
    MachineError,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Halted => "halted",
            Status::BudgetExhausted => "budget-exhausted",
            Status::MachineError => "machine-error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecOutcome {
    pub status: Status,
    pub output: BitString,
    pub bits_read: u32,
    pub steps: u64,
}

impl ExecOutcome {
    pub fn halted(&self) -> bool {
        self.status == Status::Halted
    }
}

/// Supplies program bits on demand.
pub trait BitSource {
    fn next_bit(&mut self) -> Option<bool>;
}

/// A finite bit source over a word; runs dry at its end.
pub struct SliceSource<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl<'a> SliceSource<'a> {
    pub fn new(word: &'a BitString) -> Self {
        Self { bits: word, pos: 0 }
    }
}

impl BitSource for SliceSource<'_> {
    fn next_bit(&mut self) -> Option<bool> {
        let bit = self.bits.get(self.pos);
        self.pos += 1;
        bit
    }
}

impl<F: FnMut() -> Option<bool>> BitSource for F {
    fn next_bit(&mut self) -> Option<bool> {
        self()
    }
}

/// Bi-infinite tape; `cells[origin]` is cell 0.
#[derive(Debug, Clone)]
pub(crate) struct Tape {
    cells: Vec<u64>,
    origin: usize,
}

impl Tape {
    pub(crate) fn with_left(left: &[u64]) -> Self {
        let mut cells = Vec::with_capacity(left.len() + 16);
        cells.extend(left.iter().rev());
        let origin = cells.len();
        cells.resize(origin + 8, 0);
        Self { cells, origin }
    }

    #[inline]
    fn slot(&mut self, head: i64) -> &mut u64 {
        let idx = self.origin as i64 + head;
        if idx < 0 {
            let grow = ((-idx) as usize).max(self.cells.len());
            let mut cells = vec![0; grow];
            cells.extend_from_slice(&self.cells);
            self.cells = cells;
            self.origin += grow;
        } else if idx as usize >= self.cells.len() {
            let len = self.cells.len();
            self.cells.resize((idx as usize + 1).max(2 * len), 0);
        }
        let idx = (self.origin as i64 + head) as usize;
        &mut self.cells[idx]
    }

    /// Overwrites `cell[-1-d]` for every `d >= from_depth` with `left[d]`
    /// (zero past the end of `left`). Only valid for cells never visited.
    pub(crate) fn reload_left(&mut self, from_depth: usize, left: &[u64]) {
        let materialized = self.origin;
        for d in from_depth..materialized.max(left.len()) {
            *self.slot(-1 - d as i64) = left.get(d).copied().unwrap_or(0);
        }
    }
}

/// Why a resumable run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Event {
    Halted,
    /// The program counter reached the end of the fetched opcodes.
    NeedOp,
    Exhausted,
    Error,
    /// The head moved left of the caller's limit; the run can be resumed.
    CrossedLeft,
}

/// Resumable machine state. Drives both execution modes and the enumerator.
#[derive(Debug, Clone)]
pub(crate) struct Core {
    pub(crate) tape: Tape,
    pub(crate) head: i64,
    pub(crate) pc: usize,
    pub(crate) steps: u64,
    scan_depth: u32,
    pub(crate) output: BitString,
}

impl Core {
    pub(crate) fn new(left: &[u64]) -> Self {
        Self {
            tape: Tape::with_left(left),
            head: 0,
            pc: 0,
            steps: 0,
            scan_depth: 0,
            output: BitString::new(),
        }
    }

    /// Runs until halt, error, budget exhaustion, the end of `prog`, or the
    /// head moving below `left_limit`.
    pub(crate) fn run(&mut self, prog: &[u8], max_steps: u64, left_limit: i64) -> Event {
        loop {
            if self.pc >= prog.len() {
                return Event::NeedOp;
            }
            if self.steps >= max_steps {
                return Event::Exhausted;
            }
            self.steps += 1;
            let op = prog[self.pc];
            if self.scan_depth > 0 {
                match op {
                    OP_OPEN => self.scan_depth += 1,
                    OP_CLOSE => self.scan_depth -= 1,
                    _ => {}
                }
                self.pc += 1;
                continue;
            }
            match op {
                OP_RIGHT => self.head += 1,
                OP_LEFT => {
                    self.head -= 1;
                    if self.head < left_limit {
                        self.pc += 1;
                        return Event::CrossedLeft;
                    }
                }
                OP_INC => *self.tape.slot(self.head) += 1,
                OP_DEC => {
                    let c = self.tape.slot(self.head);
                    *c = c.saturating_sub(1);
                }
                OP_OPEN => {
                    if *self.tape.slot(self.head) == 0 {
                        self.scan_depth = 1;
                    }
                }
                OP_CLOSE => {
                    if *self.tape.slot(self.head) != 0 {
                        let mut depth = 1u32;
                        let mut q = self.pc;
                        loop {
                            if q == 0 {
                                return Event::Error;
                            }
                            q -= 1;
                            if self.steps >= max_steps {
                                return Event::Exhausted;
                            }
                            self.steps += 1;
                            match prog[q] {
                                OP_CLOSE => depth += 1,
                                OP_OPEN => {
                                    depth -= 1;
                                    if depth == 0 {
                                        break;
                                    }
                                }
                                _ => {}
                            }
                        }
                        self.pc = q;
                    }
                }
                OP_OUT => {
                    let bit = *self.tape.slot(self.head) & 1 == 1;
                    self.output.push(bit);
                }
                _ => return Event::Halted,
            }
            self.pc += 1;
        }
    }
}

fn outcome(status: Status, core: Core, fetched_ops: usize) -> ExecOutcome {
    ExecOutcome {
        status,
        output: core.output,
        bits_read: fetched_ops as u32 * OPCODE_BITS,
        steps: core.steps,
    }
}

/// Prefix-mode run: opcodes are demanded from `oracle` three bits at a time,
/// never beyond `cfg.max_program_bits`.
pub fn run_prefix<S: BitSource + ?Sized>(oracle: &mut S, cfg: &MachineConfig) -> ExecOutcome {
    let mut core = Core::new(&cfg.preset());
    let mut prog = Vec::new();
    let max_ops = cfg.max_ops();
    loop {
        let status = match core.run(&prog, cfg.max_steps, i64::MIN) {
            Event::NeedOp => {
                if prog.len() >= max_ops {
                    Status::BudgetExhausted
                } else {
                    match (oracle.next_bit(), oracle.next_bit(), oracle.next_bit()) {
                        (Some(a), Some(b), Some(c)) => {
                            prog.push((a as u8) << 2 | (b as u8) << 1 | c as u8);
                            continue;
                        }
                        _ => Status::BudgetExhausted,
                    }
                }
            }
            Event::Halted => Status::Halted,
            Event::Exhausted => Status::BudgetExhausted,
            Event::Error => Status::MachineError,
            Event::CrossedLeft => unreachable!("no left limit in direct runs"),
        };
        let fetched = prog.len();
        return outcome(status, core, fetched);
    }
}

/// Prefix-mode run over a fixed word; convenience over [`run_prefix`].
pub fn run_prefix_word(word: &BitString, cfg: &MachineConfig) -> ExecOutcome {
    run_prefix(&mut SliceSource::new(word), cfg)
}

/// Plain-mode run: the whole program is available and running off its end
/// halts normally.
pub fn run_plain(program: &BitString, cfg: &MachineConfig) -> ExecOutcome {
    let mut ops = bits_to_ops(program);
    let budget_cut = ops.len() > cfg.max_ops();
    ops.truncate(cfg.max_ops());
    let mut core = Core::new(&cfg.preset());
    let status = match core.run(&ops, cfg.max_steps, i64::MIN) {
        Event::NeedOp if budget_cut => Status::BudgetExhausted,
        Event::NeedOp | Event::Halted => Status::Halted,
        Event::Exhausted => Status::BudgetExhausted,
        Event::Error => Status::MachineError,
        Event::CrossedLeft => unreachable!("no left limit in direct runs"),
    };
    let fetched = ops.len();
    outcome(status, core, fetched)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bs;
    use proptest::prelude::*;

    fn cfg(steps: u64, bits: u32) -> MachineConfig {
        MachineConfig::new(steps, bits, BitString::new(), 0).unwrap()
    }

    #[test]
    fn halt_alone() {
        let out = run_prefix_word(&bs("111"), &cfg(10, 24));
        assert_eq!(out.status, Status::Halted);
        assert_eq!(out.output, BitString::new());
        assert_eq!(out.bits_read, 3);
        assert_eq!(out.steps, 1);
    }

    #[test]
    fn output_then_halt() {
        let out = run_prefix_word(&bs("110111"), &cfg(10, 24));
        assert_eq!(out.status, Status::Halted);
        assert_eq!(out.output, bs("0"));
        assert_eq!(out.bits_read, 6);
    }

    #[test]
    fn open_bracket_never_halts_in_prefix_mode() {
        // `[` on a zero cell scans forward for a `]` that never arrives.
        let out = run_prefix_word(&bs("100"), &cfg(100, 24));
        assert_eq!(out.status, Status::BudgetExhausted);
        let out = run_prefix(&mut || Some(false), &cfg(100, 24));
        assert_ne!(out.status, Status::Halted);
    }

    #[test]
    fn unmatched_close_is_machine_error() {
        let out = run_prefix_word(&assemble("+]H"), &cfg(100, 24));
        assert_eq!(out.status, Status::MachineError);
    }

    #[test]
    fn plain_one_opcode_programs() {
        let c = cfg(100, 24);
        let mut outputs = Vec::new();
        for op in 0..8u8 {
            let out = run_plain(&ops_to_bits(&[op]), &c);
            assert_eq!(out.status, Status::Halted, "op {op}");
            outputs.push(out.output);
        }
        // Only `O` emits anything.
        assert_eq!(outputs[OP_OUT as usize], bs("0"));
        assert_eq!(outputs[OP_OUT as usize].to_nat(), Some(1));
        assert!(outputs.iter().filter(|o| !o.is_empty()).count() == 1);
    }

    #[test]
    fn plain_empty_program_halts() {
        let out = run_plain(&BitString::new(), &cfg(100, 24));
        assert_eq!(out.status, Status::Halted);
        assert!(out.output.is_empty());
        assert_eq!(out.output.to_nat(), Some(0));
    }

    #[test]
    fn plain_skip_loop_to_end() {
        let out = run_plain(&bs("100101"), &cfg(100, 24));
        assert_eq!(out.status, Status::Halted);
        assert!(out.output.is_empty());
        // `[` plus one scanned position.
        assert_eq!(out.steps, 2);
    }

    #[test]
    fn plain_partial_trailing_opcode_is_end() {
        let c = cfg(100, 24);
        assert_eq!(run_plain(&bs("1101"), &c), run_plain(&bs("110"), &c));
        assert_eq!(run_plain(&bs("11011"), &c), run_plain(&bs("110"), &c));
    }

    #[test]
    fn loop_counts_scanned_positions() {
        // ++[O-]H: two iterations emitting 0 then 1.
        let out = run_prefix_word(&assemble("++[O-]H"), &cfg(100, 24));
        assert_eq!(out.status, Status::Halted);
        assert_eq!(out.output, bs("01"));
        // ++ (2) [ (1) then per pass O - ] (3) and, on the first pass, a
        // 3-position scan back to `[`; then H.
        assert_eq!(out.steps, 2 + 1 + 3 + 3 + 3 + 1);
    }

    #[test]
    fn decrement_saturates() {
        let out = run_prefix_word(&assemble("--+OH"), &cfg(100, 24));
        assert_eq!(out.output, bs("1"));
    }

    #[test]
    fn condition_tape_layout() {
        // <O reads n's parity; <<O reads 1 + y_0.
        let c = MachineConfig::new(100, 24, bs("1"), 5).unwrap();
        assert_eq!(run_prefix_word(&assemble("<OH"), &c).output, bs("1"));
        assert_eq!(run_prefix_word(&assemble("<<OH"), &c).output, bs("0"));
        let c = MachineConfig::new(100, 24, bs("0"), 4).unwrap();
        assert_eq!(run_prefix_word(&assemble("<O<OH"), &c).output, bs("01"));
        // Past the condition the terminator is 0.
        assert_eq!(run_prefix_word(&assemble("<<<+OH"), &c).output, bs("1"));
    }

    #[test]
    fn bit_budget_must_be_opcode_aligned() {
        assert!(MachineConfig::new(10, 25, BitString::new(), 0).is_err());
    }

    #[test]
    fn step_budget_is_inclusive() {
        let prog = assemble("OOOH");
        assert_eq!(run_prefix_word(&prog, &cfg(4, 24)).status, Status::Halted);
        assert_eq!(
            run_prefix_word(&prog, &cfg(3, 24)).status,
            Status::BudgetExhausted
        );
    }

    proptest! {
        #[test]
        fn deterministic_and_aligned(ops in proptest::collection::vec(0u8..8, 0..10), n in 0u64..8) {
            let c = MachineConfig::new(300, 30, bs("01"), n).unwrap();
            let prog = ops_to_bits(&ops);
            let a = run_prefix_word(&prog, &c);
            let b = run_prefix_word(&prog, &c);
            prop_assert_eq!(&a, &b);
            if a.halted() {
                prop_assert_eq!(a.bits_read % 3, 0);
                prop_assert!(a.steps <= 300);
            }
            prop_assert_eq!(run_plain(&prog, &c), run_plain(&prog, &c));
        }

        #[test]
        fn monotone_in_budget(ops in proptest::collection::vec(0u8..8, 0..10)) {
            let prog = ops_to_bits(&ops);
            let small = run_prefix_word(&prog, &cfg(40, 24));
            if small.halted() {
                let big = run_prefix_word(&prog, &cfg(400, 30));
                prop_assert_eq!(big, small);
            }
        }
    }
}
