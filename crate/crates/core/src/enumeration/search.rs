//! Demand-tree search over prefix-mode programs.
//!
//! Every opcode fetch forks eight ways. One search serves a whole batch of
//! tape presets (length parameter plus condition): a subtree is explored once
//! for all presets that agree on every cell the head has visited, and is split
//! the first time the head steps onto a cell where they differ.

use std::sync::Arc;

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::enumeration::plain::PlainAcc;
use crate::enumeration::{Budgets, HaltRecord};
use crate::machine::{ops_to_bits, Core, Event};

/// Levels of the tree below which children are handed to the thread pool.
const PARALLEL_DEPTH: usize = 3;

pub(crate) struct Preset {
    pub(crate) left: Vec<u64>,
    pub(crate) collect_plain: bool,
}

pub(crate) struct SearchOutput {
    pub(crate) records: Vec<Vec<HaltRecord>>,
    pub(crate) plain: Vec<Option<PlainAcc>>,
}

impl SearchOutput {
    fn empty(presets: &[Preset], max_ops: usize) -> Self {
        Self {
            records: presets.iter().map(|_| Vec::new()).collect(),
            plain: presets
                .iter()
                .map(|p| p.collect_plain.then(|| PlainAcc::new(max_ops)))
                .collect(),
        }
    }

    fn merge(mut self, other: SearchOutput) -> Self {
        for (mine, theirs) in self.records.iter_mut().zip(other.records) {
            if mine.is_empty() {
                *mine = theirs;
            } else {
                mine.extend(theirs);
            }
        }
        for (mine, theirs) in self.plain.iter_mut().zip(other.plain) {
            if let (Some(a), Some(b)) = (mine.as_mut(), theirs) {
                a.merge(b);
            }
        }
        self
    }
}

struct Ctx<'a> {
    presets: &'a [Preset],
    budgets: Budgets,
    max_ops: usize,
}

#[derive(Clone)]
struct Node {
    core: Core,
    prog: SmallVec<[u8; 16]>,
    /// Preset indices sharing this subtree.
    group: Arc<[u32]>,
    /// Cells `-1 … -shared` hold identical values for the whole group.
    shared: usize,
}

impl Node {
    fn left_limit(&self) -> i64 {
        if self.group.len() == 1 {
            i64::MIN
        } else {
            -(self.shared as i64)
        }
    }
}

fn cell(preset: &Preset, depth: usize) -> u64 {
    preset.left.get(depth).copied().unwrap_or(0)
}

/// Length of the common prefix of the presets' left cells.
fn shared_depth(presets: &[Preset], group: &[u32]) -> usize {
    if group.len() < 2 {
        return usize::MAX;
    }
    let longest = group
        .iter()
        .map(|&i| presets[i as usize].left.len())
        .max()
        .unwrap_or(0);
    let first = &presets[group[0] as usize];
    (0..=longest)
        .find(|&d| {
            group[1..]
                .iter()
                .any(|&i| cell(&presets[i as usize], d) != cell(first, d))
        })
        .expect("presets in a batch are distinct")
}

pub(crate) fn search(presets: &[Preset], budgets: Budgets) -> SearchOutput {
    let max_ops = (budgets.max_program_bits / 3) as usize;
    let ctx = Ctx {
        presets,
        budgets,
        max_ops,
    };
    if presets.is_empty() {
        return SearchOutput::empty(presets, max_ops);
    }
    let group: Vec<u32> = (0..presets.len() as u32).collect();
    let shared = shared_depth(presets, &group);
    let root = Node {
        core: Core::new(&presets[0].left),
        prog: SmallVec::new(),
        group: group.into(),
        shared,
    };
    let mut out = SearchOutput::empty(presets, max_ops);
    explore(&ctx, root, &mut out);
    out
}

fn explore(ctx: &Ctx<'_>, mut node: Node, out: &mut SearchOutput) {
    let event = node
        .core
        .run(&node.prog, ctx.budgets.max_steps, node.left_limit());
    match event {
        Event::CrossedLeft => split(ctx, node, out),
        Event::Halted => {
            let record = HaltRecord {
                program: ops_to_bits(&node.prog),
                steps: node.core.steps,
                output: node.core.output.clone(),
            };
            for &i in node.group.iter() {
                if let Some(acc) = out.plain[i as usize].as_mut() {
                    acc.halt_at(node.prog.len(), &record);
                }
            }
            let (last, rest) = node.group.split_last().expect("nonempty group");
            for &i in rest {
                out.records[i as usize].push(record.clone());
            }
            out.records[*last as usize].push(record);
        }
        Event::Exhausted | Event::Error => {}
        Event::NeedOp => {
            record_plain_end(&node, out);
            if node.prog.len() < ctx.max_ops {
                fork(ctx, node, out);
            }
        }
    }
}

fn record_plain_end(node: &Node, out: &mut SearchOutput) {
    let mut record = None;
    for &i in node.group.iter() {
        if let Some(acc) = out.plain[i as usize].as_mut() {
            let r = record.get_or_insert_with(|| HaltRecord {
                program: ops_to_bits(&node.prog),
                steps: node.core.steps,
                output: node.core.output.clone(),
            });
            acc.end_at(node.prog.len(), r);
        }
    }
}

fn fork(ctx: &Ctx<'_>, node: Node, out: &mut SearchOutput) {
    if node.prog.len() < PARALLEL_DEPTH {
        let merged = (0..8u8)
            .into_par_iter()
            .map(|op| {
                let mut child = node.clone();
                child.prog.push(op);
                let mut sub = SearchOutput::empty(ctx.presets, ctx.max_ops);
                explore(ctx, child, &mut sub);
                sub
            })
            .reduce(
                || SearchOutput::empty(ctx.presets, ctx.max_ops),
                SearchOutput::merge,
            );
        let taken = std::mem::replace(out, SearchOutput::empty(ctx.presets, ctx.max_ops));
        *out = taken.merge(merged);
    } else {
        for op in 0..7u8 {
            let mut child = node.clone();
            child.prog.push(op);
            explore(ctx, child, out);
        }
        let mut child = node;
        child.prog.push(7);
        explore(ctx, child, out);
    }
}

/// The head just stepped onto cell `-1 - shared`, where the group disagrees.
fn split(ctx: &Ctx<'_>, node: Node, out: &mut SearchOutput) {
    let depth = node.shared;
    let mut buckets: Vec<(u64, Vec<u32>)> = Vec::new();
    for &i in node.group.iter() {
        let v = cell(&ctx.presets[i as usize], depth);
        match buckets.iter_mut().find(|(value, _)| *value == v) {
            Some((_, members)) => members.push(i),
            None => buckets.push((v, vec![i])),
        }
    }
    for (_, members) in buckets {
        let mut child = node.clone();
        let rep = &ctx.presets[members[0] as usize];
        child.core.tape.reload_left(depth, &rep.left);
        child.shared = shared_depth(ctx.presets, &members);
        child.group = members.into();
        explore(ctx, child, out);
    }
}
