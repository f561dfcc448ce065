//! Context-sensitive interprocedural engine: call-string propagation over
//! the supergraph in either direction, with value-based termination via
//! representation at procedure entry boundaries and regeneration at exit
//! boundaries.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::lang::{EdgeKind, Supergraph};
use crate::{Error, Result};

/// A calling context: the sequence of unfinished call sites. Ordered by
/// (length, site sequence) so the shortest string is the minimum — the
/// representative-selection rule.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CallString(Vec<u32>);

impl CallString {
    pub fn lambda() -> Self {
        CallString(Vec::new())
    }

    pub fn sites(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&self, site: u32) -> Self {
        let mut v = self.0.clone();
        v.push(site);
        CallString(v)
    }

    /// All proper prefixes, longest first (down to λ).
    pub fn proper_prefixes(&self) -> impl Iterator<Item = CallString> + '_ {
        (0..self.0.len())
            .rev()
            .map(move |k| CallString(self.0[..k].to_vec()))
    }
}

impl PartialOrd for CallString {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CallString {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for CallString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "λ")
        } else {
            for s in &self.0 {
                write!(f, "c{s}")?;
            }
            Ok(())
        }
    }
}

/// Grow the context across the edge where the analysis direction enters a
/// procedure: call edges for a forward analysis, return edges for a
/// backward one.
pub fn extend_on_call(sigma: &CallString, site: u32) -> CallString {
    sigma.push(site)
}

/// Match-and-drop across the opposite edge; `None` means BLOCKED — the
/// value is silently not propagated, which is exactly what excludes
/// interprocedurally invalid paths.
pub fn match_on_return(sigma: &CallString, site: u32) -> Option<CallString> {
    match sigma.0.split_last() {
        Some((&last, rest)) if last == site => Some(CallString(rest.to_vec())),
        _ => None,
    }
}

/// Partition entry-boundary values: within each group of call strings with
/// identical values only the representative (minimum, i.e. shortest then
/// lexicographic) is propagated through the body. Returns the kept strings
/// and the log `represented -> representative`.
pub fn represent<V: Eq + Ord + Clone>(
    entries: &BTreeMap<CallString, V>,
) -> (BTreeSet<CallString>, BTreeMap<CallString, CallString>) {
    let mut by_value: BTreeMap<&V, Vec<&CallString>> = BTreeMap::new();
    for (sigma, v) in entries {
        by_value.entry(v).or_default().push(sigma);
    }
    let mut kept = BTreeSet::new();
    let mut log = BTreeMap::new();
    for group in by_value.values() {
        let rep = group.iter().min().unwrap();
        kept.insert((*rep).clone());
        for sigma in group {
            if sigma != rep {
                log.insert((*sigma).clone(), (*rep).clone());
            }
        }
    }
    (kept, log)
}

/// Recreate represented call strings at the exit boundary: each represented
/// string receives its representative's exit value.
pub fn regenerate<V: Clone + Ord>(
    exit_entries: &BTreeMap<CallString, V>,
    log: &BTreeMap<CallString, CallString>,
) -> BTreeMap<CallString, V> {
    let mut out = exit_entries.clone();
    for (represented, rep) in log {
        if let Some(v) = exit_entries.get(rep) {
            out.insert(represented.clone(), v.clone());
        }
    }
    out
}

/// Context lookup with the longest-prefix rule: a call string constructed by
/// one analysis may not exist in the other's tables (cyclic strings beyond
/// the represented depth); its value must equal that of its longest
/// recorded prefix. `None` means not even λ has a value.
pub fn lookup_longest_prefix<'a, V>(
    table: &'a BTreeMap<CallString, V>,
    sigma: &CallString,
) -> Option<&'a V> {
    if let Some(v) = table.get(sigma) {
        return Some(v);
    }
    for p in sigma.proper_prefixes() {
        if let Some(v) = table.get(&p) {
            return Some(v);
        }
    }
    None
}

/// Lattice values the engine can drive: sets under union, ⊤ = ∅.
pub trait Value: Clone + Eq + Ord + Default + fmt::Debug {
    /// Join (set union); returns true when `self` changed.
    fn union_with(&mut self, other: &Self) -> bool;
}

impl<T: Clone + Eq + Ord + fmt::Debug> Value for BTreeSet<T> {
    fn union_with(&mut self, other: &Self) -> bool {
        let before = self.len();
        self.extend(other.iter().cloned());
        self.len() != before
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRec {
    pub from: usize,
    pub to: usize,
    pub site: Option<u32>,
    pub sigma: CallString,
    pub value_hash: u64,
}

/// Per-node context tables after an interprocedural fixpoint. `input` /
/// `output` are in the *analysis* direction: for a backward analysis,
/// `input` holds the exit-boundary (Lout) tables and `output` the
/// entry-boundary (Lin) ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterResult<V> {
    pub input: Vec<BTreeMap<CallString, V>>,
    pub output: Vec<BTreeMap<CallString, V>>,
    pub rep_logs: BTreeMap<usize, BTreeMap<CallString, CallString>>,
    pub iterations: usize,
    pub max_table: usize,
    pub trace: Vec<TraceRec>,
}

impl<V: Value> InterResult<V> {
    pub fn merged_input(&self, node: usize) -> V {
        let mut m = V::default();
        for v in self.input[node].values() {
            m.union_with(v);
        }
        m
    }

    pub fn merged_output(&self, node: usize) -> V {
        let mut m = V::default();
        for v in self.output[node].values() {
            m.union_with(v);
        }
        m
    }
}

#[derive(Clone, Copy)]
enum EKind {
    Intra,
    Push(u32),
    Pop(u32),
}

/// Supergraph re-oriented for one analysis direction. Push edges are where
/// the context grows (call edges forward, return edges backward); pop edges
/// are where it must match and shrink.
struct View {
    in_edges: Vec<Vec<(usize, EKind)>>,
    out_edges: Vec<Vec<(usize, EKind)>>,
    /// Worklist priority (reverse post-order in the view direction).
    prio: Vec<usize>,
    boundary: usize,
    /// Procedure entry boundary (push-edge target) -> matching exit node.
    entry_to_exit: BTreeMap<usize, usize>,
    exit_to_entry: BTreeMap<usize, usize>,
}

fn build_view(sg: &Supergraph, dir: Direction) -> View {
    let n = sg.len();
    let mut in_edges = vec![Vec::new(); n];
    let mut out_edges = vec![Vec::new(); n];
    let add = |from: usize, to: usize, kind: EKind,
                   in_e: &mut Vec<Vec<(usize, EKind)>>,
                   out_e: &mut Vec<Vec<(usize, EKind)>>| {
        out_e[from].push((to, kind));
        in_e[to].push((from, kind));
    };
    for (u, succs) in sg.succ.iter().enumerate() {
        for &(v, kind) in succs {
            match (dir, kind) {
                (Direction::Forward, EdgeKind::Intra) => {
                    add(u, v, EKind::Intra, &mut in_edges, &mut out_edges)
                }
                (Direction::Forward, EdgeKind::Call(i)) => {
                    add(u, v, EKind::Push(i), &mut in_edges, &mut out_edges)
                }
                (Direction::Forward, EdgeKind::Ret(i)) => {
                    add(u, v, EKind::Pop(i), &mut in_edges, &mut out_edges)
                }
                (Direction::Backward, EdgeKind::Intra) => {
                    add(v, u, EKind::Intra, &mut in_edges, &mut out_edges)
                }
                // Backward analyses enter a procedure through its return
                // edge and leave through its call edge.
                (Direction::Backward, EdgeKind::Ret(i)) => {
                    add(v, u, EKind::Push(i), &mut in_edges, &mut out_edges)
                }
                (Direction::Backward, EdgeKind::Call(i)) => {
                    add(v, u, EKind::Pop(i), &mut in_edges, &mut out_edges)
                }
            }
        }
    }
    let mut entry_to_exit = BTreeMap::new();
    let mut exit_to_entry = BTreeMap::new();
    for &(start, end) in sg.proc_bounds.values() {
        let (en, ex) = match dir {
            Direction::Forward => (start, end),
            Direction::Backward => (end, start),
        };
        entry_to_exit.insert(en, ex);
        exit_to_entry.insert(ex, en);
    }
    let prio = match dir {
        Direction::Forward => (0..n).collect(),
        Direction::Backward => (0..n).map(|i| n - 1 - i).collect(),
    };
    let boundary = match dir {
        Direction::Forward => sg.entry,
        Direction::Backward => sg.exit,
    };
    View { in_edges, out_edges, prio, boundary, entry_to_exit, exit_to_entry }
}

fn hash_value<V: fmt::Debug>(v: &V) -> u64 {
    let mut h = DefaultHasher::new();
    format!("{v:?}").hash(&mut h);
    h.finish()
}

/// Work-list fixpoint over ⟨σ, value⟩ pairs. `transfer(node, σ, in) -> out`
/// is the node flow function in the analysis direction; `refine_in` is
/// applied to the meet of incoming values (the Ain restriction to Lin for
/// points-to, identity for liveness). `bi` is the boundary value at λ.
pub fn interproc_solve<V: Value>(
    sg: &Supergraph,
    dir: Direction,
    bi: V,
    transfer: &mut dyn FnMut(usize, &CallString, &V) -> V,
    refine_in: &mut dyn FnMut(usize, &CallString, V) -> V,
    iteration_limit: usize,
    want_trace: bool,
) -> Result<InterResult<V>> {
    let view = build_view(sg, dir);
    let n = sg.len();
    let mut res = InterResult {
        input: vec![BTreeMap::new(); n],
        output: vec![BTreeMap::new(); n],
        rep_logs: BTreeMap::new(),
        iterations: 0,
        max_table: 0,
        trace: Vec::new(),
    };
    let mut worklist: BTreeSet<(usize, usize, CallString)> = BTreeSet::new();
    worklist.insert((view.prio[view.boundary], view.boundary, CallString::lambda()));

    while let Some(item) = worklist.iter().next().cloned() {
        worklist.remove(&item);
        let (_, node, sigma) = item;
        res.iterations += 1;
        if res.iterations > iteration_limit {
            return Err(Error::Analysis(format!(
                "interprocedural iteration limit {iteration_limit} exceeded"
            )));
        }

        // Meet over view-incoming edges (plus BI at the boundary).
        let mut in_val = V::default();
        if node == view.boundary && sigma.is_empty() {
            in_val.union_with(&bi);
        }
        for &(m, kind) in &view.in_edges[node] {
            let contrib = match kind {
                EKind::Intra => res.output[m].get(&sigma),
                EKind::Push(i) => match sigma.sites().split_last() {
                    Some((&last, rest)) if last == i => {
                        res.output[m].get(&CallString(rest.to_vec()))
                    }
                    _ => None,
                },
                EKind::Pop(i) => res.output[m].get(&extend_on_call(&sigma, i)),
            };
            if let Some(c) = contrib {
                in_val.union_with(c);
            }
        }
        let in_val = refine_in(node, &sigma, in_val);

        let in_changed = res.input[node].get(&sigma) != Some(&in_val);
        if in_changed {
            res.input[node].insert(sigma.clone(), in_val.clone());
            res.max_table = res.max_table.max(res.input[node].len());
        }

        // Representation at procedure entry boundaries.
        if let Some(&exit) = view.entry_to_exit.get(&node) {
            let old_log = res.rep_logs.get(&node).cloned().unwrap_or_default();
            let (_kept, log) = represent(&res.input[node]);
            let log_changed = log != old_log;
            if log_changed {
                res.rep_logs.insert(node, log.clone());
            }
            if (in_changed || log_changed) && !res.input[node].is_empty() {
                // Statuses of other strings at this boundary may have
                // flipped; revisit them.
                for other in res.input[node].keys() {
                    if *other != sigma {
                        worklist.insert((view.prio[node], node, other.clone()));
                    }
                }
            }
            if let Some(rep) = log.get(&sigma) {
                // σ is represented: do not propagate through the body;
                // regenerate its exit value from the representative.
                let rep_out = res.output[exit].get(rep).cloned();
                if let Some(v) = rep_out {
                    let existed = res.output[exit].contains_key(&sigma);
                    let slot = res.output[exit].entry(sigma.clone()).or_default();
                    if slot.union_with(&v) || !existed {
                        res.max_table = res.max_table.max(res.output[exit].len());
                        enqueue_succs(
                            &view, exit, &sigma, &res.output, &mut worklist, &mut res.trace,
                            want_trace,
                        );
                    }
                }
                continue;
            }
        }

        let out_val = transfer(node, &sigma, &in_val);
        let changed = {
            // A first visit counts as a change even when the value is the
            // empty set: absence means "unreached", not ⊤.
            let existed = res.output[node].contains_key(&sigma);
            let slot = res.output[node].entry(sigma.clone()).or_default();
            slot.union_with(&out_val) || !existed
        };
        res.max_table = res.max_table.max(res.output[node].len());
        if changed {
            enqueue_succs(&view, node, &sigma, &res.output, &mut worklist, &mut res.trace, want_trace);
            // Regeneration: an exit value change must be copied to every
            // call string this representative stands for.
            if let Some(&entry) = view.exit_to_entry.get(&node) {
                let log = res.rep_logs.get(&entry).cloned().unwrap_or_default();
                let my_out = res.output[node][&sigma].clone();
                for (represented, rep) in &log {
                    if rep == &sigma {
                        let existed = res.output[node].contains_key(represented);
                        let slot = res.output[node].entry(represented.clone()).or_default();
                        if slot.union_with(&my_out) || !existed {
                            enqueue_succs(
                                &view, node, represented, &res.output, &mut worklist,
                                &mut res.trace, want_trace,
                            );
                        }
                    }
                }
                res.max_table = res.max_table.max(res.output[node].len());
            }
        }
    }
    Ok(res)
}

fn enqueue_succs<V: Value>(
    view: &View,
    node: usize,
    sigma: &CallString,
    output: &[BTreeMap<CallString, V>],
    worklist: &mut BTreeSet<(usize, usize, CallString)>,
    trace: &mut Vec<TraceRec>,
    want_trace: bool,
) {
    for &(s, kind) in &view.out_edges[node] {
        let (next, site) = match kind {
            EKind::Intra => (Some(sigma.clone()), None),
            EKind::Push(i) => (Some(extend_on_call(sigma, i)), Some(i)),
            EKind::Pop(i) => (match_on_return(sigma, i), Some(i)),
        };
        if let Some(next) = next {
            if want_trace {
                trace.push(TraceRec {
                    from: node,
                    to: s,
                    site,
                    sigma: next.clone(),
                    value_hash: hash_value(&output[node][sigma]),
                });
            }
            worklist.insert((view.prio[s], s, next));
        }
    }
}
