use std::collections::{BTreeMap, BTreeSet};

use crate::callstrings::CallString;
use crate::lang::{build_supergraph, EdgeKind, NodeKind, Program, Stmt, Supergraph, NULL, UNDEF};
use crate::Result;

#[derive(Clone, Debug)]
pub struct OracleConfig {
    /// Max times any branch node may take a back edge on one path.
    pub branch_bound: usize,
    /// Max call-stack depth; deeper paths are pruned.
    pub recursion_bound: usize,
    /// Cap on total node visits across all enumerated paths.
    pub step_cap: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { branch_bound: 4, recursion_bound: 4, step_cap: 2_000_000 }
    }
}

/// Per-node, per-calling-context observations: the set of locations each
/// pointer was seen holding on entry to the node, over every enumerated
/// execution.
#[derive(Clone, Debug)]
pub struct OracleResult {
    pub observed: Vec<BTreeMap<CallString, BTreeMap<String, BTreeSet<String>>>>,
    pub paths: usize,
    /// True when the step cap cut enumeration short.
    pub truncated: bool,
}

impl OracleResult {
    /// Observations at a node joined over calling contexts.
    pub fn merged(&self, node: usize) -> BTreeMap<String, BTreeSet<String>> {
        let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for per_ptr in self.observed[node].values() {
            for (p, locs) in per_ptr {
                out.entry(p.clone()).or_default().extend(locs.iter().cloned());
            }
        }
        out
    }
}

struct Interp<'a> {
    sg: &'a Supergraph,
    program: &'a Program,
    cfg_back: BTreeSet<(usize, usize)>,
    config: &'a OracleConfig,
    observed: Vec<BTreeMap<CallString, BTreeMap<String, BTreeSet<String>>>>,
    steps: usize,
    paths: usize,
    truncated: bool,
}

/// Concretely interprets the program, enumerating every branch decision
/// within the bounds. Uninitialized pointers hold `?`. A store through `?`
/// or `null` aborts the path (the Java-like reading of undefined
/// dereference); a load through a non-pointer yields `?`.
pub fn oracle_enumerate(program: &Program, config: &OracleConfig) -> Result<OracleResult> {
    let sg = build_supergraph(program)?;
    let mut interp = Interp {
        cfg_back: sg.back_edges.iter().cloned().collect(),
        sg: &sg,
        program,
        config,
        observed: vec![BTreeMap::new(); sg.len()],
        steps: 0,
        paths: 0,
        truncated: false,
    };
    let state: BTreeMap<String, String> = program
        .pointers
        .iter()
        .map(|p| (p.clone(), UNDEF.to_string()))
        .collect();
    interp.run(sg.entry, state, Vec::new(), BTreeMap::new());
    Ok(OracleResult {
        observed: interp.observed,
        paths: interp.paths,
        truncated: interp.truncated,
    })
}

impl<'a> Interp<'a> {
    fn run(
        &mut self,
        node: usize,
        mut state: BTreeMap<String, String>,
        // (return node, call site) per unfinished call; the site column is
        // the current call string
        mut stack: Vec<(usize, u32)>,
        mut loops: BTreeMap<usize, usize>,
    ) {
        let mut node = node;
        loop {
            if self.steps >= self.config.step_cap {
                self.truncated = true;
                return;
            }
            self.steps += 1;
            let sigma = stack
                .iter()
                .fold(CallString::lambda(), |s, &(_, site)| s.push(site));
            let obs = self.observed[node].entry(sigma).or_default();
            for (p, l) in &state {
                obs.entry(p.clone()).or_default().insert(l.clone());
            }

            match self.sg.nodes[node].kind {
                NodeKind::CallSite(site) => {
                    if stack.len() >= self.config.recursion_bound {
                        return; // depth exceeded: prune this path
                    }
                    let ret = self.sg.sites[&site].1;
                    stack.push((ret, site));
                    let target = self
                        .sg
                        .succ[node]
                        .iter()
                        .find_map(|&(v, k)| matches!(k, EdgeKind::Call(_)).then_some(v))
                        .expect("call node has a call edge");
                    node = target;
                    continue;
                }
                NodeKind::End => {
                    if let Some((ret, _)) = stack.pop() {
                        node = ret;
                        continue;
                    }
                    self.paths += 1;
                    return; // End_main
                }
                _ => {}
            }

            match &self.sg.nodes[node].stmt {
                Stmt::AddrOf { lhs, loc } => {
                    state.insert(lhs.clone(), loc.clone());
                }
                Stmt::Copy { lhs, rhs } => {
                    let v = state[rhs].clone();
                    state.insert(lhs.clone(), v);
                }
                Stmt::Load { lhs, rhs } => {
                    let target = state[rhs].clone();
                    let v = if self.program.is_pointer(&target) {
                        state[&target].clone()
                    } else {
                        UNDEF.to_string()
                    };
                    state.insert(lhs.clone(), v);
                }
                Stmt::Store { lhs, rhs } => {
                    let target = state[lhs].clone();
                    if target == UNDEF || target == NULL {
                        return; // undefined write aborts the execution
                    }
                    if self.program.is_pointer(&target) {
                        let v = state[rhs].clone();
                        state.insert(target, v);
                    }
                    // writes into non-pointer cells don't affect pointers
                }
                Stmt::Use { .. } | Stmt::Call { .. } | Stmt::Nop => {}
            }

            let succs: Vec<usize> = self
                .sg
                .succ[node]
                .iter()
                .filter_map(|&(v, k)| matches!(k, EdgeKind::Intra).then_some(v))
                .collect();
            match succs.len() {
                0 => return, // only End has no intra successors; handled above
                1 => {
                    let s = succs[0];
                    if self.cfg_back.contains(&(node, s)) {
                        let c = loops.entry(node).or_insert(0);
                        if *c >= self.config.branch_bound {
                            return;
                        }
                        *c += 1;
                    }
                    node = s;
                }
                _ => {
                    for &s in &succs {
                        let mut loops2 = loops.clone();
                        if self.cfg_back.contains(&(node, s)) {
                            let c = loops2.entry(node).or_insert(0);
                            if *c >= self.config.branch_bound {
                                continue;
                            }
                            *c += 1;
                        }
                        self.run(s, state.clone(), stack.clone(), loops2);
                    }
                    return;
                }
            }
        }
    }
}
