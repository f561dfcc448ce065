use std::collections::BTreeSet;

use super::ast::{Item, Procedure, Stmt, Tag};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Start,
    End,
    Stmt,
    /// Call node c_i
    CallSite(u32),
    /// Return node r_i
    ReturnSite(u32),
}

#[derive(Clone, Debug)]
pub struct CfgNode {
    pub stmt: Stmt,
    pub kind: NodeKind,
    pub tag: Option<Tag>,
}

/// Per-procedure control flow graph. Node indices are construction order,
/// which for this structured language is a valid reverse post-order
/// (non-back edges go from lower to higher index).
#[derive(Clone, Debug)]
pub struct Cfg {
    pub proc_name: String,
    pub nodes: Vec<CfgNode>,
    pub succ: Vec<Vec<usize>>,
    pub pred: Vec<Vec<usize>>,
    pub start: usize,
    pub end: usize,
    pub back_edges: BTreeSet<(usize, usize)>,
}

impl Cfg {
    fn add_node(&mut self, stmt: Stmt, kind: NodeKind, tag: Option<Tag>) -> usize {
        self.nodes.push(CfgNode { stmt, kind, tag });
        self.succ.push(Vec::new());
        self.pred.push(Vec::new());
        self.nodes.len() - 1
    }

    fn add_edge(&mut self, from: usize, to: usize) {
        if !self.succ[from].contains(&to) {
            self.succ[from].push(to);
            self.pred[to].push(from);
        }
    }

    pub fn is_back_edge(&self, from: usize, to: usize) -> bool {
        self.back_edges.contains(&(from, to))
    }

    /// 1-based display id.
    pub fn display_id(&self, node: usize) -> usize {
        node + 1
    }
}

/// Lowers a procedure body to a CFG. A Nop `End` node is always appended;
/// a Nop `Start` node is kept only when structurally required (the first
/// statement would otherwise have a predecessor or the body begins with a
/// branch). `ensure_start` forces the Start node to be kept (used by the
/// supergraph, where every procedure has explicit Start/End).
pub fn build_cfg(proc: &Procedure, ensure_start: bool) -> Result<Cfg> {
    let mut cfg = Cfg {
        proc_name: proc.name.clone(),
        nodes: Vec::new(),
        succ: Vec::new(),
        pred: Vec::new(),
        start: 0,
        end: 0,
        back_edges: BTreeSet::new(),
    };
    let start = cfg.add_node(Stmt::Nop, NodeKind::Start, None);
    cfg.start = start;
    let frontier = lower_seq(&mut cfg, &proc.body, vec![start]);
    let end = cfg.add_node(Stmt::Nop, NodeKind::End, None);
    cfg.end = end;
    for f in frontier {
        cfg.add_edge(f, end);
    }

    if !ensure_start {
        contract_start(&mut cfg);
    }
    check_reachability(&cfg)?;
    Ok(cfg)
}

fn lower_seq(cfg: &mut Cfg, items: &[Item], mut frontier: Vec<usize>) -> Vec<usize> {
    for item in items {
        match item {
            Item::Stmt(stmt, tag) => {
                if let Stmt::Call { site, .. } = stmt {
                    let c = cfg.add_node(stmt.clone(), NodeKind::CallSite(*site), tag.clone());
                    let r = cfg.add_node(Stmt::Nop, NodeKind::ReturnSite(*site), None);
                    for f in frontier {
                        cfg.add_edge(f, c);
                    }
                    // Local placeholder edge c_i -> r_i; the supergraph
                    // replaces it with the call/return edge pair.
                    cfg.add_edge(c, r);
                    frontier = vec![r];
                } else {
                    let n = cfg.add_node(stmt.clone(), NodeKind::Stmt, tag.clone());
                    for f in frontier {
                        cfg.add_edge(f, n);
                    }
                    frontier = vec![n];
                }
            }
            Item::If { then_items, else_items } => {
                let then_exit = lower_seq(cfg, then_items, frontier.clone());
                let else_exit = lower_seq(cfg, else_items, frontier.clone());
                let mut joined = then_exit;
                for n in else_exit {
                    if !joined.contains(&n) {
                        joined.push(n);
                    }
                }
                frontier = joined;
            }
            Item::While { body } => {
                // Bottom-test loop: control falls into the body, and the last
                // body node branches back to the body head and onward.
                let before: Vec<Vec<usize>> =
                    frontier.iter().map(|&f| cfg.succ[f].clone()).collect();
                let exit = lower_seq(cfg, body, frontier.clone());
                // Entry targets: successors the frontier gained while the
                // body was lowered.
                let mut entry_targets = Vec::new();
                for (i, &f) in frontier.iter().enumerate() {
                    for &s in &cfg.succ[f] {
                        if !before[i].contains(&s) && !entry_targets.contains(&s) {
                            entry_targets.push(s);
                        }
                    }
                }
                for &e in &exit {
                    for &t in &entry_targets {
                        cfg.add_edge(e, t);
                        cfg.back_edges.insert((e, t));
                    }
                }
                frontier = exit;
            }
        }
    }
    frontier
}

/// Drops a redundant Start node: when its unique successor has no other
/// predecessor and is a plain statement, that statement is the entry
/// (Fig.-style numbering starts at the first real statement).
fn contract_start(cfg: &mut Cfg) {
    let start = cfg.start;
    if cfg.succ[start].len() != 1 {
        return;
    }
    let s = cfg.succ[start][0];
    if cfg.pred[s] != vec![start] || !matches!(cfg.nodes[s].kind, NodeKind::Stmt) {
        return;
    }
    // Remove node `start` (index 0) and shift everything down by one.
    cfg.nodes.remove(start);
    cfg.succ.remove(start);
    cfg.pred.remove(start);
    let shift = |v: &mut Vec<usize>| {
        v.retain(|&n| n != start);
        for n in v.iter_mut() {
            *n -= 1;
        }
    };
    for v in cfg.succ.iter_mut() {
        shift(v);
    }
    for v in cfg.pred.iter_mut() {
        shift(v);
    }
    cfg.back_edges = cfg
        .back_edges
        .iter()
        .map(|&(a, b)| (a - 1, b - 1))
        .collect();
    cfg.start = s - 1;
    cfg.end -= 1;
}

fn check_reachability(cfg: &Cfg) -> Result<()> {
    let n = cfg.nodes.len();
    let reach = |adj: &Vec<Vec<usize>>, from: usize| {
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    };
    let from_start = reach(&cfg.succ, cfg.start);
    if let Some(i) = from_start.iter().position(|r| !r) {
        return Err(Error::Analysis(format!(
            "unreachable statement in `{}`: {}",
            cfg.proc_name, cfg.nodes[i].stmt
        )));
    }
    let to_end = reach(&cfg.pred, cfg.end);
    if let Some(i) = to_end.iter().position(|r| !r) {
        return Err(Error::Analysis(format!(
            "exit of `{}` unreachable from: {}",
            cfg.proc_name, cfg.nodes[i].stmt
        )));
    }
    Ok(())
}
