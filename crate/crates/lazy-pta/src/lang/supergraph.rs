use std::collections::BTreeMap;

use super::ast::{Program, Stmt, Tag};
use super::cfg::{build_cfg, NodeKind};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Intra,
    /// Call edge c_i -> Start_q
    Call(u32),
    /// Return edge End_q -> r_i
    Ret(u32),
}

#[derive(Clone, Debug)]
pub struct SgNode {
    pub proc: String,
    pub stmt: Stmt,
    pub kind: NodeKind,
    pub tag: Option<Tag>,
}

/// Whole-program supergraph: all procedure CFGs (with explicit Start/End)
/// plus call/return edges. Node ids are contiguous per procedure, `main`
/// first — the Fig.-1 numbering.
#[derive(Clone, Debug)]
pub struct Supergraph {
    pub nodes: Vec<SgNode>,
    pub succ: Vec<Vec<(usize, EdgeKind)>>,
    pub pred: Vec<Vec<(usize, EdgeKind)>>,
    /// Start_main / End_main.
    pub entry: usize,
    pub exit: usize,
    /// proc name -> (start node, end node)
    pub proc_bounds: BTreeMap<String, (usize, usize)>,
    /// site id -> (call node, return node, callee)
    pub sites: BTreeMap<u32, (usize, usize, String)>,
    pub back_edges: Vec<(usize, usize)>,
}

impl Supergraph {
    pub fn display_id(&self, node: usize) -> usize {
        node + 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Procedure entry (Start) node containing `node`.
    pub fn proc_of(&self, node: usize) -> &str {
        &self.nodes[node].proc
    }
}

pub fn build_supergraph(program: &Program) -> Result<Supergraph> {
    let mut sg = Supergraph {
        nodes: Vec::new(),
        succ: Vec::new(),
        pred: Vec::new(),
        entry: 0,
        exit: 0,
        proc_bounds: BTreeMap::new(),
        sites: BTreeMap::new(),
        back_edges: Vec::new(),
    };
    let mut pending_intra: Vec<(usize, usize)> = Vec::new();
    let mut call_nodes: BTreeMap<u32, usize> = BTreeMap::new();
    let mut ret_nodes: BTreeMap<u32, usize> = BTreeMap::new();
    let mut site_callee: BTreeMap<u32, String> = BTreeMap::new();

    for proc in &program.procs {
        let cfg = build_cfg(proc, true)?;
        let base = sg.nodes.len();
        for node in &cfg.nodes {
            if let Stmt::Call { callee, site } = &node.stmt {
                site_callee.insert(*site, callee.clone());
            }
            match node.kind {
                NodeKind::CallSite(site) => {
                    call_nodes.insert(site, sg.nodes.len());
                }
                NodeKind::ReturnSite(site) => {
                    ret_nodes.insert(site, sg.nodes.len());
                }
                _ => {}
            }
            sg.nodes.push(SgNode {
                proc: proc.name.clone(),
                stmt: node.stmt.clone(),
                kind: node.kind,
                tag: node.tag.clone(),
            });
            sg.succ.push(Vec::new());
            sg.pred.push(Vec::new());
        }
        sg.proc_bounds
            .insert(proc.name.clone(), (base + cfg.start, base + cfg.end));
        for (u, succs) in cfg.succ.iter().enumerate() {
            for &v in succs {
                // Drop the placeholder c_i -> r_i edge; everything else is
                // an intraprocedural edge.
                let is_placeholder = matches!(cfg.nodes[u].kind, NodeKind::CallSite(_))
                    && matches!(cfg.nodes[v].kind, NodeKind::ReturnSite(_));
                if !is_placeholder {
                    pending_intra.push((base + u, base + v));
                    if cfg.is_back_edge(u, v) {
                        sg.back_edges.push((base + u, base + v));
                    }
                }
            }
        }
    }

    for (u, v) in pending_intra {
        sg.succ[u].push((v, EdgeKind::Intra));
        sg.pred[v].push((u, EdgeKind::Intra));
    }
    for (&site, &c) in &call_nodes {
        let r = ret_nodes[&site];
        let callee = site_callee[&site].clone();
        let (cs, ce) = sg.proc_bounds[&callee];
        sg.succ[c].push((cs, EdgeKind::Call(site)));
        sg.pred[cs].push((c, EdgeKind::Call(site)));
        sg.succ[ce].push((r, EdgeKind::Ret(site)));
        sg.pred[r].push((ce, EdgeKind::Ret(site)));
        sg.sites.insert(site, (c, r, callee));
    }

    let (entry, exit) = sg.proc_bounds["main"];
    sg.entry = entry;
    sg.exit = exit;
    Ok(sg)
}
