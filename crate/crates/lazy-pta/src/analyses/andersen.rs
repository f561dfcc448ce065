use std::collections::{BTreeMap, BTreeSet};

use crate::dataflow::PtRel;
use crate::lang::{Item, Program, Stmt};

fn pooled_stmts(program: &Program) -> Vec<&Stmt> {
    fn walk<'a>(items: &'a [Item], out: &mut Vec<&'a Stmt>) {
        for item in items {
            match item {
                Item::Stmt(s, _) => out.push(s),
                Item::If { then_items, else_items } => {
                    walk(then_items, out);
                    walk(else_items, out);
                }
                Item::While { body } => walk(body, out),
            }
        }
    }
    let mut out = Vec::new();
    for p in &program.procs {
        walk(&p.body, &mut out);
    }
    out
}

/// Andersen's inclusion-based, flow-insensitive analysis: one summary
/// relation holding at all program points. Control flow, uses and calls are
/// ignored; `?` is not in its domain.
pub fn run_andersen(program: &Program) -> PtRel {
    let stmts = pooled_stmts(program);
    let mut pts: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    loop {
        let mut changed = false;
        for stmt in &stmts {
            match stmt {
                Stmt::AddrOf { lhs, loc } => {
                    changed |= pts.entry(lhs.clone()).or_default().insert(loc.clone());
                }
                Stmt::Copy { lhs, rhs } => {
                    let src = pts.get(rhs).cloned().unwrap_or_default();
                    let dst = pts.entry(lhs.clone()).or_default();
                    for v in src {
                        changed |= dst.insert(v);
                    }
                }
                Stmt::Load { lhs, rhs } => {
                    let targets: Vec<String> = pts
                        .get(rhs)
                        .map(|s| {
                            s.iter()
                                .filter(|v| program.is_pointer(v))
                                .cloned()
                                .collect()
                        })
                        .unwrap_or_default();
                    let mut add = BTreeSet::new();
                    for t in &targets {
                        if let Some(s) = pts.get(t) {
                            add.extend(s.iter().cloned());
                        }
                    }
                    let dst = pts.entry(lhs.clone()).or_default();
                    for v in add {
                        changed |= dst.insert(v);
                    }
                }
                Stmt::Store { lhs, rhs } => {
                    let targets: Vec<String> = pts
                        .get(lhs)
                        .map(|s| {
                            s.iter()
                                .filter(|v| program.is_pointer(v))
                                .cloned()
                                .collect()
                        })
                        .unwrap_or_default();
                    let src = pts.get(rhs).cloned().unwrap_or_default();
                    for t in targets {
                        let dst = pts.entry(t).or_default();
                        for v in &src {
                            changed |= dst.insert(v.clone());
                        }
                    }
                }
                Stmt::Use { .. } | Stmt::Call { .. } | Stmt::Nop => {}
            }
        }
        if !changed {
            break;
        }
    }
    let mut rel = PtRel::new();
    for (x, set) in pts {
        if program.is_pointer(&x) {
            for v in set {
                rel.insert((x.clone(), v));
            }
        }
    }
    rel
}
