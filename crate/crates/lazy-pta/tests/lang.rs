mod common;

use common::{fixture, set};
use lazy_pta::lang::{build_cfg, build_supergraph, parse_program, EdgeKind, NodeKind, Stmt};

#[test]
fn parse_decls_and_kinds() {
    let p = fixture("loop");
    assert_eq!(p.pointers, set(&["p", "q", "r", "s"]));
    assert!(p.scalars.is_empty());
    assert_eq!(p.procs.len(), 1);
    assert_eq!(p.procs[0].name, "main");
    // locations include the two special ones
    assert!(p.locations().contains("?"));
    assert!(p.locations().contains("null"));
}

#[test]
fn print_normalizes_to_use() {
    let p = parse_program("ptr x; var a; proc main() { x = &a; print x; }").unwrap();
    let cfg = build_cfg(p.main(), false).unwrap();
    assert!(cfg
        .nodes
        .iter()
        .any(|n| matches!(&n.stmt, Stmt::Use { var } if var == "x")));
}

#[test]
fn null_is_an_address_of() {
    let p = parse_program("ptr x; proc main() { x = null; use x; }").unwrap();
    let cfg = build_cfg(p.main(), false).unwrap();
    assert!(cfg
        .nodes
        .iter()
        .any(|n| matches!(&n.stmt, Stmt::AddrOf { lhs, loc } if lhs == "x" && loc == "null")));
}

#[test]
fn parse_errors() {
    // multi-level expressions
    assert!(parse_program("ptr x; ptr y; proc main() { x = **y; }").is_err());
    assert!(parse_program("ptr x; ptr y; proc main() { *x = *y; }").is_err());
    // duplicate declaration
    assert!(parse_program("ptr x; var x; proc main() { }").is_err());
    // undeclared identifier
    assert!(parse_program("ptr x; proc main() { x = &y; }").is_err());
    // scalar in a pointer position
    assert!(parse_program("ptr x; var a; proc main() { a = x; }").is_err());
    assert!(parse_program("ptr x; var a; proc main() { x = *a; }").is_err());
    assert!(parse_program("var a; proc main() { use a; }").is_err());
    // no main / duplicate proc / undefined callee
    assert!(parse_program("ptr x; proc f() { }").is_err());
    assert!(parse_program("ptr x; proc main() { } proc main() { }").is_err());
    assert!(parse_program("ptr x; proc main() { g(); }").is_err());
    // reserved names
    assert!(parse_program("ptr null; proc main() { }").is_err());
}

#[test]
fn main_is_moved_first() {
    let p = parse_program("ptr x; proc f() { x = &x; } proc main() { f(); }").unwrap();
    assert_eq!(p.procs[0].name, "main");
    assert_eq!(p.procs[1].name, "f");
}

#[test]
fn roundtrip_through_pretty_print() {
    for name in ["recursive", "loop", "branch", "sanity"] {
        let p = fixture(name);
        let reparsed = parse_program(&p.pretty_print()).unwrap();
        assert_eq!(p.pretty_print(), reparsed.pretty_print(), "{name}");
    }
}

/// The loop program lowers to the familiar 7-node graph: the loop body runs
/// at least once and branches at the bottom.
#[test]
fn loop_cfg_shape() {
    let p = fixture("loop");
    let cfg = build_cfg(p.main(), false).unwrap();
    assert_eq!(cfg.nodes.len(), 7);
    let stmt = |i: usize| cfg.nodes[i].stmt.to_string();
    assert_eq!(stmt(0), "q = &r");
    assert_eq!(stmt(1), "p = q");
    assert_eq!(stmt(2), "p = *p");
    assert_eq!(stmt(3), "use p");
    assert_eq!(stmt(4), "s = q");
    assert_eq!(stmt(5), "r = &s");
    assert_eq!(cfg.nodes[6].kind, NodeKind::End);

    let edges: Vec<(usize, usize)> = cfg
        .succ
        .iter()
        .enumerate()
        .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
        .collect();
    let mut expect = vec![(0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 5), (5, 1), (5, 6)];
    expect.sort();
    let mut got = edges;
    got.sort();
    assert_eq!(got, expect);
    assert!(cfg.back_edges.contains(&(5, 1)));
    assert_eq!(cfg.back_edges.len(), 1);
}

#[test]
fn start_contraction_only_when_redundant() {
    // straight-line: Start is contracted away
    let p = parse_program("ptr x; var a; proc main() { x = &a; use x; }").unwrap();
    let cfg = build_cfg(p.main(), false).unwrap();
    assert!(!cfg.nodes.iter().any(|n| n.kind == NodeKind::Start));
    // branch at entry: Start must stay
    let p = fixture("branch");
    let cfg = build_cfg(p.main(), false).unwrap();
    assert_eq!(cfg.nodes[0].kind, NodeKind::Start);
    assert_eq!(cfg.nodes.len(), 7);
    // ensure_start keeps Start regardless
    let p = parse_program("ptr x; var a; proc main() { x = &a; use x; }").unwrap();
    let cfg = build_cfg(p.main(), true).unwrap();
    assert_eq!(cfg.nodes[0].kind, NodeKind::Start);
}

#[test]
fn recursive_supergraph_shape() {
    let p = fixture("recursive");
    let sg = build_supergraph(&p).unwrap();
    assert_eq!(sg.len(), 13);
    assert_eq!(sg.entry, 0);
    assert_eq!(sg.exit, 6);
    assert_eq!(sg.proc_bounds["main"], (0, 6));
    assert_eq!(sg.proc_bounds["p"], (7, 12));
    // call structure: c1 at node 4 (id), c2 at node 10
    assert_eq!(sg.sites[&1], (3, 4, "p".to_string()));
    assert_eq!(sg.sites[&2], (9, 10, "p".to_string()));
    // call/return edges, and no placeholder c->r edge
    assert!(sg.succ[3].contains(&(7, EdgeKind::Call(1))));
    assert!(sg.succ[9].contains(&(7, EdgeKind::Call(2))));
    assert!(sg.succ[12].contains(&(4, EdgeKind::Ret(1))));
    assert!(sg.succ[12].contains(&(10, EdgeKind::Ret(2))));
    assert!(!sg.succ[3].iter().any(|&(v, k)| v == 4 && k == EdgeKind::Intra));
    // the branch in p: Start_p -> z=w and Start_p -> End_p
    assert!(sg.succ[7].iter().any(|&(v, _)| v == 8));
    assert!(sg.succ[7].iter().any(|&(v, _)| v == 12));
}

#[test]
fn recursion_detection() {
    assert!(fixture("recursive").is_recursive());
    assert!(!fixture("loop").is_recursive());
    let p = parse_program(
        "ptr x; proc main() { f(); } proc f() { g(); } proc g() { f(); }",
    )
    .unwrap();
    assert!(p.is_recursive());
    let p = parse_program("ptr x; proc main() { f(); } proc f() { x = &x; }").unwrap();
    assert!(!p.is_recursive());
}
