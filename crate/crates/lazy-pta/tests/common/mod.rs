#![allow(dead_code)]

use std::collections::BTreeSet;

use lazy_pta::dataflow::{PtRel, VarSet};
use lazy_pta::lang::{parse_program, Program};

pub fn fixture(name: &str) -> Program {
    let path = format!("{}/tests/fixtures/{name}.pt", env!("CARGO_MANIFEST_DIR"));
    let src = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("read {path}: {e}"));
    parse_program(&src).unwrap_or_else(|e| panic!("parse {name}: {e}"))
}

pub fn vars(xs: &[&str]) -> VarSet {
    xs.iter().map(|s| s.to_string()).collect()
}

pub fn pairs(ps: &[(&str, &str)]) -> PtRel {
    ps.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

pub fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}
