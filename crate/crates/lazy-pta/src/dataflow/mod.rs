//! Lattices, relation algebra, extractor functions, transfer functions, and
//! the intraprocedural alternating-fixpoint solver.

mod extract;
mod intra;
mod rel;

pub use extract::{extractors, transfer_liveness, transfer_points_to, Extract};
pub use intra::{intraproc_solve, IntraConfig, IntraResult, NodeFacts, SolveStats};
pub use rel::{must, rel_apply, rel_restrict, rel_self_compose, LocSet, PtRel, VarSet};

use std::collections::BTreeSet;

use crate::lang::Program;

/// Variable universe shared by every analysis pass: P and V of the program.
#[derive(Clone, Debug)]
pub struct Universe {
    /// P: pointer variables.
    pub pointers: BTreeSet<String>,
    /// V: all locations, including `?` and `null`.
    pub locations: BTreeSet<String>,
}

impl Universe {
    pub fn of(program: &Program) -> Self {
        Universe { pointers: program.pointers.clone(), locations: program.locations() }
    }
}
