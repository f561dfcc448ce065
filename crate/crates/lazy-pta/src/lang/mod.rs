//! Input language: AST, parser, CFG lowering, and the whole-program
//! supergraph.

mod ast;
mod cfg;
mod parser;
mod supergraph;

pub use ast::{Item, Procedure, Program, Stmt, Tag, NULL, UNDEF};
pub use cfg::{build_cfg, Cfg, CfgNode, NodeKind};
pub use parser::parse_program;
pub use supergraph::{build_supergraph, EdgeKind, SgNode, Supergraph};
