use std::collections::BTreeMap;

use crate::lang::{Item, Procedure, Program, Stmt};

/// Splices every callee body in place of its call, yielding a single-`main`
/// program. Statement tags travel with the spliced statements, so facts of
/// the inlined program can be matched back to the original by tag. Returns
/// `None` for recursive programs.
pub fn inline_program(program: &Program) -> Option<Program> {
    if program.is_recursive() {
        return None;
    }
    let mut memo: BTreeMap<String, Vec<Item>> = BTreeMap::new();
    let body = expand(program, &program.main().body, &mut memo);
    Some(Program {
        pointers: program.pointers.clone(),
        scalars: program.scalars.clone(),
        procs: vec![Procedure { name: "main".to_string(), body }],
        call_sites: 0,
    })
}

fn expand(
    program: &Program,
    items: &[Item],
    memo: &mut BTreeMap<String, Vec<Item>>,
) -> Vec<Item> {
    let mut out = Vec::new();
    for item in items {
        match item {
            Item::Stmt(Stmt::Call { callee, .. }, _) => {
                if let Some(done) = memo.get(callee) {
                    out.extend(done.iter().cloned());
                } else {
                    let body = program
                        .proc(callee)
                        .map(|p| expand(program, &p.body, memo))
                        .unwrap_or_default();
                    memo.insert(callee.clone(), body.clone());
                    out.extend(body);
                }
            }
            Item::Stmt(s, tag) => out.push(Item::Stmt(s.clone(), tag.clone())),
            Item::If { then_items, else_items } => out.push(Item::If {
                then_items: expand(program, then_items, memo),
                else_items: expand(program, else_items, memo),
            }),
            Item::While { body } => out.push(Item::While { body: expand(program, body, memo) }),
        }
    }
    out
}
