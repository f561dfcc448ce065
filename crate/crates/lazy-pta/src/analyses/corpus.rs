use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::lang::{parse_program, Program};

/// Shape limits for generated test programs.
#[derive(Clone, Debug)]
pub struct CorpusParams {
    pub max_pointers: usize,
    pub max_scalars: usize,
    pub max_procs: usize,
    pub max_stmts: usize,
    /// Let non-main procedures call procedures declared before them
    /// (possibly themselves), making recursion possible.
    pub allow_recursion: bool,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            max_pointers: 6,
            max_scalars: 3,
            max_procs: 3,
            max_stmts: 25,
            allow_recursion: false,
        }
    }
}

struct Gen {
    rng: ChaCha8Rng,
    pointers: Vec<String>,
    scalars: Vec<String>,
    procs: Vec<String>,
    budget: usize,
}

/// Generates a random program as source text, then runs it through the
/// parser so corpus programs exercise exactly the same front end as
/// hand-written ones.
pub fn generate_program(seed: u64, params: &CorpusParams) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_ptr = rng.gen_range(1..=params.max_pointers.max(1));
    let n_var = rng.gen_range(0..=params.max_scalars);
    let n_proc = rng.gen_range(1..=params.max_procs.max(1));
    let budget = rng.gen_range(1..=params.max_stmts.max(1));

    let mut g = Gen {
        rng,
        pointers: (0..n_ptr).map(|i| format!("p{i}")).collect(),
        scalars: (0..n_var).map(|i| format!("v{i}")).collect(),
        procs: (0..n_proc)
            .map(|i| if i == 0 { "main".to_string() } else { format!("f{i}") })
            .collect(),
        budget,
    };

    let mut src = String::new();
    for p in &g.pointers {
        src.push_str(&format!("ptr {p};\n"));
    }
    for v in &g.scalars {
        src.push_str(&format!("var {v};\n"));
    }
    src.push('\n');
    for i in 0..n_proc {
        let name = g.procs[i].clone();
        src.push_str(&format!("proc {name}() {{\n"));
        // Reserve at least one statement for each remaining procedure so
        // no body comes out empty of its own will too often.
        let reserve = n_proc - i - 1;
        let take = if i == n_proc - 1 {
            g.budget
        } else {
            g.rng.gen_range(1..=g.budget.saturating_sub(reserve).max(1))
        };
        let body = g.block(i, take, 0, params.allow_recursion);
        src.push_str(&body);
        src.push_str("}\n\n");
    }

    parse_program(&src).expect("generated program must parse")
}

impl Gen {
    fn pick_ptr(&mut self) -> String {
        self.pointers[self.rng.gen_range(0..self.pointers.len())].clone()
    }

    fn block(&mut self, proc_idx: usize, take: usize, depth: usize, recursion: bool) -> String {
        let mut out = String::new();
        let mut left = take.min(self.budget);
        while left > 0 && self.budget > 0 {
            let roll = self.rng.gen_range(0..100);
            let indent = "  ".repeat(depth + 1);
            if depth < 2 && left >= 2 && roll < 15 {
                // if(*) with optional else
                let then_take = self.rng.gen_range(1..=left - 1);
                let rest = left - then_take;
                let else_take =
                    if rest > 0 && self.rng.gen_bool(0.5) { self.rng.gen_range(0..=rest) } else { 0 };
                out.push_str(&format!("{indent}if (*) {{\n"));
                out.push_str(&self.block(proc_idx, then_take, depth + 1, recursion));
                out.push_str(&format!("{indent}}}"));
                if else_take > 0 {
                    out.push_str(" else {\n");
                    out.push_str(&self.block(proc_idx, else_take, depth + 1, recursion));
                    out.push_str(&format!("{indent}}}"));
                }
                out.push('\n');
                left = left.saturating_sub(then_take + else_take);
                continue;
            }
            if depth < 2 && left >= 2 && roll < 22 {
                let body_take = self.rng.gen_range(1..=left - 1);
                out.push_str(&format!("{indent}while (*) {{\n"));
                out.push_str(&self.block(proc_idx, body_take, depth + 1, recursion));
                out.push_str(&format!("{indent}}}\n"));
                left -= body_take;
                continue;
            }
            out.push_str(&indent);
            out.push_str(&self.stmt(proc_idx, recursion));
            out.push('\n');
            left -= 1;
            self.budget -= 1;
        }
        out
    }

    fn stmt(&mut self, proc_idx: usize, recursion: bool) -> String {
        // Calls only target later procedures unless recursion is allowed,
        // keeping the default corpus acyclic (and inlinable).
        let callable: Vec<String> = if recursion {
            self.procs.iter().skip(1).cloned().collect()
        } else {
            self.procs.iter().skip(proc_idx + 1).cloned().collect()
        };
        loop {
            match self.rng.gen_range(0..100) {
                0..=29 => {
                    let lhs = self.pick_ptr();
                    let mut locs: Vec<String> = Vec::new();
                    locs.extend(self.pointers.iter().cloned());
                    locs.extend(self.scalars.iter().cloned());
                    locs.push("null".to_string());
                    let loc = locs[self.rng.gen_range(0..locs.len())].clone();
                    return if loc == "null" {
                        format!("{lhs} = null;")
                    } else {
                        format!("{lhs} = &{loc};")
                    };
                }
                30..=49 => {
                    if self.pointers.len() < 2 {
                        continue;
                    }
                    let lhs = self.pick_ptr();
                    let rhs = self.pick_ptr();
                    return format!("{lhs} = {rhs};");
                }
                50..=64 => {
                    let lhs = self.pick_ptr();
                    let rhs = self.pick_ptr();
                    return format!("{lhs} = *{rhs};");
                }
                65..=79 => {
                    let lhs = self.pick_ptr();
                    let rhs = self.pick_ptr();
                    return format!("*{lhs} = {rhs};");
                }
                80..=91 => {
                    let v = self.pick_ptr();
                    return format!("use {v};");
                }
                _ => {
                    if callable.is_empty() {
                        continue;
                    }
                    let callee = callable[self.rng.gen_range(0..callable.len())].clone();
                    return format!("{callee}();");
                }
            }
        }
    }
}
