use std::collections::BTreeSet;
use std::fmt;

/// The undefined location: the value of every uninitialized pointer.
pub const UNDEF: &str = "?";
/// The null pseudo-location. A member of V−P, distinct from `?`.
pub const NULL: &str = "null";

/// A canonical-form statement. One statement per CFG node.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stmt {
    /// `x = &a` (also `x = null`, with `loc == NULL`)
    AddrOf { lhs: String, loc: String },
    /// `x = y`
    Copy { lhs: String, rhs: String },
    /// `x = *y`
    Load { lhs: String, rhs: String },
    /// `*x = y`
    Store { lhs: String, rhs: String },
    /// `use x` (also `print x`)
    Use { var: String },
    /// `q()` — parameterless call to procedure `q` at call site `site`
    Call { callee: String, site: u32 },
    Nop,
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::AddrOf { lhs, loc } if loc == NULL => write!(f, "{lhs} = null"),
            Stmt::AddrOf { lhs, loc } => write!(f, "{lhs} = &{loc}"),
            Stmt::Copy { lhs, rhs } => write!(f, "{lhs} = {rhs}"),
            Stmt::Load { lhs, rhs } => write!(f, "{lhs} = *{rhs}"),
            Stmt::Store { lhs, rhs } => write!(f, "*{lhs} = {rhs}"),
            Stmt::Use { var } => write!(f, "use {var}"),
            Stmt::Call { callee, .. } => write!(f, "{callee}()"),
            Stmt::Nop => write!(f, "nop"),
        }
    }
}

/// Stable identity of a source statement: (procedure name, statement index).
/// Survives inlining, which lets interprocedural results be compared against
/// an intraprocedural run of the inlined program.
pub type Tag = (String, usize);

/// A body element: a statement or structured nondeterministic control.
#[derive(Clone, Debug)]
pub enum Item {
    Stmt(Stmt, Option<Tag>),
    If { then_items: Vec<Item>, else_items: Vec<Item> },
    While { body: Vec<Item> },
}

#[derive(Clone, Debug)]
pub struct Procedure {
    pub name: String,
    pub body: Vec<Item>,
}

#[derive(Clone, Debug)]
pub struct Program {
    /// P: declared pointer variables.
    pub pointers: BTreeSet<String>,
    /// Declared non-pointer variables (V−P also contains `?` and `null`).
    pub scalars: BTreeSet<String>,
    /// All procedures, `main` first, the rest in source order.
    pub procs: Vec<Procedure>,
    /// Total number of call sites (sites are numbered 1..=call_sites).
    pub call_sites: u32,
}

impl Program {
    /// V: every location a pointer may hold, including `?` and `null`.
    pub fn locations(&self) -> BTreeSet<String> {
        let mut v = self.pointers.clone();
        v.extend(self.scalars.iter().cloned());
        v.insert(UNDEF.to_string());
        v.insert(NULL.to_string());
        v
    }

    pub fn is_pointer(&self, name: &str) -> bool {
        self.pointers.contains(name)
    }

    pub fn main(&self) -> &Procedure {
        self.proc("main").expect("validated program has a main")
    }

    pub fn proc(&self, name: &str) -> Option<&Procedure> {
        self.procs.iter().find(|p| p.name == name)
    }

    /// True if the call graph has a cycle (including self-recursion).
    pub fn is_recursive(&self) -> bool {
        fn calls(items: &[Item], out: &mut BTreeSet<String>) {
            for item in items {
                match item {
                    Item::Stmt(Stmt::Call { callee, .. }, _) => {
                        out.insert(callee.clone());
                    }
                    Item::Stmt(..) => {}
                    Item::If { then_items, else_items } => {
                        calls(then_items, out);
                        calls(else_items, out);
                    }
                    Item::While { body } => calls(body, out),
                }
            }
        }
        let mut edges = Vec::new();
        for p in &self.procs {
            let mut cs = BTreeSet::new();
            calls(&p.body, &mut cs);
            edges.push(cs);
        }
        // DFS cycle detection over procedure indices.
        let index =
            |name: &str| self.procs.iter().position(|p| p.name == name).unwrap();
        let n = self.procs.len();
        let mut state = vec![0u8; n]; // 0 unvisited, 1 on stack, 2 done
        fn dfs(
            u: usize,
            edges: &[BTreeSet<String>],
            index: &dyn Fn(&str) -> usize,
            state: &mut Vec<u8>,
        ) -> bool {
            state[u] = 1;
            for callee in &edges[u] {
                let v = index(callee);
                if state[v] == 1 || (state[v] == 0 && dfs(v, edges, index, state)) {
                    return true;
                }
            }
            state[u] = 2;
            false
        }
        (0..n).any(|u| state[u] == 0 && dfs(u, &edges, &index, &mut state))
    }

    /// Canonical source text; `parse(pretty_print(p))` is a fixpoint.
    pub fn pretty_print(&self) -> String {
        let mut out = String::new();
        for v in &self.pointers {
            out.push_str(&format!("ptr {v};\n"));
        }
        for v in &self.scalars {
            out.push_str(&format!("var {v};\n"));
        }
        for p in &self.procs {
            out.push_str(&format!("\nproc {} () {{\n", p.name));
            print_items(&p.body, 1, &mut out);
            out.push_str("}\n");
        }
        out
    }
}

fn print_items(items: &[Item], depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    for item in items {
        match item {
            Item::Stmt(s, _) => out.push_str(&format!("{pad}{s};\n")),
            Item::If { then_items, else_items } => {
                out.push_str(&format!("{pad}if (*) {{\n"));
                print_items(then_items, depth + 1, out);
                if else_items.is_empty() {
                    out.push_str(&format!("{pad}}}\n"));
                } else {
                    out.push_str(&format!("{pad}}} else {{\n"));
                    print_items(else_items, depth + 1, out);
                    out.push_str(&format!("{pad}}}\n"));
                }
            }
            Item::While { body } => {
                out.push_str(&format!("{pad}while (*) {{\n"));
                print_items(body, depth + 1, out);
                out.push_str(&format!("{pad}}}\n"));
            }
        }
    }
}
