use std::collections::BTreeSet;

use super::ast::{Item, Procedure, Program, Stmt, NULL, UNDEF};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Kw(&'static str), // ptr var proc use print null if else while
    Sym(char),        // = & * ; ( ) { }
    Eof,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Kw(k) => write!(f, "`{k}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const KEYWORDS: &[&str] =
    &["ptr", "var", "proc", "use", "print", "null", "if", "else", "while"];

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn next_tok(&mut self) -> Result<(Tok, usize, usize)> {
        loop {
            // skip whitespace and // comments
            match self.src.get(self.pos) {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'/') if self.src.get(self.pos + 1) == Some(&b'/') => {
                    while let Some(c) = self.bump() {
                        if c == b'\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        let (line, col) = (self.line, self.col);
        let c = match self.src.get(self.pos).copied() {
            None => return Ok((Tok::Eof, line, col)),
            Some(c) => c,
        };
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut name = String::new();
            while let Some(&c) = self.src.get(self.pos) {
                if c.is_ascii_alphanumeric() || c == b'_' {
                    name.push(c as char);
                    self.bump();
                } else {
                    break;
                }
            }
            if let Some(kw) = KEYWORDS.iter().find(|k| **k == name) {
                Ok((Tok::Kw(kw), line, col))
            } else {
                Ok((Tok::Ident(name), line, col))
            }
        } else if b"=&*;(){}".contains(&c) {
            self.bump();
            Ok((Tok::Sym(c as char), line, col))
        } else {
            Err(Error::parse(line, col, format!("unexpected character `{}`", c as char)))
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = self.toks[self.pos];
        (l, c)
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let (l, c) = self.here();
        let got = self.next();
        if got == want {
            Ok(())
        } else {
            Err(Error::parse(l, c, format!("expected {want}, found {got}")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        let (l, c) = self.here();
        match self.next() {
            Tok::Ident(s) => Ok(s),
            got => Err(Error::parse(l, c, format!("expected identifier, found {got}"))),
        }
    }
}

/// Parses and validates a whole program. `print v` is normalized to `use v`
/// and `x = null` to an address-of with pointee `null`.
pub fn parse_program(source: &str) -> Result<Program> {
    let mut lexer = Lexer::new(source);
    let mut toks = Vec::new();
    loop {
        let t = lexer.next_tok()?;
        let eof = t.0 == Tok::Eof;
        toks.push(t);
        if eof {
            break;
        }
    }
    let mut p = Parser { toks, pos: 0 };

    let mut pointers = BTreeSet::new();
    let mut scalars = BTreeSet::new();
    loop {
        let is_ptr = match p.peek() {
            Tok::Kw("ptr") => true,
            Tok::Kw("var") => false,
            _ => break,
        };
        p.next();
        let (l, c) = p.here();
        let name = p.ident()?;
        if name == NULL || name == UNDEF {
            return Err(Error::parse(l, c, format!("`{name}` is reserved")));
        }
        if pointers.contains(&name) || scalars.contains(&name) {
            return Err(Error::parse(l, c, format!("duplicate declaration of `{name}`")));
        }
        if is_ptr {
            pointers.insert(name);
        } else {
            scalars.insert(name);
        }
        p.expect(Tok::Sym(';'))?;
    }

    let mut procs = Vec::new();
    let mut site = 0u32;
    while *p.peek() == Tok::Kw("proc") {
        p.next();
        let (l, c) = p.here();
        let name = p.ident()?;
        if procs.iter().any(|q: &Procedure| q.name == name) {
            return Err(Error::parse(l, c, format!("duplicate procedure `{name}`")));
        }
        p.expect(Tok::Sym('('))?;
        p.expect(Tok::Sym(')'))?;
        let mut stmt_idx = 0usize;
        let body = parse_block(&mut p, &name, &mut site, &mut stmt_idx)?;
        procs.push(Procedure { name, body });
    }
    let (l, c) = p.here();
    if *p.peek() != Tok::Eof {
        return Err(Error::parse(l, c, format!("expected `proc`, found {}", p.peek())));
    }

    // main first, the rest in source order
    let main_idx = procs
        .iter()
        .position(|q| q.name == "main")
        .ok_or_else(|| Error::parse(l, c, "no procedure named `main`"))?;
    let main = procs.remove(main_idx);
    procs.insert(0, main);

    let program = Program { pointers, scalars, procs, call_sites: site };
    validate(&program)?;
    Ok(program)
}

fn parse_block(
    p: &mut Parser,
    proc_name: &str,
    site: &mut u32,
    stmt_idx: &mut usize,
) -> Result<Vec<Item>> {
    p.expect(Tok::Sym('{'))?;
    let mut items = Vec::new();
    while *p.peek() != Tok::Sym('}') {
        items.push(parse_item(p, proc_name, site, stmt_idx)?);
    }
    p.expect(Tok::Sym('}'))?;
    Ok(items)
}

fn parse_item(
    p: &mut Parser,
    proc_name: &str,
    site: &mut u32,
    stmt_idx: &mut usize,
) -> Result<Item> {
    let (l, c) = p.here();
    let tag_stmt = |s: Stmt, idx: &mut usize| {
        let item = Item::Stmt(s, Some((proc_name.to_string(), *idx)));
        *idx += 1;
        item
    };
    match p.peek().clone() {
        Tok::Kw("if") => {
            p.next();
            p.expect(Tok::Sym('('))?;
            p.expect(Tok::Sym('*'))?;
            p.expect(Tok::Sym(')'))?;
            let then_items = parse_block(p, proc_name, site, stmt_idx)?;
            let else_items = if *p.peek() == Tok::Kw("else") {
                p.next();
                parse_block(p, proc_name, site, stmt_idx)?
            } else {
                Vec::new()
            };
            Ok(Item::If { then_items, else_items })
        }
        Tok::Kw("while") => {
            p.next();
            p.expect(Tok::Sym('('))?;
            p.expect(Tok::Sym('*'))?;
            p.expect(Tok::Sym(')'))?;
            let body = parse_block(p, proc_name, site, stmt_idx)?;
            Ok(Item::While { body })
        }
        Tok::Kw(kw @ ("use" | "print")) => {
            p.next();
            let _ = kw;
            let var = p.ident()?;
            p.expect(Tok::Sym(';'))?;
            Ok(tag_stmt(Stmt::Use { var }, stmt_idx))
        }
        Tok::Sym('*') => {
            // *x = y;
            p.next();
            let lhs = p.ident()?;
            p.expect(Tok::Sym('='))?;
            if *p.peek() == Tok::Sym('*') || *p.peek() == Tok::Sym('&') {
                let (l, c) = p.here();
                return Err(Error::parse(
                    l,
                    c,
                    "multi-level expressions are not supported; assign through a temporary",
                ));
            }
            let rhs = p.ident()?;
            p.expect(Tok::Sym(';'))?;
            Ok(tag_stmt(Stmt::Store { lhs, rhs }, stmt_idx))
        }
        Tok::Ident(name) => {
            p.next();
            match p.next() {
                Tok::Sym('(') => {
                    p.expect(Tok::Sym(')'))?;
                    p.expect(Tok::Sym(';'))?;
                    *site += 1;
                    Ok(tag_stmt(Stmt::Call { callee: name, site: *site }, stmt_idx))
                }
                Tok::Sym('=') => {
                    let stmt = match p.peek().clone() {
                        Tok::Sym('&') => {
                            p.next();
                            if *p.peek() == Tok::Sym('*') {
                                let (l, c) = p.here();
                                return Err(Error::parse(
                                    l,
                                    c,
                                    "multi-level expressions are not supported",
                                ));
                            }
                            let loc = p.ident()?;
                            Stmt::AddrOf { lhs: name, loc }
                        }
                        Tok::Kw("null") => {
                            p.next();
                            Stmt::AddrOf { lhs: name, loc: NULL.to_string() }
                        }
                        Tok::Sym('*') => {
                            p.next();
                            if *p.peek() == Tok::Sym('*') {
                                let (l, c) = p.here();
                                return Err(Error::parse(
                                    l,
                                    c,
                                    "multi-level expressions are not supported",
                                ));
                            }
                            let rhs = p.ident()?;
                            Stmt::Load { lhs: name, rhs }
                        }
                        Tok::Ident(_) => {
                            let rhs = p.ident()?;
                            Stmt::Copy { lhs: name, rhs }
                        }
                        other => {
                            let (l, c) = p.here();
                            return Err(Error::parse(
                                l,
                                c,
                                format!("expected an assignment source, found {other}"),
                            ));
                        }
                    };
                    p.expect(Tok::Sym(';'))?;
                    Ok(tag_stmt(stmt, stmt_idx))
                }
                got => Err(Error::parse(l, c, format!("expected `=` or `(`, found {got}"))),
            }
        }
        other => Err(Error::parse(l, c, format!("expected a statement, found {other}"))),
    }
}

fn validate(program: &Program) -> Result<()> {
    let err = |msg: String| Error::parse(0, 0, msg);
    let declared = |name: &str| {
        program.pointers.contains(name) || program.scalars.contains(name)
    };
    let need_ptr = |name: &str, role: &str| -> Result<()> {
        if !declared(name) {
            Err(err(format!("undeclared identifier `{name}`")))
        } else if !program.pointers.contains(name) {
            Err(err(format!("`{name}` used as a {role} but not declared `ptr`")))
        } else {
            Ok(())
        }
    };
    fn walk<'a>(items: &'a [Item], f: &mut dyn FnMut(&'a Stmt) -> Result<()>) -> Result<()> {
        for item in items {
            match item {
                Item::Stmt(s, _) => f(s)?,
                Item::If { then_items, else_items } => {
                    walk(then_items, f)?;
                    walk(else_items, f)?;
                }
                Item::While { body } => walk(body, f)?,
            }
        }
        Ok(())
    }
    for proc in &program.procs {
        walk(&proc.body, &mut |s| match s {
            Stmt::AddrOf { lhs, loc } => {
                need_ptr(lhs, "pointer")?;
                if loc != NULL && !declared(loc) {
                    return Err(err(format!("undeclared identifier `{loc}`")));
                }
                Ok(())
            }
            Stmt::Copy { lhs, rhs } | Stmt::Load { lhs, rhs } | Stmt::Store { lhs, rhs } => {
                need_ptr(lhs, "pointer")?;
                need_ptr(rhs, "pointer")
            }
            Stmt::Use { var } => need_ptr(var, "pointer"),
            Stmt::Call { callee, .. } => {
                if program.proc(callee).is_none() {
                    Err(err(format!("call to undefined procedure `{callee}`")))
                } else {
                    Ok(())
                }
            }
            Stmt::Nop => Ok(()),
        })?;
    }
    Ok(())
}
