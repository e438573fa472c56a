//! A small Python-syntax front end covering the constructs the detectors
//! inspect: module-level assignments, expression statements, method calls,
//! integer/string/list literals, keyword arguments, subscripts, integer
//! `+ - *`, and `for` loops.
//!
//! Parsing is lenient. Lines outside the subset are skipped and recorded as
//! warnings on the returned [`ModuleAst`]; only structurally broken bracket
//! nesting is a hard [`ParseError`].

mod dump;
mod fold;
mod lexer;
mod parser;

use std::cell::Cell;
use std::fmt;

pub use dump::{dump, unparse, unparse_expr};
pub use fold::fold_constants;
pub use parser::parse_expr;

thread_local! {
    static PARSE_CALLS: Cell<usize> = const { Cell::new(0) };
}

/// Number of [`parse`] invocations made on the current thread.
pub fn parse_invocations() -> usize {
    PARSE_CALLS.with(Cell::get)
}

/// Parse a whole source file.
pub fn parse(source: &str) -> Result<ModuleAst, ParseError> {
    PARSE_CALLS.with(|c| c.set(c.get() + 1));
    parser::parse_module(source)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

/// A recoverable problem found while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ModuleAst {
    pub body: Vec<Stmt>,
    pub warnings: Vec<Warning>,
}

impl ModuleAst {
    /// Visit every statement, descending into loop bodies, in source order.
    pub fn walk(&self) -> impl Iterator<Item = &Stmt> {
        let mut stack: Vec<&Stmt> = self.body.iter().rev().collect();
        std::iter::from_fn(move || {
            let stmt = stack.pop()?;
            if let StmtKind::For { body, .. } = &stmt.kind {
                stack.extend(body.iter().rev());
            }
            Some(stmt)
        })
    }
}

/// Structural equality; warnings are not part of the tree.
impl PartialEq for ModuleAst {
    fn eq(&self, other: &Self) -> bool {
        self.body == other.body
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Assign { targets: Vec<String>, value: Expr },
    Expr(Expr),
    For { var: String, iter: Expr, body: Vec<Stmt> },
    Pass,
    Ellipsis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }

    pub fn apply(self, lhs: i64, rhs: i64) -> Option<i64> {
        match self {
            BinOp::Add => lhs.checked_add(rhs),
            BinOp::Sub => lhs.checked_sub(rhs),
            BinOp::Mul => lhs.checked_mul(rhs),
        }
    }
}

/// Expression node. Equality is structural and ignores `line`.
#[derive(Debug, Clone, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub line: usize,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Name(String),
    Int(i64),
    Str(String),
    List(Vec<Expr>),
    Call {
        func: Box<Expr>,
        args: Vec<Expr>,
        keywords: Vec<Keyword>,
    },
    Attribute {
        base: Box<Expr>,
        attr: String,
    },
    BinOp {
        op: BinOp,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    Subscript {
        base: Box<Expr>,
        index: Box<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Keyword {
    pub name: String,
    pub value: Expr,
}

impl Expr {
    pub fn new(kind: ExprKind, line: usize) -> Self {
        Expr { kind, line }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self.kind {
            ExprKind::Int(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_name(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Name(n) => Some(n),
            _ => None,
        }
    }

    /// `(callee name, args, keywords)` for a call to a plain name, e.g. `QuantumCircuit(2)`.
    pub fn as_name_call(&self) -> Option<(&str, &[Expr], &[Keyword])> {
        match &self.kind {
            ExprKind::Call {
                func,
                args,
                keywords,
            } => func.as_name().map(|n| (n, args.as_slice(), keywords.as_slice())),
            _ => None,
        }
    }

    /// `(receiver, method, args, keywords)` for a method call such as `qc.h(0)`.
    pub fn as_method_call(&self) -> Option<(&Expr, &str, &[Expr], &[Keyword])> {
        match &self.kind {
            ExprKind::Call {
                func,
                args,
                keywords,
            } => match &func.kind {
                ExprKind::Attribute { base, attr } => {
                    Some((base.as_ref(), attr.as_str(), args.as_slice(), keywords.as_slice()))
                }
                _ => None,
            },
            _ => None,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&unparse_expr(self))
    }
}
