//! Context and context-set expressions: tokenizer, parsers, evaluator and
//! the environment they are evaluated in.
//!
//! The two grammars share their operator spellings but not their
//! precedence. [`parse_expression`] picks the set grammar when the text uses
//! a set-only construct (`><`, `[&]`, `[+]`, `Box[...]`, `{{...}}`,
//! `/ <d,t>`) or names a variable bound to a context set or Box, and the
//! context grammar otherwise. Operators applied to a range are read with
//! the set grammar.

mod ast;
mod eval;
mod lexer;
mod parser;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use ast::{
    CompareOp, ContextBinOp, ContextExpr, ContextLit, DimSetExpr, Expr, RangeKind, SetBinOp, SetExpr, TagLit,
};
pub use eval::{evaluate, evaluate_context_expr, evaluate_context_set_expr, resolve_context_literal, resolve_tag};
pub use lexer::{tokenize, Tok, Token};

use crate::boxset::BoxSet;
use crate::error::Error;
use crate::model::{Context, DimSet, DimensionRegistry};
use crate::set::ContextSet;
use parser::Parser;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("unknown token `{found}` at column {pos}")]
    UnknownToken { pos: usize, found: char },
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unbalanced parentheses at column {pos}")]
    UnbalancedParens { pos: usize },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error(transparent)]
    Calc(#[from] Error),
}

impl ExprError {
    /// Column of the offending token, for syntax-level errors.
    pub fn position(&self) -> Option<usize> {
        match self {
            ExprError::UnknownToken { pos, .. }
            | ExprError::Syntax { pos, .. }
            | ExprError::UnbalancedParens { pos } => Some(*pos),
            _ => None,
        }
    }
}

/// Anything a name can be bound to, and anything an expression can yield.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Context(Context),
    ContextSet(ContextSet),
    DimSet(DimSet),
    Box(BoxSet),
    Bool(bool),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Context(_) => "context",
            Value::ContextSet(_) => "context_set",
            Value::DimSet(_) => "dimset",
            Value::Box(_) => "box",
            Value::Bool(_) => "bool",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Context(c) => write!(f, "{c}"),
            Value::ContextSet(s) => write!(f, "{s}"),
            Value::DimSet(d) => write!(f, "{d}"),
            Value::Box(b) => write!(f, "{b}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Named values, the dimension registry and the seed for choice.
#[derive(Debug, Clone, Default)]
pub struct Environment {
    pub registry: DimensionRegistry,
    bindings: BTreeMap<String, Value>,
    pub seed: u64,
}

impl Environment {
    pub fn new(registry: DimensionRegistry) -> Self {
        Environment {
            registry,
            bindings: BTreeMap::new(),
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Binds `name`, replacing any earlier binding.
    pub fn bind(&mut self, name: &str, value: Value) -> Option<Value> {
        self.bindings.insert(name.to_string(), value)
    }

    pub fn get(&self, name: &str) -> Result<&Value, ExprError> {
        self.bindings
            .get(name)
            .ok_or_else(|| ExprError::UnboundVariable(name.to_string()))
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }

    fn names_a_set(&self, name: &str) -> bool {
        matches!(self.bindings.get(name), Some(Value::ContextSet(_) | Value::Box(_)))
    }
}

pub fn parse_context_expr(tokens: &[Token]) -> Result<ContextExpr, ExprError> {
    let mut p = Parser::new(tokens);
    let e = p.context_expr()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_context_set_expr(tokens: &[Token]) -> Result<SetExpr, ExprError> {
    let mut p = Parser::new(tokens);
    let e = p.set_expr()?;
    p.finish()?;
    Ok(e)
}

/// Whether `tokens` should be read with the context-set grammar.
pub fn is_set_expression(tokens: &[Token], env: &Environment) -> bool {
    tokens.iter().enumerate().any(|(i, t)| {
        let next = tokens.get(i + 1).map(|t| &t.tok);
        match &t.tok {
            Tok::Join | Tok::SetIntersection | Tok::SetUnion => true,
            Tok::Ident(name) if name == "Box" && next == Some(&Tok::LBracket) => true,
            Tok::Ident(name) => env.names_a_set(name),
            Tok::LBrace => next == Some(&Tok::LBrace),
            Tok::Slash => next == Some(&Tok::Lt),
            _ => false,
        }
    })
}

/// Tokenizes and parses `text` with the grammar [`is_set_expression`]
/// selects. A context expression that applies an operator to a range is
/// reread with the set grammar when that succeeds, so `(a <=> b) ! D`
/// projects every member of the range.
pub fn parse_expression(text: &str, env: &Environment) -> Result<Expr, ExprError> {
    let tokens = tokenize(text)?;
    if is_set_expression(&tokens, env) {
        return parse_context_set_expr(&tokens).map(Expr::Set);
    }
    let e = parse_context_expr(&tokens)?;
    if has_nested_range(&e, true) {
        if let Ok(s) = parse_context_set_expr(&tokens) {
            return Ok(Expr::Set(s));
        }
    }
    Ok(Expr::Context(e))
}

fn has_nested_range(e: &ContextExpr, root: bool) -> bool {
    match e {
        ContextExpr::Var(_) | ContextExpr::Literal(_) => false,
        ContextExpr::Projection(c, _) | ContextExpr::Hiding(c, _) => has_nested_range(c, false),
        ContextExpr::Choice(items) => items.iter().any(|c| has_nested_range(c, false)),
        ContextExpr::Binary(op, l, r) => {
            let range = matches!(op, ContextBinOp::UndirectedRange | ContextBinOp::DirectedRange);
            (range && !root) || has_nested_range(l, false) || has_nested_range(r, false)
        }
        ContextExpr::Compare(_, l, r) => has_nested_range(l, false) || has_nested_range(r, false),
    }
}

/// Parses a dimension-set literal `{d, e, ...}`; `None` if `text` is not
/// one. `{}` is read as the empty context, not the empty dimension set.
pub fn parse_dimset_literal(text: &str) -> Option<Vec<String>> {
    let tokens = tokenize(text).ok()?;
    let mut names = Vec::new();
    let mut iter = tokens.iter().map(|t| &t.tok);
    if iter.next() != Some(&Tok::LBrace) {
        return None;
    }
    loop {
        match iter.next()? {
            Tok::Ident(name) => names.push(name.clone()),
            _ => return None,
        }
        match iter.next()? {
            Tok::Comma => continue,
            Tok::RBrace => break,
            _ => return None,
        }
    }
    (iter.next() == Some(&Tok::Eof)).then_some(names)
}
