//! Intensional streams evaluated on demand.
//!
//! A stream is a function from an [`EvaluationContext`] (a tag per
//! dimension) to a [`StreamValue`]. Nothing is computed until a value is
//! demanded at a particular context, and every demanded value of a named
//! stream is kept in a [`Warehouse`] so it is computed at most once.
//!
//! Temporal operators take an explicit dimension (`first.d`, `X fby.d Y`,
//! ...) and default to `time`.

mod ast;
mod eval;
mod parser;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::model::Dim;

pub use ast::{BinOp, StreamExpr, UnOp};
pub use eval::{
    define_streams, eval, eval_prefix, EquationSet, Evaluator, Warehouse, DEFAULT_BUDGET, DEFAULT_DEPTH_LIMIT,
};
pub use parser::{parse_equation, parse_equations, parse_stream_expr, parse_stream_prefix};

/// Name of the dimension bare temporal operators walk along.
pub const TIME: &str = "time";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StreamError {
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("stream `{0}` is defined twice")]
    DuplicateName(String),
    #[error("`{name}` refers to undefined stream `{missing}`")]
    UnresolvedReference { name: String, missing: String },
    #[error("demand budget of {budget} evaluations exhausted")]
    DemandExhausted { budget: u64 },
    #[error("evaluation nested deeper than {limit} levels")]
    DepthExceeded { limit: usize },
    #[error("`{op}` cannot be applied to {found}")]
    TypeMismatch { op: String, found: String },
    #[error("navigation to negative tag {0}")]
    NegativeTag(i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer overflow in `{0}`")]
    Overflow(String),
}

/// A point value of a stream. `Nil` is the undefined value; it propagates
/// through pointwise operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamValue {
    Int(i64),
    Bool(bool),
    Nil,
}

impl StreamValue {
    pub fn is_nil(self) -> bool {
        matches!(self, StreamValue::Nil)
    }

    fn type_name(self) -> &'static str {
        match self {
            StreamValue::Int(_) => "an integer",
            StreamValue::Bool(_) => "a boolean",
            StreamValue::Nil => "nil",
        }
    }
}

/// Booleans print as `1`/`0`.
impl fmt::Display for StreamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StreamValue::Int(n) => write!(f, "{n}"),
            StreamValue::Bool(b) => f.write_str(if *b { "1" } else { "0" }),
            StreamValue::Nil => f.write_str("nil"),
        }
    }
}

impl From<i64> for StreamValue {
    fn from(n: i64) -> Self {
        StreamValue::Int(n)
    }
}

impl From<bool> for StreamValue {
    fn from(b: bool) -> Self {
        StreamValue::Bool(b)
    }
}

/// The current position along each dimension. Dimensions that are not
/// mentioned sit at 0, and zero entries are not stored so equal positions
/// compare equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EvaluationContext(BTreeMap<Dim, u64>);

impl EvaluationContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn at(dim: &str, tag: u64) -> Self {
        Self::new().with(&Dim::new(dim), tag)
    }

    pub fn get(&self, dim: &Dim) -> u64 {
        self.0.get(dim).copied().unwrap_or(0)
    }

    pub fn with(&self, dim: &Dim, tag: u64) -> Self {
        let mut next = self.clone();
        if tag == 0 {
            next.0.remove(dim);
        } else {
            next.0.insert(dim.clone(), tag);
        }
        next
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Dim, u64)> {
        self.0.iter().map(|(d, t)| (d, *t))
    }
}

impl fmt::Display for EvaluationContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (d, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({d},{t})")?;
        }
        f.write_str("}")
    }
}
