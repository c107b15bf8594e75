use std::fmt;
use std::sync::Arc;

use crate::model::Dim;

use super::{StreamValue, TIME};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    fn level(self) -> u8 {
        match self {
            BinOp::Or => 4,
            BinOp::And => 5,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 7,
            BinOp::Add | BinOp::Sub => 8,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 9,
        }
    }
}

/// Stream expressions.
///
/// Binding strength, loosest first: `fby` (right associative), `wvr asa
/// upon`, `@.d`, `or`, `and`, `not`, comparisons, `+ -`, `* / %`, then the
/// prefix operators `- first next prev`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StreamExpr {
    Const(StreamValue),
    /// A finite literal along one dimension, nil past its end.
    List(Vec<StreamValue>, Dim),
    Ref(String),
    Unary(UnOp, Arc<StreamExpr>),
    Binary(BinOp, Arc<StreamExpr>, Arc<StreamExpr>),
    If(Arc<StreamExpr>, Arc<StreamExpr>, Arc<StreamExpr>),
    First(Dim, Arc<StreamExpr>),
    Next(Dim, Arc<StreamExpr>),
    Prev(Dim, Arc<StreamExpr>),
    Fby(Dim, Arc<StreamExpr>, Arc<StreamExpr>),
    Wvr(Dim, Arc<StreamExpr>, Arc<StreamExpr>),
    Asa(Dim, Arc<StreamExpr>, Arc<StreamExpr>),
    Upon(Dim, Arc<StreamExpr>, Arc<StreamExpr>),
    /// `X @.d Y`
    At(Dim, Arc<StreamExpr>, Arc<StreamExpr>),
    /// `#.d`
    Query(Dim),
}

fn time() -> Dim {
    Dim::new(TIME)
}

impl StreamExpr {
    pub fn int(n: i64) -> Self {
        StreamExpr::Const(StreamValue::Int(n))
    }

    pub fn name(name: &str) -> Self {
        StreamExpr::Ref(name.to_string())
    }

    pub fn list<V: Into<StreamValue>>(values: impl IntoIterator<Item = V>) -> Self {
        StreamExpr::List(values.into_iter().map(Into::into).collect(), time())
    }

    pub fn first(x: StreamExpr) -> Self {
        StreamExpr::First(time(), Arc::new(x))
    }

    pub fn next(x: StreamExpr) -> Self {
        StreamExpr::Next(time(), Arc::new(x))
    }

    pub fn prev(x: StreamExpr) -> Self {
        StreamExpr::Prev(time(), Arc::new(x))
    }

    pub fn fby(x: StreamExpr, y: StreamExpr) -> Self {
        StreamExpr::Fby(time(), Arc::new(x), Arc::new(y))
    }

    pub fn wvr(x: StreamExpr, y: StreamExpr) -> Self {
        StreamExpr::Wvr(time(), Arc::new(x), Arc::new(y))
    }

    pub fn asa(x: StreamExpr, y: StreamExpr) -> Self {
        StreamExpr::Asa(time(), Arc::new(x), Arc::new(y))
    }

    pub fn upon(x: StreamExpr, y: StreamExpr) -> Self {
        StreamExpr::Upon(time(), Arc::new(x), Arc::new(y))
    }

    pub fn at(dim: &str, x: StreamExpr, y: StreamExpr) -> Self {
        StreamExpr::At(Dim::new(dim), Arc::new(x), Arc::new(y))
    }

    pub fn query(dim: &str) -> Self {
        StreamExpr::Query(Dim::new(dim))
    }

    pub fn binary(op: BinOp, x: StreamExpr, y: StreamExpr) -> Self {
        StreamExpr::Binary(op, Arc::new(x), Arc::new(y))
    }

    /// Calls `f` on every stream name this expression refers to.
    pub fn for_each_ref<'a>(&'a self, f: &mut dyn FnMut(&'a str)) {
        match self {
            StreamExpr::Ref(name) => f(name),
            StreamExpr::Const(_) | StreamExpr::List(..) | StreamExpr::Query(_) => {}
            StreamExpr::Unary(_, x) | StreamExpr::First(_, x) | StreamExpr::Next(_, x) | StreamExpr::Prev(_, x) => {
                x.for_each_ref(f)
            }
            StreamExpr::Binary(_, x, y)
            | StreamExpr::Fby(_, x, y)
            | StreamExpr::Wvr(_, x, y)
            | StreamExpr::Asa(_, x, y)
            | StreamExpr::Upon(_, x, y)
            | StreamExpr::At(_, x, y) => {
                x.for_each_ref(f);
                y.for_each_ref(f);
            }
            StreamExpr::If(c, a, b) => {
                c.for_each_ref(f);
                a.for_each_ref(f);
                b.for_each_ref(f);
            }
        }
    }

    fn level(&self) -> u8 {
        match self {
            StreamExpr::Fby(..) => 1,
            StreamExpr::Wvr(..) | StreamExpr::Asa(..) | StreamExpr::Upon(..) => 2,
            StreamExpr::At(..) => 3,
            StreamExpr::Binary(op, ..) => op.level(),
            StreamExpr::Unary(UnOp::Not, _) => 6,
            StreamExpr::Unary(UnOp::Neg, _) | StreamExpr::First(..) | StreamExpr::Next(..) | StreamExpr::Prev(..) => 10,
            _ => 11,
        }
    }
}

struct Suffix<'a>(&'a Dim);

impl fmt::Display for Suffix<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.as_str() == TIME {
            Ok(())
        } else {
            write!(f, ".{}", self.0)
        }
    }
}

fn child(f: &mut fmt::Formatter<'_>, e: &StreamExpr, min: u8) -> fmt::Result {
    if e.level() < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for StreamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = self.level();
        let infix = |f: &mut fmt::Formatter<'_>, op: &str, d: &Dim, x: &StreamExpr, y: &StreamExpr, right: bool| {
            child(f, x, if right { level + 1 } else { level })?;
            write!(f, " {op}{} ", Suffix(d))?;
            child(f, y, if right { level } else { level + 1 })
        };
        match self {
            StreamExpr::Const(StreamValue::Bool(b)) => write!(f, "{b}"),
            StreamExpr::Const(v) => write!(f, "{v}"),
            StreamExpr::List(values, d) => {
                f.write_str("[")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    match v {
                        StreamValue::Bool(b) => write!(f, "{b}")?,
                        other => write!(f, "{other}")?,
                    }
                }
                write!(f, "]{}", Suffix(d))
            }
            StreamExpr::Ref(name) => f.write_str(name),
            StreamExpr::Unary(UnOp::Neg, x) => {
                f.write_str("-")?;
                child(f, x, level)
            }
            StreamExpr::Unary(UnOp::Not, x) => {
                f.write_str("not ")?;
                child(f, x, level)
            }
            StreamExpr::Binary(op, x, y) => {
                // Comparisons do not chain.
                let lmin = if op.level() == 7 { level + 1 } else { level };
                child(f, x, lmin)?;
                write!(f, " {} ", op.symbol())?;
                child(f, y, level + 1)
            }
            StreamExpr::If(c, a, b) => write!(f, "if {c} then {a} else {b} fi"),
            StreamExpr::First(d, x) => {
                write!(f, "first{} ", Suffix(d))?;
                child(f, x, level)
            }
            StreamExpr::Next(d, x) => {
                write!(f, "next{} ", Suffix(d))?;
                child(f, x, level)
            }
            StreamExpr::Prev(d, x) => {
                write!(f, "prev{} ", Suffix(d))?;
                child(f, x, level)
            }
            StreamExpr::Fby(d, x, y) => infix(f, "fby", d, x, y, true),
            StreamExpr::Wvr(d, x, y) => infix(f, "wvr", d, x, y, false),
            StreamExpr::Asa(d, x, y) => infix(f, "asa", d, x, y, false),
            StreamExpr::Upon(d, x, y) => infix(f, "upon", d, x, y, false),
            StreamExpr::At(d, x, y) => {
                child(f, x, level)?;
                write!(f, " @.{d} ")?;
                child(f, y, level + 1)
            }
            StreamExpr::Query(d) => write!(f, "#.{d}"),
        }
    }
}
