use std::fmt;

use num_bigint::BigInt;

use crate::boxset::BoolExpr;

/// A tag as written in source. Bare identifiers are enumeration labels and
/// are resolved against the dimension they are paired with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TagLit {
    Int(BigInt),
    Str(String),
    Bool(bool),
    Label(String),
}

impl fmt::Display for TagLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TagLit::Int(n) => write!(f, "{n}"),
            TagLit::Str(s) => write!(f, "{s:?}"),
            TagLit::Bool(b) => write!(f, "{b}"),
            TagLit::Label(l) => f.write_str(l),
        }
    }
}

pub type ContextLit = Vec<(String, TagLit)>;

fn fmt_context_lit(pairs: &ContextLit, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str("{")?;
    for (i, (d, t)) in pairs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "({d},{t})")?;
    }
    f.write_str("}")
}

/// Right operand of projection and hiding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DimSetExpr {
    Var(String),
    Literal(Vec<String>),
}

impl fmt::Display for DimSetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimSetExpr::Var(name) => f.write_str(name),
            DimSetExpr::Literal(names) => write!(f, "{{{}}}", names.join(",")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextBinOp {
    Substitution,
    Conjunction,
    Disjunction,
    Override,
    Difference,
    UndirectedRange,
    DirectedRange,
}

impl ContextBinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ContextBinOp::Substitution => "/",
            ContextBinOp::Conjunction => "&",
            ContextBinOp::Disjunction => "%",
            ContextBinOp::Override => "(+)",
            ContextBinOp::Difference => "(-)",
            ContextBinOp::UndirectedRange => "<=>",
            ContextBinOp::DirectedRange => "=>",
        }
    }

    fn level(self) -> u8 {
        match self {
            ContextBinOp::Substitution => 6,
            ContextBinOp::Conjunction | ContextBinOp::Disjunction => 4,
            ContextBinOp::Override | ContextBinOp::Difference => 3,
            ContextBinOp::UndirectedRange | ContextBinOp::DirectedRange => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Equal,
    Subset,
    Superset,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Equal => "==",
            CompareOp::Subset => "<<=",
            CompareOp::Superset => ">>=",
        }
    }
}

/// Context expressions. Binding strength, tightest first:
/// `! ^ /`, `|`, `& %`, `(+) (-)`, `<=> =>`, `== <<= >>=`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContextExpr {
    Var(String),
    Literal(ContextLit),
    Projection(Box<ContextExpr>, DimSetExpr),
    Hiding(Box<ContextExpr>, DimSetExpr),
    Choice(Vec<ContextExpr>),
    Binary(ContextBinOp, Box<ContextExpr>, Box<ContextExpr>),
    Compare(CompareOp, Box<ContextExpr>, Box<ContextExpr>),
}

impl ContextExpr {
    pub fn binary(op: ContextBinOp, l: ContextExpr, r: ContextExpr) -> Self {
        ContextExpr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn var(name: &str) -> Self {
        ContextExpr::Var(name.to_string())
    }

    pub(crate) fn level(&self) -> u8 {
        match self {
            ContextExpr::Var(_) | ContextExpr::Literal(_) => 7,
            ContextExpr::Projection(..) | ContextExpr::Hiding(..) => 6,
            ContextExpr::Choice(_) => 5,
            ContextExpr::Binary(op, ..) => op.level(),
            ContextExpr::Compare(..) => 1,
        }
    }
}

fn fmt_at<T: fmt::Display>(f: &mut fmt::Formatter<'_>, node: &T, level: u8, min: u8) -> fmt::Result {
    if level < min {
        write!(f, "({node})")
    } else {
        write!(f, "{node}")
    }
}

impl fmt::Display for ContextExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = self.level();
        let child = |f: &mut fmt::Formatter<'_>, e: &ContextExpr, min: u8| fmt_at(f, e, e.level(), min);
        match self {
            ContextExpr::Var(name) => f.write_str(name),
            ContextExpr::Literal(pairs) => fmt_context_lit(pairs, f),
            ContextExpr::Projection(e, d) => {
                child(f, e, level)?;
                write!(f, " ! {d}")
            }
            ContextExpr::Hiding(e, d) => {
                child(f, e, level)?;
                write!(f, " ^ {d}")
            }
            ContextExpr::Choice(items) => {
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    child(f, e, level + 1)?;
                }
                Ok(())
            }
            ContextExpr::Binary(op, l, r) => {
                child(f, l, level)?;
                write!(f, " {} ", op.symbol())?;
                child(f, r, level + 1)
            }
            ContextExpr::Compare(op, l, r) => {
                child(f, l, level + 1)?;
                write!(f, " {} ", op.symbol())?;
                child(f, r, level + 1)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetBinOp {
    Choice,
    Override,
    Difference,
    Join,
    Intersection,
    Union,
}

impl SetBinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            SetBinOp::Choice => "|",
            SetBinOp::Override => "(+)",
            SetBinOp::Difference => "(-)",
            SetBinOp::Join => "><",
            SetBinOp::Intersection => "[&]",
            SetBinOp::Union => "[+]",
        }
    }

    fn level(self) -> u8 {
        match self {
            SetBinOp::Choice => 4,
            SetBinOp::Override | SetBinOp::Difference => 3,
            SetBinOp::Join | SetBinOp::Intersection | SetBinOp::Union => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeKind {
    Undirected,
    Directed,
}

/// Context-set expressions. Binding strength, tightest first:
/// `! ^ /<d,t>`, `|`, `(+) (-)`, `>< [&] [+]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetExpr {
    Var(String),
    Literal(Vec<ContextLit>),
    Box {
        dims: Vec<String>,
        predicate: BoolExpr,
    },
    /// A range over two context operands, which yields a set.
    Range(RangeKind, Box<ContextExpr>, Box<ContextExpr>),
    Projection(Box<SetExpr>, DimSetExpr),
    Hiding(Box<SetExpr>, DimSetExpr),
    Substitution(Box<SetExpr>, String, TagLit),
    Binary(SetBinOp, Box<SetExpr>, Box<SetExpr>),
}

impl SetExpr {
    pub fn binary(op: SetBinOp, l: SetExpr, r: SetExpr) -> Self {
        SetExpr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn var(name: &str) -> Self {
        SetExpr::Var(name.to_string())
    }

    fn level(&self) -> u8 {
        match self {
            SetExpr::Var(_) | SetExpr::Literal(_) | SetExpr::Box { .. } => 6,
            // A range reads as an atom in set grammar but is written with
            // looser context operators, so keep it parenthesized inside
            // set operators.
            SetExpr::Range(..) => 1,
            SetExpr::Projection(..) | SetExpr::Hiding(..) | SetExpr::Substitution(..) => 5,
            SetExpr::Binary(op, ..) => op.level(),
        }
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = self.level();
        let child = |f: &mut fmt::Formatter<'_>, e: &SetExpr, min: u8| fmt_at(f, e, e.level(), min);
        match self {
            SetExpr::Var(name) => f.write_str(name),
            SetExpr::Literal(members) => {
                f.write_str("{")?;
                for (i, m) in members.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    fmt_context_lit(m, f)?;
                }
                f.write_str("}")
            }
            SetExpr::Box { dims, predicate } => write!(f, "Box[{} | {predicate}]", dims.join(",")),
            SetExpr::Range(kind, l, r) => {
                // Operands sit at the postfix level of the context grammar.
                fmt_at(f, &**l, l.level(), 6)?;
                f.write_str(match kind {
                    RangeKind::Undirected => " <=> ",
                    RangeKind::Directed => " => ",
                })?;
                fmt_at(f, &**r, r.level(), 6)
            }
            SetExpr::Projection(e, d) => {
                child(f, e, level)?;
                write!(f, " ! {d}")
            }
            SetExpr::Hiding(e, d) => {
                child(f, e, level)?;
                write!(f, " ^ {d}")
            }
            SetExpr::Substitution(e, d, t) => {
                child(f, e, level)?;
                write!(f, " / <{d},{t}>")
            }
            SetExpr::Binary(op, l, r) => {
                child(f, l, level)?;
                write!(f, " {} ", op.symbol())?;
                child(f, r, level + 1)
            }
        }
    }
}

/// A parsed expression of either grammar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Context(ContextExpr),
    Set(SetExpr),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Context(e) => write!(f, "{e}"),
            Expr::Set(e) => write!(f, "{e}"),
        }
    }
}
