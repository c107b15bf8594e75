//! Box sets: every simple context over a fixed dimension list whose tags
//! satisfy a predicate.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::model::{Context, Dim, DimSet, Dimension, DimensionRegistry, MicroContext, TagKind, TagValue};
use crate::set::ContextSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
        }
    }
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

/// Predicate language of Box sets. Dimension names stand for the tag the
/// context under test binds them to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Const(bool),
    Lit(TagValue),
    /// A bare identifier that is not one of the Box dimensions; resolved to
    /// an enumeration label when the Box is built.
    Label(String),
    Var(Dim),
    Neg(Box<BoolExpr>),
    Arith(ArithOp, Box<BoolExpr>, Box<BoolExpr>),
    Cmp(CmpOp, Box<BoolExpr>, Box<BoolExpr>),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

fn ill(msg: impl Into<String>) -> Error {
    Error::IllTypedPredicate(msg.into())
}

impl BoolExpr {
    fn precedence(&self) -> u8 {
        match self {
            BoolExpr::Or(..) => 1,
            BoolExpr::And(..) => 2,
            BoolExpr::Not(_) => 3,
            BoolExpr::Cmp(..) => 4,
            BoolExpr::Arith(ArithOp::Add | ArithOp::Sub, ..) => 5,
            BoolExpr::Arith(ArithOp::Mul, ..) => 6,
            BoolExpr::Neg(_) => 7,
            _ => 8,
        }
    }

    /// Resolves labels and checks kinds. Returns the checked expression and
    /// its kind.
    fn check(&self, kinds: &BTreeMap<Dim, TagKind>) -> Result<(BoolExpr, TagKind)> {
        match self {
            BoolExpr::Const(_) => Ok((self.clone(), TagKind::Bool)),
            BoolExpr::Lit(v) => Ok((self.clone(), v.kind())),
            BoolExpr::Var(d) => kinds
                .get(d)
                .map(|k| (self.clone(), k.clone()))
                .ok_or_else(|| ill(format!("`{d}` is not a dimension of the Box"))),
            BoolExpr::Label(l) => Err(ill(format!(
                "`{l}` is neither a Box dimension nor a label compared against an enumeration"
            ))),
            BoolExpr::Neg(e) => {
                let (e, k) = e.check(kinds)?;
                expect_kind(&k, &TagKind::Int, "negation")?;
                Ok((BoolExpr::Neg(Box::new(e)), TagKind::Int))
            }
            BoolExpr::Arith(op, l, r) => {
                let (l, lk) = l.check(kinds)?;
                let (r, rk) = r.check(kinds)?;
                expect_kind(&lk, &TagKind::Int, op.symbol())?;
                expect_kind(&rk, &TagKind::Int, op.symbol())?;
                Ok((BoolExpr::Arith(*op, Box::new(l), Box::new(r)), TagKind::Int))
            }
            BoolExpr::Cmp(op, l, r) => {
                let (l, r, lk, rk) = match (&**l, &**r) {
                    (BoolExpr::Label(a), BoolExpr::Label(b)) => {
                        return Err(ill(format!("cannot compare two bare labels `{a}` and `{b}`")))
                    }
                    (BoolExpr::Label(label), other) => {
                        let (r, rk) = other.check(kinds)?;
                        let l = resolve_label(label, &rk)?;
                        (l, r, rk.clone(), rk)
                    }
                    (other, BoolExpr::Label(label)) => {
                        let (l, lk) = other.check(kinds)?;
                        let r = resolve_label(label, &lk)?;
                        (l, r, lk.clone(), lk)
                    }
                    (l, r) => {
                        let (l, lk) = l.check(kinds)?;
                        let (r, rk) = r.check(kinds)?;
                        (l, r, lk, rk)
                    }
                };
                if lk != rk {
                    return Err(ill(format!("`{}` compares {lk} with {rk}", op.symbol())));
                }
                Ok((BoolExpr::Cmp(*op, Box::new(l), Box::new(r)), TagKind::Bool))
            }
            BoolExpr::Not(e) => {
                let (e, k) = e.check(kinds)?;
                expect_kind(&k, &TagKind::Bool, "not")?;
                Ok((BoolExpr::Not(Box::new(e)), TagKind::Bool))
            }
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) => {
                let (l2, lk) = l.check(kinds)?;
                let (r2, rk) = r.check(kinds)?;
                let name = if matches!(self, BoolExpr::And(..)) { "and" } else { "or" };
                expect_kind(&lk, &TagKind::Bool, name)?;
                expect_kind(&rk, &TagKind::Bool, name)?;
                let (l2, r2) = (Box::new(l2), Box::new(r2));
                Ok((
                    if name == "and" {
                        BoolExpr::And(l2, r2)
                    } else {
                        BoolExpr::Or(l2, r2)
                    },
                    TagKind::Bool,
                ))
            }
        }
    }

    /// Evaluates a checked expression under `assignment`.
    pub fn eval(&self, assignment: &BTreeMap<&Dim, &TagValue>) -> Result<TagValue> {
        Ok(match self {
            BoolExpr::Const(b) => TagValue::Bool(*b),
            BoolExpr::Lit(v) => v.clone(),
            BoolExpr::Var(d) => (*assignment.get(d).ok_or_else(|| ill(format!("`{d}` is unassigned")))?).clone(),
            BoolExpr::Label(l) => return Err(ill(format!("unresolved label `{l}`"))),
            BoolExpr::Neg(e) => TagValue::Int(-as_int(e.eval(assignment)?)?),
            BoolExpr::Arith(op, l, r) => {
                let (a, b) = (as_int(l.eval(assignment)?)?, as_int(r.eval(assignment)?)?);
                TagValue::Int(match op {
                    ArithOp::Add => a + b,
                    ArithOp::Sub => a - b,
                    ArithOp::Mul => a * b,
                })
            }
            BoolExpr::Cmp(op, l, r) => {
                let (a, b) = (l.eval(assignment)?, r.eval(assignment)?);
                let ord = a
                    .try_cmp(&b)
                    .ok_or_else(|| ill(format!("cannot compare `{a}` with `{b}`")))?;
                TagValue::Bool(op.holds(ord))
            }
            BoolExpr::Not(e) => TagValue::Bool(!as_bool(e.eval(assignment)?)?),
            BoolExpr::And(l, r) => TagValue::Bool(as_bool(l.eval(assignment)?)? && as_bool(r.eval(assignment)?)?),
            BoolExpr::Or(l, r) => TagValue::Bool(as_bool(l.eval(assignment)?)? || as_bool(r.eval(assignment)?)?),
        })
    }

    fn fmt_child(&self, child: &BoolExpr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if child.precedence() < min {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

fn expect_kind(found: &TagKind, expected: &TagKind, op: &str) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(ill(format!("`{op}` expects {expected}, found {found}")))
    }
}

fn resolve_label(label: &str, kind: &TagKind) -> Result<BoolExpr> {
    match kind {
        TagKind::Enum(domain) => domain
            .tag(label)
            .map(BoolExpr::Lit)
            .ok_or_else(|| ill(format!("`{label}` is not a label of {kind}"))),
        _ => Err(ill(format!("`{label}` is not a Box dimension"))),
    }
}

fn as_int(v: TagValue) -> Result<BigInt> {
    match v {
        TagValue::Int(n) => Ok(n),
        other => Err(ill(format!("expected an integer, found `{other}`"))),
    }
}

fn as_bool(v: TagValue) -> Result<bool> {
    match v {
        TagValue::Bool(b) => Ok(b),
        other => Err(ill(format!("expected a boolean, found `{other}`"))),
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.precedence();
        match self {
            BoolExpr::Const(b) => write!(f, "{b}"),
            BoolExpr::Lit(v) => write!(f, "{v}"),
            BoolExpr::Label(l) => f.write_str(l),
            BoolExpr::Var(d) => write!(f, "{d}"),
            BoolExpr::Neg(e) => {
                f.write_str("-")?;
                self.fmt_child(e, p, f)
            }
            BoolExpr::Not(e) => {
                f.write_str("not ")?;
                self.fmt_child(e, p, f)
            }
            BoolExpr::Arith(op, l, r) => {
                self.fmt_child(l, p, f)?;
                write!(f, " {} ", op.symbol())?;
                self.fmt_child(r, p + 1, f)
            }
            // Comparisons do not chain, so both sides need a tighter level.
            BoolExpr::Cmp(op, l, r) => {
                self.fmt_child(l, p + 1, f)?;
                write!(f, " {} ", op.symbol())?;
                self.fmt_child(r, p + 1, f)
            }
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) => {
                self.fmt_child(l, p, f)?;
                f.write_str(if p == 2 { " and " } else { " or " })?;
                self.fmt_child(r, p + 1, f)
            }
        }
    }
}

/// `Box[d1, …, dk | p]`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxSet {
    dims: Vec<Dimension>,
    predicate: BoolExpr,
}

impl BoxSet {
    /// Builds a Box over registered dimensions, resolving enumeration labels
    /// in `predicate` and checking that it is a well-kinded boolean.
    pub fn new(registry: &DimensionRegistry, dims: &[&str], predicate: BoolExpr) -> Result<Self> {
        if dims.is_empty() {
            return Err(ill("a Box needs at least one dimension"));
        }
        let mut kinds = BTreeMap::new();
        let mut dimensions = Vec::with_capacity(dims.len());
        for name in dims {
            let dim = registry.get(name)?;
            if kinds.insert(dim.name().clone(), dim.tag_type().clone()).is_some() {
                return Err(ill(format!("dimension `{name}` is listed twice")));
            }
            dimensions.push(dim.clone());
        }
        let (predicate, kind) = predicate.check(&kinds)?;
        expect_kind(&kind, &TagKind::Bool, "Box predicate")?;
        Ok(BoxSet {
            dims: dimensions,
            predicate,
        })
    }

    pub fn dimensions(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn dims(&self) -> DimSet {
        self.dims.iter().map(|d| d.name().clone()).collect()
    }

    pub fn predicate(&self) -> &BoolExpr {
        &self.predicate
    }

    /// Whether `c` binds exactly the Box dimensions, with tags their
    /// dimensions admit, and satisfies the predicate.
    pub fn contains(&self, c: &Context) -> Result<bool> {
        if !c.is_simple() {
            return Err(Error::NonSimpleOperand {
                op: "Box membership",
                context: c.to_string(),
            });
        }
        if c.dims() != self.dims() {
            return Ok(false);
        }
        let assignment: BTreeMap<&Dim, &TagValue> = c.entries().map(|m| (&m.dim, &m.tag)).collect();
        if self.dims.iter().any(|d| d.check_tag(assignment[d.name()]).is_err()) {
            return Ok(false);
        }
        as_bool(self.predicate.eval(&assignment)?)
    }

    /// Lists the members: the product of the dimension domains filtered by
    /// the predicate.
    pub fn enumerate(&self) -> Result<ContextSet> {
        let domains = self
            .dims
            .iter()
            .map(|d| {
                d.finite_domain()
                    .ok_or_else(|| Error::UnboundedBox(d.name().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut members = Vec::new();
        let mut index = vec![0usize; domains.len()];
        if domains.iter().any(Vec::is_empty) {
            return Ok(ContextSet::empty());
        }
        loop {
            let candidate: Context = self
                .dims
                .iter()
                .zip(&index)
                .zip(&domains)
                .map(|((d, &i), domain)| MicroContext {
                    dim: d.name().clone(),
                    tag: domain[i].clone(),
                })
                .collect();
            if self.contains(&candidate)? {
                members.push(candidate);
            }
            // Odometer increment over the domain indices.
            let mut pos = domains.len();
            loop {
                if pos == 0 {
                    return ContextSet::new(members);
                }
                pos -= 1;
                index[pos] += 1;
                if index[pos] < domains[pos].len() {
                    break;
                }
                index[pos] = 0;
            }
        }
    }
}

impl fmt::Display for BoxSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Box[")?;
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", d.name())?;
        }
        write!(f, " | {}]", self.predicate)
    }
}
