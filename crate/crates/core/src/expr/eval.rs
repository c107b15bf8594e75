use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boxset::BoxSet;
use crate::error::Error;
use crate::model::{Context, ContextOrdering, DimSet, DimensionRegistry, TagValue};
use crate::ops;
use crate::set::{self, ContextSet};

use super::ast::*;
use super::{Environment, ExprError, Value};

type EResult<T> = Result<T, ExprError>;

/// Evaluates `expr` with a choice generator seeded from `env.seed`, so the
/// same environment always gives the same answer.
pub fn evaluate(expr: &Expr, env: &Environment) -> EResult<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(env.seed);
    match expr {
        Expr::Context(e) => evaluate_context_expr(e, env, &mut rng),
        Expr::Set(SetExpr::Box { dims, predicate }) => Ok(Value::Box(make_box(env, dims, predicate)?)),
        Expr::Set(SetExpr::Var(name)) => match env.get(name)? {
            Value::Box(b) => Ok(Value::Box(b.clone())),
            _ => evaluate_context_set_expr(&SetExpr::Var(name.clone()), env, &mut rng).map(Value::ContextSet),
        },
        Expr::Set(e) => evaluate_context_set_expr(e, env, &mut rng).map(Value::ContextSet),
    }
}

fn make_box(env: &Environment, dims: &[String], predicate: &crate::boxset::BoolExpr) -> EResult<BoxSet> {
    let names: Vec<&str> = dims.iter().map(String::as_str).collect();
    Ok(BoxSet::new(&env.registry, &names, predicate.clone())?)
}

/// Resolves a source tag against the dimension it is paired with.
pub fn resolve_tag(registry: &DimensionRegistry, dim: &str, tag: &TagLit) -> Result<TagValue, Error> {
    let dimension = registry.get(dim)?;
    Ok(match tag {
        TagLit::Int(n) => TagValue::Int(n.clone()),
        TagLit::Str(s) => TagValue::str(s),
        TagLit::Bool(b) => TagValue::Bool(*b),
        TagLit::Label(label) => match dimension.label(label) {
            Some(tag) => tag,
            None => {
                return Err(Error::TagTypeMismatch {
                    dim: dim.to_string(),
                    tag: label.clone(),
                    expected: dimension.tag_type().clone(),
                    found: "label".into(),
                })
            }
        },
    })
}

pub fn resolve_context_literal(registry: &DimensionRegistry, pairs: &ContextLit) -> Result<Context, Error> {
    let resolved = pairs
        .iter()
        .map(|(d, t)| Ok((d.as_str(), resolve_tag(registry, d, t)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    registry.make_context(resolved)
}

fn dimset(env: &Environment, d: &DimSetExpr) -> EResult<DimSet> {
    match d {
        DimSetExpr::Var(name) => match env.get(name)? {
            Value::DimSet(d) => Ok(d.clone()),
            other => Err(ExprError::KindMismatch {
                expected: "dimset",
                found: other.kind(),
            }),
        },
        DimSetExpr::Literal(names) => Ok(env.registry.make_dimset(names.iter().map(String::as_str))?),
    }
}

fn expect_context(v: Value) -> EResult<Context> {
    match v {
        Value::Context(c) => Ok(c),
        other => Err(ExprError::KindMismatch {
            expected: "context",
            found: other.kind(),
        }),
    }
}

fn context_operand<R: Rng + ?Sized>(e: &ContextExpr, env: &Environment, rng: &mut R) -> EResult<Context> {
    expect_context(evaluate_context_expr(e, env, rng)?)
}

/// Evaluates a context expression. Ranges yield context sets, comparisons
/// yield booleans, everything else yields a context.
pub fn evaluate_context_expr<R: Rng + ?Sized>(e: &ContextExpr, env: &Environment, rng: &mut R) -> EResult<Value> {
    let value = match e {
        ContextExpr::Var(name) => match env.get(name)? {
            v @ (Value::Context(_) | Value::ContextSet(_)) => v.clone(),
            other => {
                return Err(ExprError::KindMismatch {
                    expected: "context",
                    found: other.kind(),
                })
            }
        },
        ContextExpr::Literal(pairs) => Value::Context(resolve_context_literal(&env.registry, pairs)?),
        ContextExpr::Projection(c, d) => {
            Value::Context(ops::projection(&context_operand(c, env, rng)?, &dimset(env, d)?))
        }
        ContextExpr::Hiding(c, d) => Value::Context(ops::hiding(&context_operand(c, env, rng)?, &dimset(env, d)?)),
        ContextExpr::Choice(items) => {
            let candidates = items
                .iter()
                .map(|c| context_operand(c, env, rng))
                .collect::<EResult<Vec<_>>>()?;
            Value::Context(ops::choice(&candidates, rng)?.clone())
        }
        ContextExpr::Binary(op, l, r) => {
            let l = context_operand(l, env, rng)?;
            let r = context_operand(r, env, rng)?;
            match op {
                ContextBinOp::Substitution => Value::Context(ops::substitution(&l, &r)?),
                ContextBinOp::Conjunction => Value::Context(ops::conjunction(&l, &r)),
                ContextBinOp::Disjunction => Value::Context(ops::disjunction(&l, &r)),
                ContextBinOp::Override => Value::Context(ops::override_with(&l, &r)?),
                ContextBinOp::Difference => Value::Context(ops::difference(&l, &r)),
                ContextBinOp::UndirectedRange => Value::ContextSet(ops::undirected_range(&l, &r)?),
                ContextBinOp::DirectedRange => Value::ContextSet(ops::directed_range(&l, &r)?),
            }
        }
        ContextExpr::Compare(op, l, r) => {
            let verdict = context_operand(l, env, rng)?.compare(&context_operand(r, env, rng)?);
            Value::Bool(match op {
                CompareOp::Equal => verdict == ContextOrdering::Equal,
                CompareOp::Subset => matches!(verdict, ContextOrdering::Equal | ContextOrdering::Subset),
                CompareOp::Superset => matches!(verdict, ContextOrdering::Equal | ContextOrdering::Superset),
            })
        }
    };
    Ok(value)
}

fn set_operand<R: Rng + ?Sized>(e: &SetExpr, env: &Environment, rng: &mut R) -> EResult<ContextSet> {
    evaluate_context_set_expr(e, env, rng)
}

/// Evaluates a context-set expression. Boxes used as operands are
/// enumerated.
pub fn evaluate_context_set_expr<R: Rng + ?Sized>(e: &SetExpr, env: &Environment, rng: &mut R) -> EResult<ContextSet> {
    Ok(match e {
        SetExpr::Var(name) => match env.get(name)? {
            Value::ContextSet(s) => s.clone(),
            Value::Box(b) => b.enumerate()?,
            other => {
                return Err(ExprError::KindMismatch {
                    expected: "context_set",
                    found: other.kind(),
                })
            }
        },
        SetExpr::Literal(members) => ContextSet::new(
            members
                .iter()
                .map(|m| resolve_context_literal(&env.registry, m))
                .collect::<Result<Vec<_>, Error>>()?,
        )?,
        SetExpr::Box { dims, predicate } => make_box(env, dims, predicate)?.enumerate()?,
        SetExpr::Range(kind, l, r) => {
            let l = context_operand(l, env, rng)?;
            let r = context_operand(r, env, rng)?;
            match kind {
                RangeKind::Undirected => ops::undirected_range(&l, &r)?,
                RangeKind::Directed => ops::directed_range(&l, &r)?,
            }
        }
        SetExpr::Projection(s, d) => set::lift_projection(&set_operand(s, env, rng)?, &dimset(env, d)?),
        SetExpr::Hiding(s, d) => set::lift_hiding(&set_operand(s, env, rng)?, &dimset(env, d)?),
        SetExpr::Substitution(s, dim, tag) => {
            let s = set_operand(s, env, rng)?;
            let tag = resolve_tag(&env.registry, dim, tag)?;
            set::lift_substitution(&s, env.registry.get(dim)?, &tag)?
        }
        SetExpr::Binary(op, l, r) => {
            let l = set_operand(l, env, rng)?;
            let r = set_operand(r, env, rng)?;
            match op {
                SetBinOp::Choice => set::lift_choice(&l, &r, rng).clone(),
                SetBinOp::Override => set::lift_override(&l, &r),
                SetBinOp::Difference => set::lift_difference(&l, &r),
                SetBinOp::Join => set::join(&l, &r),
                SetBinOp::Intersection => set::set_intersection(&l, &r),
                SetBinOp::Union => set::set_union(&l, &r)?,
            }
        }
    })
}
