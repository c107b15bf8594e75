//! Operators on single contexts.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Context, Dim, DimSet, MicroContext, TagValue};
use crate::set::ContextSet;

fn require_simple(op: &'static str, c: &Context) -> Result<()> {
    if c.is_simple() {
        Ok(())
    } else {
        Err(Error::NonSimpleOperand {
            op,
            context: c.to_string(),
        })
    }
}

/// `c1 ⊕ c2`: every pair of `c2`, plus the pairs of `c1` whose dimension is
/// not bound by `c2`.
pub fn override_with(c1: &Context, c2: &Context) -> Result<Context> {
    require_simple("override", c2)?;
    let bound = c2.dims();
    Ok(c1
        .entries()
        .filter(|m| !bound.contains(&m.dim))
        .chain(c2.entries())
        .cloned()
        .collect())
}

/// `c1 ⊖ c2`, plain set difference.
pub fn difference(c1: &Context, c2: &Context) -> Context {
    c1.set().difference(c2.set()).cloned().collect()
}

/// `c1 ∩ c2`
pub fn conjunction(c1: &Context, c2: &Context) -> Context {
    c1.set().intersection(c2.set()).cloned().collect()
}

/// `c1 ∪ c2`. The result may be non-simple.
pub fn disjunction(c1: &Context, c2: &Context) -> Context {
    c1.set().union(c2.set()).cloned().collect()
}

/// `c1 | c2 | … | ck`: one candidate picked uniformly by `rng`.
pub fn choice<'a, R: Rng + ?Sized>(candidates: &'a [Context], rng: &mut R) -> Result<&'a Context> {
    if candidates.is_empty() {
        return Err(Error::EmptyChoice);
    }
    Ok(&candidates[rng.gen_range(0..candidates.len())])
}

/// `c ↓ D`
pub fn projection(c: &Context, dims: &DimSet) -> Context {
    c.entries().filter(|m| dims.contains(&m.dim)).cloned().collect()
}

/// `c ↑ D`
pub fn hiding(c: &Context, dims: &DimSet) -> Context {
    c.entries().filter(|m| !dims.contains(&m.dim)).cloned().collect()
}

/// `c / s = (c ↑ dim s) ∪ (s ↓ dim c)`
pub fn substitution(c: &Context, s: &Context) -> Result<Context> {
    require_simple("substitution", s)?;
    Ok(disjunction(&hiding(c, &s.dims()), &projection(s, &c.dims())))
}

/// `c1 ⇔ c2`
pub fn undirected_range(c1: &Context, c2: &Context) -> Result<ContextSet> {
    range(c1, c2, |a, b| match a.try_cmp(b) {
        Some(Ordering::Greater) => Some((b, a)),
        _ => Some((a, b)),
    })
}

/// `c1 ⇒ c2`. Pairs whose first tag is not strictly below the second are
/// ignored, but their dimension still counts as handled and is hidden from
/// both remainders.
pub fn directed_range(c1: &Context, c2: &Context) -> Result<ContextSet> {
    require_simple("directed range", c2)?;
    range(c1, c2, |a, b| match a.try_cmp(b) {
        Some(Ordering::Less) => Some((a, b)),
        _ => None,
    })
}

/// The inclusive subrange `low..high`, stepping through the tag order.
fn subrange(dim: &Dim, low: &TagValue, high: &TagValue) -> Result<Vec<TagValue>> {
    let unordered = || Error::UnorderedRangeDimension(dim.to_string());
    if !low.kind().is_stepped() || low.try_cmp(high).is_none() {
        return Err(unordered());
    }
    let mut out = vec![low.clone()];
    let mut current = low.clone();
    while current.try_cmp(high) == Some(Ordering::Less) {
        current = current.successor().ok_or_else(unordered)?;
        out.push(current.clone());
    }
    Ok(out)
}

/// Shared construction of the two range operators. `bounds` turns a pair of
/// tags on a shared dimension into the subrange endpoints, or `None` to
/// ignore the pair.
fn range<F>(c1: &Context, c2: &Context, bounds: F) -> Result<ContextSet>
where
    F: for<'t> Fn(&'t TagValue, &'t TagValue) -> Option<(&'t TagValue, &'t TagValue)>,
{
    // Subranges per shared dimension, already merged by union.
    let mut merged: BTreeMap<Dim, BTreeSet<TagValue>> = BTreeMap::new();
    let mut handled = DimSet::new();
    for m1 in c1.entries() {
        for m2 in c2.entries().filter(|m2| m2.dim == m1.dim) {
            if !m1.tag.kind().is_stepped() || m1.tag.try_cmp(&m2.tag).is_none() {
                return Err(Error::UnorderedRangeDimension(m1.dim.to_string()));
            }
            handled.insert(m1.dim.clone());
            if let Some((low, high)) = bounds(&m1.tag, &m2.tag) {
                merged
                    .entry(m1.dim.clone())
                    .or_default()
                    .extend(subrange(&m1.dim, low, high)?);
            }
        }
    }

    let residue = disjunction(&hiding(c1, &handled), &hiding(c2, &handled));
    if !residue.is_simple() {
        return Err(Error::NonSimpleResidue(residue.to_string()));
    }

    // Cartesian product over the merged per-dimension tag sets; the empty
    // product is the single empty tuple.
    let mut product = vec![residue];
    for (dim, tags) in &merged {
        let mut next = Vec::with_capacity(product.len() * tags.len());
        for partial in &product {
            for tag in tags {
                let mut c = partial.clone();
                c.insert(MicroContext {
                    dim: dim.clone(),
                    tag: tag.clone(),
                });
                next.push(c);
            }
        }
        product = next;
    }
    ContextSet::new(product)
}
