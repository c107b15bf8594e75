//! Sets of simple contexts and the operators over them: the member-wise
//! lifted operators and the relational join, intersection and union.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Context, DimSet, Dimension, MicroContext, TagValue};
use crate::ops;

/// A finite set of simple contexts.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContextSet {
    members: BTreeSet<Context>,
}

impl ContextSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Collects `members`, rejecting any that is not simple.
    pub fn new<I: IntoIterator<Item = Context>>(members: I) -> Result<Self> {
        let mut set = BTreeSet::new();
        for c in members {
            if !c.is_simple() {
                return Err(Error::NonSimpleMember(c.to_string()));
            }
            set.insert(c);
        }
        Ok(ContextSet { members: set })
    }

    pub fn singleton(c: Context) -> Result<Self> {
        Self::new([c])
    }

    pub fn iter(&self) -> impl Iterator<Item = &Context> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, c: &Context) -> bool {
        self.members.contains(c)
    }

    /// Union of the dimensions of every member.
    pub fn dims(&self) -> DimSet {
        self.members.iter().fold(DimSet::new(), |acc, c| acc.union(&c.dims()))
    }

    /// Builds a set from members already known to be simple.
    fn from_simple<I: IntoIterator<Item = Context>>(members: I) -> Self {
        let members: BTreeSet<Context> = members.into_iter().collect();
        debug_assert!(members.iter().all(Context::is_simple));
        ContextSet { members }
    }

    fn pairs<'a>(&'a self, other: &'a ContextSet) -> impl Iterator<Item = (&'a Context, &'a Context)> {
        self.members
            .iter()
            .flat_map(move |c1| other.members.iter().map(move |c2| (c1, c2)))
    }
}

impl<'a> IntoIterator for &'a ContextSet {
    type Item = &'a Context;
    type IntoIter = std::collections::btree_set::Iter<'a, Context>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

impl fmt::Display for ContextSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}")
    }
}

pub fn lift_projection(s: &ContextSet, dims: &DimSet) -> ContextSet {
    ContextSet::from_simple(s.iter().map(|c| ops::projection(c, dims)))
}

pub fn lift_hiding(s: &ContextSet, dims: &DimSet) -> ContextSet {
    ContextSet::from_simple(s.iter().map(|c| ops::hiding(c, dims)))
}

/// `s / ⟨d, t⟩`: substitutes the micro context `(d, t)` into every member.
pub fn lift_substitution(s: &ContextSet, dim: &Dimension, tag: &TagValue) -> Result<ContextSet> {
    dim.check_tag(tag)?;
    let micro = Context::from_entries([MicroContext {
        dim: dim.name().clone(),
        tag: tag.clone(),
    }]);
    let members = s
        .iter()
        .map(|c| ops::substitution(c, &micro))
        .collect::<Result<Vec<_>>>()?;
    Ok(ContextSet::from_simple(members))
}

/// `s1 | s2`
pub fn lift_choice<'a, R: Rng + ?Sized>(s1: &'a ContextSet, s2: &'a ContextSet, rng: &mut R) -> &'a ContextSet {
    if rng.gen_range(0..2) == 0 {
        s1
    } else {
        s2
    }
}

/// `s1 ⊕ s2`, all pairs.
pub fn lift_override(s1: &ContextSet, s2: &ContextSet) -> ContextSet {
    // Members of s2 are simple, so the per-pair override cannot fail.
    ContextSet::from_simple(
        s1.pairs(s2)
            .map(|(c1, c2)| ops::override_with(c1, c2).expect("context set members are simple")),
    )
}

/// `s1 ⊖ s2`, all pairs.
pub fn lift_difference(s1: &ContextSet, s2: &ContextSet) -> ContextSet {
    ContextSet::from_simple(s1.pairs(s2).map(|(c1, c2)| ops::difference(c1, c2)))
}

/// `s1 ⋈ s2`: unions of the pairs that agree on the dimensions both sets
/// use.
pub fn join(s1: &ContextSet, s2: &ContextSet) -> ContextSet {
    let shared = s1.dims().intersection(&s2.dims());
    ContextSet::from_simple(
        s1.pairs(s2)
            .filter(|(c1, c2)| ops::projection(c1, &shared) == ops::projection(c2, &shared))
            .map(|(c1, c2)| ops::disjunction(c1, c2)),
    )
}

/// `s1 ⊓ s2`: member-wise conjunction over all pairs.
///
/// This is not the same as projecting the join on the shared dimensions: a
/// pair that disagrees there is dropped by the join but contributes its
/// (possibly empty) intersection here.
pub fn set_intersection(s1: &ContextSet, s2: &ContextSet) -> ContextSet {
    ContextSet::from_simple(s1.pairs(s2).map(|(c1, c2)| ops::conjunction(c1, c2)))
}

/// `s1 ⊞ s2`: for every pair, each side extended with the other side's
/// pairs on dimensions the first set does not use.
pub fn set_union(s1: &ContextSet, s2: &ContextSet) -> Result<ContextSet> {
    let shared = s1.dims().intersection(&s2.dims());
    let mut members = BTreeSet::new();
    for (ci, cj) in s1.pairs(s2) {
        members.insert(ops::disjunction(ci, &ops::hiding(cj, &shared)));
        members.insert(ops::disjunction(cj, &ops::hiding(ci, &shared)));
    }
    // Clashing dimensions are shared and therefore hidden, so this holds.
    if let Some(bad) = members.iter().find(|c| !c.is_simple()) {
        return Err(Error::NonSimpleResidue(bad.to_string()));
    }
    Ok(ContextSet { members })
}
