use std::collections::BTreeSet;

use ctxcalc::ops::{
    choice, difference, directed_range, hiding, override_with, projection, substitution, undirected_range,
};
use ctxcalc::{Context, ContextOrdering, ContextSet, DimSet, DimensionRegistry, Error, TagKind, TagValue};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{any_pairs, check, dim_subset, simple_pairs, to_context, Law, Pairs};

fn dimset(names: &[&str]) -> DimSet {
    names.iter().copied().collect()
}

#[derive(Debug, PartialEq, Eq)]
pub enum OracleError {
    NonSimpleOperand,
    NonSimpleResidue,
}

/// Brute-force range: every assignment of a tag in 0..=5 to each shared
/// dimension that some operand pair's envelope admits, joined with the
/// unshared pairs of both operands. For the directed form only pairs with
/// a strictly smaller first tag open an envelope, and shared dimensions
/// without one are dropped.
pub fn range_oracle(c1: &Pairs, c2: &Pairs, directed: bool) -> Result<BTreeSet<Pairs>, OracleError> {
    let tags_of = |c: &Pairs, d: &str| -> Vec<i64> { c.iter().filter(|(x, _)| x == d).map(|(_, t)| *t).collect() };
    let dims1: BTreeSet<&str> = c1.iter().map(|(d, _)| d.as_str()).collect();
    let dims2: BTreeSet<&str> = c2.iter().map(|(d, _)| d.as_str()).collect();
    if directed && dims2.len() != c2.len() {
        return Err(OracleError::NonSimpleOperand);
    }
    let shared: Vec<&str> = dims1.intersection(&dims2).copied().collect();

    let residue: Pairs = c1
        .iter()
        .chain(c2)
        .filter(|(d, _)| !shared.contains(&d.as_str()))
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let residue_dims: BTreeSet<&str> = residue.iter().map(|(d, _)| d.as_str()).collect();
    if residue_dims.len() != residue.len() {
        return Err(OracleError::NonSimpleResidue);
    }

    let mut allowed: Vec<(&str, Vec<i64>)> = Vec::new();
    for d in &shared {
        let admitted: Vec<i64> = (0..=5)
            .filter(|&v| {
                tags_of(c1, d).iter().any(|&a| {
                    tags_of(c2, d).iter().any(|&b| {
                        if directed {
                            a < b && a <= v && v <= b
                        } else {
                            a.min(b) <= v && v <= a.max(b)
                        }
                    })
                })
            })
            .collect();
        if !admitted.is_empty() {
            allowed.push((d, admitted));
        }
    }

    let mut out = BTreeSet::new();
    let mut choice = vec![0usize; allowed.len()];
    loop {
        let mut member = residue.clone();
        for ((d, tags), &i) in allowed.iter().zip(&choice) {
            member.push((d.to_string(), tags[i]));
        }
        member.sort();
        out.insert(member);
        let mut pos = allowed.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < allowed[pos].1.len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

fn oracle_set(members: &BTreeSet<Pairs>) -> ContextSet {
    ContextSet::new(members.iter().map(|m| to_context(m))).expect("oracle members are simple")
}

fn agrees(
    actual: Result<ContextSet, Error>,
    expected: Result<BTreeSet<Pairs>, OracleError>,
) -> Result<(), TestCaseError> {
    match (actual, expected) {
        (Ok(a), Ok(e)) => {
            prop_assert_eq!(a, oracle_set(&e));
        }
        (Err(Error::NonSimpleResidue(_)), Err(OracleError::NonSimpleResidue)) => {}
        (Err(Error::NonSimpleOperand { .. }), Err(OracleError::NonSimpleOperand)) => {}
        (a, e) => prop_assert!(false, "implementation {:?} but oracle {:?}", a, e),
    }
    Ok(())
}

pub fn partition(cases: u32) -> Result<(), String> {
    check(cases, (any_pairs(), dim_subset()), |(c, d)| {
        let c = to_context(&c);
        let d = dimset(&d);
        let (p, h) = (projection(&c, &d), hiding(&c, &d));
        let union: BTreeSet<_> = p.entries().chain(h.entries()).cloned().collect();
        prop_assert_eq!(union, c.clone().into_entries());
        prop_assert!(p.entries().all(|m| !h.contains(m)));
        Ok(())
    })
}

pub fn override_laws(cases: u32) -> Result<(), String> {
    check(cases, (any_pairs(), simple_pairs()), |(c, s)| {
        let (c, s) = (to_context(&c), to_context(&s));
        let o = override_with(&c, &s).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(o.dims(), c.dims().union(&s.dims()));
        prop_assert_eq!(projection(&o, &s.dims()), s.clone());
        prop_assert_eq!(override_with(&c, &Context::null()).unwrap(), c.clone());
        prop_assert_eq!(override_with(&Context::null(), &s).unwrap(), s);
        Ok(())
    })
}

pub fn substitution_equal_domains(cases: u32) -> Result<(), String> {
    let strategy = any_pairs().prop_flat_map(|c| {
        let dims: Vec<String> = c
            .iter()
            .map(|(d, _)| d.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let n = dims.len();
        (
            Just(c),
            prop::collection::vec(0i64..=5, n)
                .prop_map(move |tags| dims.clone().into_iter().zip(tags).collect::<Pairs>()),
        )
    });
    check(cases, strategy, |(c, s)| {
        let (c, s) = (to_context(&c), to_context(&s));
        prop_assert_eq!(substitution(&c, &s).unwrap(), s);
        Ok(())
    })
}

pub fn undirected_symmetry(cases: u32) -> Result<(), String> {
    check(cases, (simple_pairs(), simple_pairs()), |(a, b)| {
        let (a, b) = (to_context(&a), to_context(&b));
        prop_assert_eq!(undirected_range(&a, &b).unwrap(), undirected_range(&b, &a).unwrap());
        Ok(())
    })
}

pub fn range_matches_oracle(cases: u32) -> Result<(), String> {
    check(cases, (any_pairs(), any_pairs()), |(a, b)| {
        let (ca, cb) = (to_context(&a), to_context(&b));
        let undirected = undirected_range(&ca, &cb);
        if let Ok(s) = &undirected {
            let domain = s.iter().next().map(Context::dims);
            prop_assert!(s.iter().all(|m| m.is_simple() && Some(m.dims()) == domain));
        }
        agrees(undirected, range_oracle(&a, &b, false))?;
        agrees(directed_range(&ca, &cb), range_oracle(&a, &b, true))
    })
}

pub fn choice_membership(cases: u32) -> Result<(), String> {
    check(cases, prop::collection::vec(any_pairs(), 1..5), |cs| {
        let cs: Vec<Context> = cs.iter().map(|c| to_context(c)).collect();
        for seed in 0..100 {
            let picked = choice(&cs, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            prop_assert!(cs.contains(picked));
        }
        Ok(())
    })
}

pub fn compare_partial_order(cases: u32) -> Result<(), String> {
    check(cases, (any_pairs(), any_pairs(), any_pairs()), |(a, b, c)| {
        let a = to_context(&a);
        // b ⊇ a and c ⊇ b by construction; the raw pair also exercises
        // incomparable cases.
        let raw = to_context(&b);
        let b = a.entries().chain(raw.entries()).cloned().collect::<Context>();
        let c = b
            .entries()
            .chain(to_context(&c).entries())
            .cloned()
            .collect::<Context>();
        let le = |x: &Context, y: &Context| matches!(x.compare(y), ContextOrdering::Equal | ContextOrdering::Subset);

        prop_assert_eq!(a.compare(&a), ContextOrdering::Equal);
        prop_assert!(le(&a, &b) && le(&b, &c) && le(&a, &c));
        for (x, y) in [(&a, &raw), (&raw, &a), (&a, &b), (&b, &c)] {
            if le(x, y) && le(y, x) {
                prop_assert_eq!(x, y);
            }
            let flipped = match x.compare(y) {
                ContextOrdering::Subset => ContextOrdering::Superset,
                ContextOrdering::Superset => ContextOrdering::Subset,
                other => other,
            };
            prop_assert_eq!(y.compare(x), flipped);
        }
        prop_assert_eq!(difference(&a, &a), Context::null());
        Ok(())
    })
}

pub fn context_invariants(cases: u32) -> Result<(), String> {
    let mut registry = DimensionRegistry::new();
    for d in super::DIMS {
        registry.register(d, TagKind::Int, None).unwrap();
    }
    check(cases, any_pairs().prop_shuffle(), move |pairs| {
        let c = to_context(&pairs);
        let distinct: BTreeSet<_> = pairs.iter().cloned().collect();
        prop_assert!(c.degree() <= c.len());
        prop_assert_eq!(c.degree() == c.len(), c.is_simple());
        prop_assert_eq!(c.len(), distinct.len());
        if c.is_micro() {
            prop_assert_eq!(c.degree(), 1);
        }
        let made = registry
            .make_context(pairs.iter().map(|(d, t)| (d.as_str(), TagValue::from(*t))))
            .unwrap();
        let mut reversed = pairs.clone();
        reversed.reverse();
        let made_rev = registry
            .make_context(reversed.iter().map(|(d, t)| (d.as_str(), TagValue::from(*t))))
            .unwrap();
        prop_assert_eq!(&made, &c);
        prop_assert_eq!(made_rev, c);
        Ok(())
    })
}

/// The laws run for the context-operator criterion, by name.
pub fn all() -> Vec<(&'static str, Law)> {
    vec![
        ("projection/hiding partition", partition),
        ("override identities and dims union", override_laws),
        ("substitution with equal domains", substitution_equal_domains),
        ("undirected range symmetry", undirected_symmetry),
        ("range brute-force oracle", range_matches_oracle),
        ("choice membership over 100 seeds", choice_membership),
        ("compare partial order", compare_partial_order),
        ("context invariants", context_invariants),
    ]
}
