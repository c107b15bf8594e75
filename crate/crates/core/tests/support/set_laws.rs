use ctxcalc::boxset::{ArithOp, CmpOp};
use ctxcalc::set::{join, lift_projection, set_intersection, set_union};
use ctxcalc::{BoolExpr, BoxSet, Context, ContextSet, Dim, DimensionRegistry, MicroContext, TagKind, TagValue};
use proptest::prelude::*;

use super::{check, simple_pairs_over, to_context, Law, Pairs};

const SET_DIMS: [&str; 3] = ["d", "e", "f"];

fn context_set() -> impl Strategy<Value = Vec<Pairs>> {
    prop::collection::vec(simple_pairs_over(&SET_DIMS), 0..4)
}

fn build(members: &[Pairs]) -> ContextSet {
    ContextSet::new(members.iter().map(|m| to_context(m))).unwrap()
}

pub fn commutativity(cases: u32) -> Result<(), String> {
    check(cases, (context_set(), context_set()), |(a, b)| {
        let (a, b) = (build(&a), build(&b));
        prop_assert_eq!(join(&a, &b), join(&b, &a));
        prop_assert_eq!(set_intersection(&a, &b), set_intersection(&b, &a));
        let (ab, ba) = (set_union(&a, &b).unwrap(), set_union(&b, &a).unwrap());
        prop_assert!(ab.iter().all(Context::is_simple));
        prop_assert_eq!(ab, ba);
        Ok(())
    })
}

/// Sets whose every cross pair agrees on the shared dimensions: all members
/// carry one assignment on `shared`, and the other dimensions of the two
/// sides are disjoint.
fn agreeing_sets() -> impl Strategy<Value = (Vec<Pairs>, Vec<Pairs>)> {
    let pool = ["d", "e", "f", "g", "h"];
    prop::sample::subsequence(pool.to_vec(), 0..=2).prop_flat_map(move |shared| {
        let rest: Vec<&'static str> = pool.iter().copied().filter(|d| !shared.contains(d)).collect();
        let split = rest.len() / 2;
        let (left, right) = (rest[..split].to_vec(), rest[split..].to_vec());
        let n = shared.len();
        let sigma = prop::collection::vec(0i64..=5, n)
            .prop_map(move |tags| shared.iter().map(|d| d.to_string()).zip(tags).collect::<Pairs>());
        let side = |dims: Vec<&'static str>| {
            prop::collection::vec(
                prop::collection::vec(0i64..=5, dims.len())
                    .prop_map(move |tags| dims.iter().map(|d| d.to_string()).zip(tags).collect::<Pairs>()),
                1..4,
            )
        };
        (sigma, side(left), side(right)).prop_map(|(sigma, l, r)| {
            let with = |members: Vec<Pairs>| {
                members
                    .into_iter()
                    .map(|m| sigma.iter().cloned().chain(m).collect::<Pairs>())
                    .collect::<Vec<_>>()
            };
            (with(l), with(r))
        })
    })
}

pub fn restricted_intersection_identity(cases: u32) -> Result<(), String> {
    let strategy = prop_oneof![agreeing_sets(), (context_set(), context_set())];
    check(cases, strategy, |(a, b)| {
        let (a, b) = (build(&a), build(&b));
        let shared = a.dims().intersection(&b.dims());
        let agree = a.iter().all(|x| {
            b.iter()
                .all(|y| ctxcalc::ops::projection(x, &shared) == ctxcalc::ops::projection(y, &shared))
        });
        if agree {
            prop_assert_eq!(set_intersection(&a, &b), lift_projection(&join(&a, &b), &shared));
        }
        Ok(())
    })
}

/// Test-side predicate over integer dimensions, evaluated independently of
/// the library.
#[derive(Debug, Clone)]
pub enum Term {
    Var(usize),
    Lit(i64),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

#[derive(Debug, Clone)]
pub enum Pred {
    True,
    Lt(Term, Term),
    Le(Term, Term),
    Eq(Term, Term),
    Ne(Term, Term),
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
}

impl Term {
    fn eval(&self, values: &[i64]) -> i64 {
        match self {
            Term::Var(i) => values[*i],
            Term::Lit(n) => *n,
            Term::Add(a, b) => a.eval(values) + b.eval(values),
            Term::Sub(a, b) => a.eval(values) - b.eval(values),
            Term::Mul(a, b) => a.eval(values) * b.eval(values),
        }
    }

    fn lower(&self, dims: &[&str]) -> BoolExpr {
        let arith = |op, a: &Term, b: &Term| BoolExpr::Arith(op, Box::new(a.lower(dims)), Box::new(b.lower(dims)));
        match self {
            Term::Var(i) => BoolExpr::Var(Dim::new(dims[*i])),
            Term::Lit(n) => BoolExpr::Lit(TagValue::from(*n)),
            Term::Add(a, b) => arith(ArithOp::Add, a, b),
            Term::Sub(a, b) => arith(ArithOp::Sub, a, b),
            Term::Mul(a, b) => arith(ArithOp::Mul, a, b),
        }
    }
}

impl Pred {
    fn eval(&self, values: &[i64]) -> bool {
        match self {
            Pred::True => true,
            Pred::Lt(a, b) => a.eval(values) < b.eval(values),
            Pred::Le(a, b) => a.eval(values) <= b.eval(values),
            Pred::Eq(a, b) => a.eval(values) == b.eval(values),
            Pred::Ne(a, b) => a.eval(values) != b.eval(values),
            Pred::Not(p) => !p.eval(values),
            Pred::And(p, q) => p.eval(values) && q.eval(values),
            Pred::Or(p, q) => p.eval(values) || q.eval(values),
        }
    }

    fn lower(&self, dims: &[&str]) -> BoolExpr {
        let cmp = |op, a: &Term, b: &Term| BoolExpr::Cmp(op, Box::new(a.lower(dims)), Box::new(b.lower(dims)));
        match self {
            Pred::True => BoolExpr::Const(true),
            Pred::Lt(a, b) => cmp(CmpOp::Lt, a, b),
            Pred::Le(a, b) => cmp(CmpOp::Le, a, b),
            Pred::Eq(a, b) => cmp(CmpOp::Eq, a, b),
            Pred::Ne(a, b) => cmp(CmpOp::Ne, a, b),
            Pred::Not(p) => BoolExpr::Not(Box::new(p.lower(dims))),
            Pred::And(p, q) => BoolExpr::And(Box::new(p.lower(dims)), Box::new(q.lower(dims))),
            Pred::Or(p, q) => BoolExpr::Or(Box::new(p.lower(dims)), Box::new(q.lower(dims))),
        }
    }
}

fn term(k: usize) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![(0..k).prop_map(Term::Var), (0i64..6).prop_map(Term::Lit)];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Term::Mul(Box::new(a), Box::new(b))),
        ]
    })
}

fn pred(k: usize) -> impl Strategy<Value = Pred> {
    let atom = prop_oneof![
        1 => Just(Pred::True),
        3 => (term(k), term(k)).prop_map(|(a, b)| Pred::Lt(a, b)),
        2 => (term(k), term(k)).prop_map(|(a, b)| Pred::Le(a, b)),
        2 => (term(k), term(k)).prop_map(|(a, b)| Pred::Eq(a, b)),
        1 => (term(k), term(k)).prop_map(|(a, b)| Pred::Ne(a, b)),
    ];
    atom.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|p| Pred::Not(Box::new(p))),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Pred::And(Box::new(p), Box::new(q))),
            (inner.clone(), inner).prop_map(|(p, q)| Pred::Or(Box::new(p), Box::new(q))),
        ]
    })
}

/// `k` ≤ 3 dimensions with domains of at most four tags, and a predicate.
fn box_case() -> impl Strategy<Value = (Vec<Vec<i64>>, Pred)> {
    (1usize..=3).prop_flat_map(|k| {
        (
            prop::collection::vec(prop::collection::btree_set(0i64..6, 1..=4), k)
                .prop_map(|ds| ds.into_iter().map(|d| d.into_iter().collect()).collect()),
            pred(k),
        )
    })
}

const BOX_DIMS: [&str; 3] = ["p", "q", "r"];

pub fn box_enumerate_matches_contains(cases: u32) -> Result<(), String> {
    check(cases, box_case(), |(domains, pred)| {
        let dims = &BOX_DIMS[..domains.len()];
        let mut registry = DimensionRegistry::new();
        for (d, domain) in dims.iter().zip(&domains) {
            let tags = domain.iter().map(|&t| TagValue::from(t)).collect();
            registry.register(d, TagKind::Int, Some(tags)).unwrap();
        }
        let boxed = BoxSet::new(&registry, dims, pred.lower(dims)).unwrap();
        let members = boxed.enumerate().unwrap();

        // Brute force over the product of the declared domains.
        let mut expected = Vec::new();
        let mut index = vec![0usize; domains.len()];
        'odometer: loop {
            let values: Vec<i64> = index.iter().zip(&domains).map(|(&i, d)| d[i]).collect();
            let candidate: Context = dims
                .iter()
                .zip(&values)
                .map(|(d, &v)| MicroContext::new(*d, v))
                .collect();
            let holds = pred.eval(&values);
            prop_assert_eq!(boxed.contains(&candidate).unwrap(), holds, "{}", candidate);
            if holds {
                expected.push(candidate);
            }
            for pos in (0..index.len()).rev() {
                index[pos] += 1;
                if index[pos] < domains[pos].len() {
                    continue 'odometer;
                }
                index[pos] = 0;
            }
            break;
        }
        prop_assert_eq!(&members, &ContextSet::new(expected).unwrap());
        for m in &members {
            prop_assert!(boxed.contains(m).unwrap());
            prop_assert_eq!(m.dims(), boxed.dims());
        }

        // Contexts over other dimensions or outside the domains are never
        // members.
        let outside: Context = dims.iter().map(|d| MicroContext::new(*d, 99)).collect();
        prop_assert!(!boxed.contains(&outside).unwrap());
        let partial: Context = dims.iter().skip(1).map(|d| MicroContext::new(*d, 0)).collect();
        prop_assert!(!boxed.contains(&partial).unwrap());
        Ok(())
    })
}

/// The laws run for the context-set criterion, by name.
pub fn all() -> Vec<(&'static str, Law)> {
    vec![
        ("join, ⊓ and ⊞ commutativity", commutativity),
        ("restricted intersection identity", restricted_intersection_identity),
        ("Box enumerate ↔ contains brute force", box_enumerate_matches_contains),
    ]
}
