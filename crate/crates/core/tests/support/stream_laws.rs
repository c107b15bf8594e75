use ctxcalc::stream::{
    define_streams, eval_prefix, BinOp, EquationSet, EvaluationContext, Evaluator, StreamError, StreamExpr,
    StreamValue, Warehouse, DEFAULT_BUDGET, TIME,
};
use ctxcalc::Dim;
use proptest::prelude::*;

use super::{check, Law};

use StreamValue::{Bool, Int, Nil};

/// Prefix length queried in every law; longer than any generated list, so
/// the nil tail is exercised.
const PREFIX: u64 = 14;

/// Demand cost of one asa position is pinned to this many evaluation steps
/// per unit of `first true position + prefix length`.
pub const ASA_STEPS_PER_POSITION: u64 = 16;

/// Per-query budget for identity checks; generated expressions either
/// finish well within it or diverge.
const IDENTITY_BUDGET: u64 = 20_000;

fn int_list() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-50i64..50, 0..=12)
}

fn bool_list() -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), 0..=12)
}

fn equations(a: &[i64], b: &[bool]) -> EquationSet {
    define_streams(vec![
        ("A".to_string(), StreamExpr::list(a.iter().copied())),
        ("B".to_string(), StreamExpr::list(b.iter().copied())),
    ])
    .unwrap()
}

fn prefix(eqs: &EquationSet, expr: &StreamExpr, wh: &Warehouse) -> Result<Vec<StreamValue>, StreamError> {
    eval_prefix(expr, &Dim::new(TIME), PREFIX, eqs, wh, DEFAULT_BUDGET)
}

fn at(list: &[i64], i: usize) -> StreamValue {
    list.get(i).map_or(Nil, |&n| Int(n))
}

fn a() -> StreamExpr {
    StreamExpr::name("A")
}

fn b() -> StreamExpr {
    StreamExpr::name("B")
}

type Oracle<'a> = Box<dyn Fn(usize) -> StreamValue + 'a>;

/// Index-arithmetic oracles for the temporal operators over finite lists.
pub fn operator_oracles(cases: u32) -> Result<(), String> {
    check(cases, (int_list(), bool_list()), |(xs, bs)| {
        let eqs = equations(&xs, &bs);
        let wh = Warehouse::new();
        let trues: Vec<usize> = (0..bs.len()).filter(|&i| bs[i]).collect();
        let rows: Vec<(&str, StreamExpr, Oracle)> = vec![
            ("first", StreamExpr::first(a()), Box::new(|_| at(&xs, 0))),
            ("next", StreamExpr::next(a()), Box::new(|t| at(&xs, t + 1))),
            (
                "prev",
                StreamExpr::prev(a()),
                Box::new(|t| if t == 0 { Nil } else { at(&xs, t - 1) }),
            ),
            (
                "fby",
                StreamExpr::fby(a(), StreamExpr::next(a())),
                Box::new(|t| if t == 0 { at(&xs, 0) } else { at(&xs, t) }),
            ),
            (
                "wvr",
                StreamExpr::wvr(a(), b()),
                Box::new(|t| trues.get(t).map_or(Nil, |&p| at(&xs, p))),
            ),
            (
                "asa",
                StreamExpr::asa(a(), b()),
                Box::new(|_| trues.first().map_or(Nil, |&p| at(&xs, p))),
            ),
            (
                "upon",
                StreamExpr::upon(a(), b()),
                Box::new(|t| match t {
                    0 => at(&xs, 0),
                    t if t > bs.len() => Nil,
                    t => at(&xs, bs[..t].iter().filter(|&&x| x).count()),
                }),
            ),
        ];
        for (name, expr, oracle) in rows {
            let got = prefix(&eqs, &expr, &wh).map_err(|e| TestCaseError::fail(format!("{name}: {e}")))?;
            let want: Vec<StreamValue> = (0..PREFIX as usize).map(&oracle).collect();
            prop_assert_eq!(got, want, "{}", name);
        }
        Ok(())
    })
}

/// Small expressions over `A` (integers) and `B` (booleans). Ill-typed
/// combinations are allowed; both evaluators must then fail alike.
fn stream_expr() -> impl Strategy<Value = StreamExpr> {
    let leaf = prop_oneof![Just(a()), Just(b()), (-3i64..4).prop_map(StreamExpr::int)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(StreamExpr::first),
            inner.clone().prop_map(StreamExpr::next),
            inner.clone().prop_map(StreamExpr::prev),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| StreamExpr::fby(x, y)),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| StreamExpr::wvr(x, y)),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| StreamExpr::asa(x, y)),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| StreamExpr::upon(x, y)),
            (inner.clone(), inner).prop_map(|(x, y)| StreamExpr::binary(BinOp::Add, x, y)),
        ]
    })
}

/// Equal values, or the same error, at every position from `from` on.
fn same(eqs: &EquationSet, left: &StreamExpr, right: &StreamExpr, from: u64) -> Result<(), TestCaseError> {
    let wh = Warehouse::new();
    let mut ev = Evaluator::new(eqs, &wh, IDENTITY_BUDGET);
    for t in from..PREFIX {
        let ctx = EvaluationContext::at(TIME, t);
        let (l, r) = (ev.query(left, &ctx), ev.query(right, &ctx));
        prop_assert_eq!(l, r, "{} vs {} at {}", left, right, t);
    }
    Ok(())
}

pub fn navigation_axioms(cases: u32) -> Result<(), String> {
    check(
        cases,
        (int_list(), bool_list(), stream_expr(), 0i64..20),
        |(xs, bs, x, k)| {
            let eqs = equations(&xs, &bs);
            let hash = StreamExpr::query(TIME);
            same(&eqs, &StreamExpr::at(TIME, x.clone(), hash.clone()), &x, 0)?;
            same(
                &eqs,
                &StreamExpr::at(TIME, hash, StreamExpr::int(k)),
                &StreamExpr::int(k),
                0,
            )
        },
    )
}

pub fn index_identities(cases: u32) -> Result<(), String> {
    check(
        cases,
        (int_list(), bool_list(), stream_expr(), stream_expr()),
        |(xs, bs, x, y)| {
            let eqs = equations(&xs, &bs);
            same(&eqs, &StreamExpr::next(StreamExpr::fby(x.clone(), y.clone())), &y, 0)?;
            same(&eqs, &StreamExpr::prev(StreamExpr::next(x.clone())), &x, 1)?;
            same(
                &eqs,
                &StreamExpr::first(x.clone()),
                &StreamExpr::at(TIME, x, StreamExpr::int(0)),
                0,
            )
        },
    )
}

pub fn warehouse_transparency(cases: u32) -> Result<(), String> {
    check(cases, (int_list(), bool_list(), stream_expr()), |(xs, bs, x)| {
        let eqs = equations(&xs, &bs);
        let memo = prefix(&eqs, &x, &Warehouse::new());
        let plain = prefix(&eqs, &x, &Warehouse::disabled());
        prop_assert_eq!(memo, plain, "{}", x);
        Ok(())
    })
}

/// An asa prefix of length `n` whose guard first holds at `p` costs
/// O(p + n) demands with the warehouse.
pub fn asa_demand_is_linear(cases: u32) -> Result<(), String> {
    check(cases, (0usize..300, 1u64..300), |(p, n)| {
        let guard: Vec<bool> = (0..=p).map(|i| i == p).collect();
        let values: Vec<i64> = (0..=p as i64).collect();
        let eqs = equations(&values, &guard);
        let wh = Warehouse::new();
        let expr = StreamExpr::asa(a(), b());
        let mut ev = Evaluator::new(&eqs, &wh, DEFAULT_BUDGET);
        for t in 0..n {
            let v = ev
                .query(&expr, &EvaluationContext::at(TIME, t))
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(v, Int(p as i64));
        }
        let bound = ASA_STEPS_PER_POSITION * (p as u64 + n);
        prop_assert!(
            ev.demands() <= bound,
            "{} demands for p={} n={}, bound {}",
            ev.demands(),
            p,
            n,
            bound
        );
        Ok(())
    })
}

/// A wvr whose guard never holds exhausts the budget instead of looping.
pub fn divergence_is_bounded(cases: u32) -> Result<(), String> {
    let eqs = define_streams(vec![
        ("F".to_string(), StreamExpr::Const(Bool(false))),
        ("A".to_string(), StreamExpr::int(1)),
    ])
    .unwrap();
    check(cases, (1u64..5_000, 0u64..5), move |(budget, t)| {
        let wh = Warehouse::new();
        let mut ev = Evaluator::new(&eqs, &wh, budget);
        let expr = StreamExpr::wvr(a(), StreamExpr::name("F"));
        prop_assert_eq!(
            ev.query(&expr, &EvaluationContext::at(TIME, t)),
            Err(StreamError::DemandExhausted { budget })
        );
        prop_assert!(ev.demands() <= budget);
        Ok(())
    })
}

/// The laws run for the stream criterion, by name.
pub fn all() -> Vec<(&'static str, Law)> {
    vec![
        ("temporal operators vs index oracles", operator_oracles),
        ("navigation axioms", navigation_axioms),
        ("next/fby, prev/next, first/@ identities", index_identities),
        ("warehouse does not change values", warehouse_transparency),
        ("asa demand linear in p + n", asa_demand_is_linear),
        ("non-terminating wvr exhausts the budget", divergence_is_bounded),
    ]
}
