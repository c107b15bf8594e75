//! Property suites and brute-force oracles shared by the property tests and
//! the acceptance harness. Every check takes a case count and returns the
//! first counterexample as an error.

#![allow(dead_code)]

pub mod context_laws;
pub mod set_laws;
pub mod stream_laws;

use std::fmt::Debug;

use ctxcalc::{Context, MicroContext};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

/// Runs `test` on `cases` values drawn from `strategy` with a fixed RNG, so
/// every run sees the same cases.
pub fn check<S>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S: Strategy,
    S::Value: Debug,
{
    let config = Config {
        cases,
        failure_persistence: None,
        max_global_rejects: cases * 64,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

/// A named law: runs the given number of cases, returns the first
/// counterexample.
pub type Law = fn(u32) -> Result<(), String>;

/// A context as plain (dimension, tag) pairs; the form oracles work on.
pub type Pairs = Vec<(String, i64)>;

pub const DIMS: [&str; 4] = ["d", "e", "f", "g"];

pub fn to_context(pairs: &[(String, i64)]) -> Context {
    pairs.iter().map(|(d, t)| MicroContext::new(d.as_str(), *t)).collect()
}

/// Up to four dimensions, each bound to one or two tags in 0..=5.
pub fn any_pairs() -> impl Strategy<Value = Pairs> {
    prop::sample::subsequence(DIMS.to_vec(), 0..=DIMS.len()).prop_flat_map(|dims| {
        dims.into_iter()
            .map(|d| prop::collection::btree_set(0i64..=5, 1..=2).prop_map(move |tags| (d, tags)))
            .collect::<Vec<_>>()
            .prop_map(|bound| {
                bound
                    .into_iter()
                    .flat_map(|(d, tags)| tags.into_iter().map(move |t| (d.to_string(), t)))
                    .collect()
            })
    })
}

/// Up to four dimensions, each bound once to a tag in 0..=5.
pub fn simple_pairs() -> impl Strategy<Value = Pairs> {
    simple_pairs_over(&DIMS)
}

pub fn simple_pairs_over(dims: &[&'static str]) -> impl Strategy<Value = Pairs> {
    prop::sample::subsequence(dims.to_vec(), 0..=dims.len()).prop_flat_map(|dims| {
        let n = dims.len();
        prop::collection::vec(0i64..=5, n).prop_map(move |tags| dims.iter().map(|d| d.to_string()).zip(tags).collect())
    })
}

pub fn dim_subset() -> impl Strategy<Value = Vec<&'static str>> {
    prop::sample::subsequence(DIMS.to_vec(), 0..=DIMS.len())
}
