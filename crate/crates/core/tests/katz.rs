// SPDX-License-Identifier: Apache-2.0

mod common;

use msnet::centrality::{katz_fold, katz_oracle, katz_query, KatzState};
use msnet::{Contact, ContactStream, Error};
use proptest::prelude::*;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

fn stream(n: usize, raw: &[(usize, usize, u64, f64)]) -> ContactStream {
    let contacts = raw.iter().map(|&(s, d, t, w)| Contact::weighted(s, d, t, w)).collect();
    ContactStream::new(common::registry(n), contacts).unwrap()
}

fn arb_case() -> impl Strategy<Value = (usize, Vec<(usize, usize, u64, f64)>, f64, f64, u64)> {
    (2usize..=6).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec((0..n, 0..n, 0u64..10, Just(1.0)), 0..=12),
            prop::sample::select(vec![0.25, 0.5, 1.0]),
            prop::sample::select(vec![0.0, 0.1]),
            0u64..5,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn streaming_matches_walk_enumeration((n, raw, beta, c, extra) in arb_case()) {
        let s = stream(n, &raw);
        let at = s.last_time().unwrap_or(0) + extra;
        let state = katz_fold(&s, beta, c).unwrap();
        let want = katz_oracle(&s, beta, c, at).unwrap();
        for (v, &w) in want.iter().enumerate() {
            let got = katz_query(&state, v, at).unwrap();
            prop_assert!(rel_close(got, w, 1e-9), "node {v}: {got} vs {w}");
        }
    }
}

proptest! {
    #[test]
    fn weighted_streams_match(n in 2usize..5, raw in prop::collection::vec((0usize..4, 0usize..4, 0u64..6, 1u32..4), 0..10)) {
        let raw: Vec<_> = raw.into_iter().map(|(s, d, t, w)| (s % n, d % n, t, w as f64 * 0.5)).collect();
        let s = stream(n, &raw);
        let at = s.last_time().unwrap_or(0);
        let state = katz_fold(&s, 0.3, 0.05).unwrap();
        let want = katz_oracle(&s, 0.3, 0.05, at).unwrap();
        for (v, &w) in want.iter().enumerate() {
            prop_assert!(rel_close(state.query(v, at).unwrap(), w, 1e-9));
        }
    }

    #[test]
    fn scores_nonnegative(raw in prop::collection::vec((0usize..5, 0usize..5, 0u64..20, Just(1.0)), 0..30)) {
        let s = stream(5, &raw);
        let at = s.last_time().unwrap_or(0);
        let state = katz_fold(&s, 0.5, 0.2).unwrap();
        prop_assert!(state.scores_at(at).unwrap().iter().all(|&x| x >= 0.0));
    }
}

#[test]
fn decayed_pair_frozen() {
    // oracle: walks (v,w) at t=1 and (u,v,w) starting at t=0
    let s = stream(3, &[(0, 1, 0, 1.0), (1, 2, 1, 1.0)]);
    let beta = 0.5;
    let c = std::f64::consts::LN_2;
    let oracle = katz_oracle(&s, beta, c, 1).unwrap();
    assert!(rel_close(oracle[2], 0.625, 1e-12));
    let state = katz_fold(&s, beta, c).unwrap();
    assert!(rel_close(state.query(2, 1).unwrap(), 0.625, 1e-12));
    assert!(rel_close(state.query(2, 3).unwrap(), 0.625 * 0.25, 1e-12));
}

#[test]
fn oracle_and_stream_reject_past_queries() {
    let s = stream(2, &[(0, 1, 5, 1.0)]);
    let state = katz_fold(&s, 0.5, 0.0).unwrap();
    assert!(matches!(state.query(1, 4), Err(Error::Monotonicity { .. })));
    assert!(katz_oracle(&s, 0.5, 0.0, 4).is_err());
    let mut state = KatzState::<f64>::new(2, 0.5, 0.0).unwrap();
    state.update(&Contact::new(0, 1, 5)).unwrap();
    assert!(state.update(&Contact::new(1, 0, 4)).is_err());
}

#[test]
fn oracle_refuses_long_streams() {
    let raw: Vec<_> = (0..20).map(|t| (0, 1, t, 1.0)).collect();
    assert!(matches!(katz_oracle(&stream(2, &raw), 0.5, 0.0, 20), Err(Error::TooLarge(_))));
}
