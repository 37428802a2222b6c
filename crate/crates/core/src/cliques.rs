// SPDX-License-Identifier: Apache-2.0

//! Maximal Δ-cliques of a contact stream.
//!
//! A Δ-clique is a node set `X` (at least two nodes) and an interval
//! `[b, e]` whose endpoints are contact timestamps of the stream, such that
//! every pair of `X` has a contact (either direction) in `[τ, τ + Δ]` for
//! every integer `τ ∈ [b, max(b, e − Δ)]`. It is maximal when no other
//! Δ-clique has a superset of its nodes and a superinterval of its interval.
//!
//! For a pair `p` let `C_p` be the set of `τ` whose window `[τ, τ + Δ]`
//! holds a contact of `p`, i.e. the union of `[t − Δ, t]` over its contacts,
//! and `C_X = ⋂ C_p` over the pairs of `X`. Then `[b, e]` is valid for `X`
//! exactly when `b` and `max(b, e − Δ)` fall in the same run `[l, r]` of
//! `C_X`, so each run yields a single widest interval: `b` is the first
//! timestamp in `[l, r]` and `e` the last timestamp in `[b, r + Δ]`.
//! The miner seeds a set from every contacting pair, grows it by node
//! addition while `C_X` keeps a timestamp, takes the widest interval of
//! every run, and finally drops dominated candidates.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ContactStream, NodeId, Timestamp};
use crate::scalar::Scalar;

pub const ORACLE_MAX_NODES: usize = 8;
pub const ORACLE_MAX_CONTACTS: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeltaClique {
    /// Sorted node ids.
    pub members: Vec<NodeId>,
    pub b: Timestamp,
    pub e: Timestamp,
    pub delta: Timestamp,
}

impl DeltaClique {
    pub fn span(&self) -> Timestamp {
        self.e - self.b
    }

    /// Members ⊆ and interval ⊆ those of `other`.
    pub fn is_within(&self, other: &DeltaClique) -> bool {
        other.b <= self.b && self.e <= other.e && is_subset(&self.members, &other.members)
    }
}

fn is_subset(small: &[NodeId], large: &[NodeId]) -> bool {
    let mut it = large.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueReport {
    pub delta: Timestamp,
    /// Sorted by size desc, span desc, members, then `b`.
    pub cliques: Vec<DeltaClique>,
}

impl CliqueReport {
    fn new(delta: Timestamp, mut cliques: Vec<DeltaClique>) -> Self {
        cliques.sort_by(|x, y| {
            y.members
                .len()
                .cmp(&x.members.len())
                .then(y.span().cmp(&x.span()))
                .then_with(|| x.members.cmp(&y.members))
                .then(x.b.cmp(&y.b))
        });
        cliques.dedup();
        Self { delta, cliques }
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }
}

/// Sorted, disjoint, non-adjacent inclusive integer intervals.
type Runs = Vec<(Timestamp, Timestamp)>;

fn merge_runs(mut runs: Runs) -> Runs {
    runs.sort_unstable();
    let mut out: Runs = Vec::with_capacity(runs.len());
    for (l, r) in runs {
        match out.last_mut() {
            Some(last) if l <= last.1.saturating_add(1) => last.1 = last.1.max(r),
            _ => out.push((l, r)),
        }
    }
    out
}

fn intersect(a: &Runs, b: &Runs) -> Runs {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        let l = a[i].0.max(b[j].0);
        let r = a[i].1.min(b[j].1);
        if l <= r {
            out.push((l, r));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    merge_runs(out)
}

struct PairIndex {
    times: Vec<Timestamp>,
    coverage: HashMap<(NodeId, NodeId), Runs>,
}

impl PairIndex {
    fn build<S: Scalar>(stream: &ContactStream<S>, delta: Timestamp) -> Self {
        let mut times: Vec<Timestamp> = stream.contacts().iter().map(|c| c.t).collect();
        times.dedup();
        let mut per_pair: BTreeMap<(NodeId, NodeId), Runs> = BTreeMap::new();
        for c in stream.contacts() {
            let key = (c.src.min(c.dst), c.src.max(c.dst));
            per_pair.entry(key).or_default().push((c.t.saturating_sub(delta), c.t));
        }
        let coverage = per_pair.into_iter().map(|(k, v)| (k, merge_runs(v))).collect();
        Self { times, coverage }
    }

    fn pair(&self, u: NodeId, v: NodeId) -> Option<&Runs> {
        self.coverage.get(&(u.min(v), u.max(v)))
    }

    fn has_time_in(&self, runs: &Runs) -> bool {
        runs.iter().any(|&(l, r)| {
            let k = self.times.partition_point(|&t| t < l);
            k < self.times.len() && self.times[k] <= r
        })
    }

    /// Widest valid interval inside each run.
    fn intervals(&self, runs: &Runs, delta: Timestamp) -> Vec<(Timestamp, Timestamp)> {
        runs.iter()
            .filter_map(|&(l, r)| {
                let k = self.times.partition_point(|&t| t < l);
                let b = *self.times.get(k).filter(|&&t| t <= r)?;
                let limit = r.saturating_add(delta);
                let e = self.times[self.times.partition_point(|&t| t <= limit) - 1];
                Some((b, e))
            })
            .collect()
    }
}

/// Enumerates the maximal Δ-cliques of the undirected projection of `stream`.
///
/// `max_nodes` caps the member-set size; with a cap, results are maximal among
/// sets of at most that many nodes. `None` gives the exact answer.
pub fn delta_cliques<S: Scalar>(
    stream: &ContactStream<S>,
    delta: Timestamp,
    max_nodes: Option<usize>,
) -> Result<CliqueReport> {
    if delta == 0 {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let cap = max_nodes.unwrap_or(usize::MAX);
    if cap < 2 {
        return Err(Error::InvalidArgument("max_nodes must be at least 2".into()));
    }
    let index = PairIndex::build(stream, delta);
    let mut neighbors: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    for &(u, v) in index.coverage.keys() {
        neighbors.entry(u).or_default().insert(v);
        neighbors.entry(v).or_default().insert(u);
    }

    // Every node set with a non-empty admissible coverage, with its runs.
    let mut sets: HashMap<Vec<NodeId>, Runs> = HashMap::new();
    let mut stack: Vec<(Vec<NodeId>, Runs)> = Vec::new();
    let mut seeds: Vec<&(NodeId, NodeId)> = index.coverage.keys().collect();
    seeds.sort_unstable();
    for &(u, v) in seeds {
        let runs = index.coverage[&(u, v)].clone();
        if index.has_time_in(&runs) {
            stack.push((vec![u, v], runs));
        }
    }
    while let Some((members, runs)) = stack.pop() {
        if members.len() < cap {
            let last = *members.last().expect("non-empty");
            let first_nbrs = &neighbors[&members[0]];
            for &w in first_nbrs.range(last + 1..) {
                let mut grown = runs.clone();
                for &x in &members {
                    match index.pair(x, w) {
                        Some(p) => grown = intersect(&grown, p),
                        None => {
                            grown.clear();
                            break;
                        }
                    }
                    if grown.is_empty() {
                        break;
                    }
                }
                if !grown.is_empty() && index.has_time_in(&grown) {
                    let mut next = members.clone();
                    next.push(w);
                    stack.push((next, grown));
                }
            }
        }
        sets.insert(members, runs);
    }

    let intervals: HashMap<&Vec<NodeId>, Vec<(Timestamp, Timestamp)>> =
        sets.iter().map(|(k, runs)| (k, index.intervals(runs, delta))).collect();
    let all_nodes: Vec<NodeId> = neighbors.keys().copied().collect();
    let contains = |outer: &(Timestamp, Timestamp), inner: &(Timestamp, Timestamp)| outer.0 <= inner.0 && inner.1 <= outer.1;

    let mut maximal = Vec::new();
    for (members, own) in &intervals {
        'candidate: for (k, iv) in own.iter().enumerate() {
            if own.iter().enumerate().any(|(j, other)| j != k && contains(other, iv)) {
                continue;
            }
            for &w in &all_nodes {
                if members.binary_search(&w).is_ok() {
                    continue;
                }
                let mut grown = (*members).clone();
                grown.insert(grown.partition_point(|&x| x < w), w);
                if let Some(ivs) = intervals.get(&grown) {
                    if ivs.iter().any(|outer| contains(outer, iv)) {
                        continue 'candidate;
                    }
                }
            }
            maximal.push(DeltaClique { members: (*members).clone(), b: iv.0, e: iv.1, delta });
        }
    }
    Ok(CliqueReport::new(delta, maximal))
}

/// Exhaustive reference: every node subset × every timestamp interval,
/// checking the window condition at each integer `τ`.
pub fn clique_oracle<S: Scalar>(stream: &ContactStream<S>, delta: Timestamp) -> Result<CliqueReport> {
    let n = stream.node_count();
    if n > ORACLE_MAX_NODES || stream.len() > ORACLE_MAX_CONTACTS {
        return Err(Error::TooLarge(format!(
            "oracle accepts at most {ORACLE_MAX_NODES} nodes and {ORACLE_MAX_CONTACTS} contacts"
        )));
    }
    if delta == 0 {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let mut pair_times = vec![Vec::new(); n * n];
    for c in stream.contacts() {
        pair_times[c.src * n + c.dst].push(c.t);
        pair_times[c.dst * n + c.src].push(c.t);
    }
    for times in &mut pair_times {
        times.sort_unstable();
    }
    let mut times: Vec<Timestamp> = stream.contacts().iter().map(|c| c.t).collect();
    times.dedup();

    let contact_in = |u: usize, v: usize, lo: Timestamp, hi: Timestamp| {
        let ts = &pair_times[u * n + v];
        let k = ts.partition_point(|&t| t < lo);
        k < ts.len() && ts[k] <= hi
    };

    let mut valid: Vec<(u32, Timestamp, Timestamp)> = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let pairs: Vec<(usize, usize)> = members
            .iter()
            .enumerate()
            .flat_map(|(k, &u)| members[k + 1..].iter().map(move |&v| (u, v)))
            .collect();
        if pairs.iter().any(|&(u, v)| pair_times[u * n + v].is_empty()) {
            continue;
        }
        for (k, &b) in times.iter().enumerate() {
            for &e in &times[k..] {
                let last_tau = if e >= b + delta { e - delta } else { b };
                let ok = pairs
                    .iter()
                    .all(|&(u, v)| (b..=last_tau).all(|tau| contact_in(u, v, tau, tau + delta)));
                if ok {
                    valid.push((mask, b, e));
                }
            }
        }
    }

    let cliques = valid
        .iter()
        .filter(|&&(m, b, e)| {
            !valid
                .iter()
                .any(|&(m2, b2, e2)| (m2, b2, e2) != (m, b, e) && m & m2 == m && b2 <= b && e <= e2)
        })
        .map(|&(m, b, e)| DeltaClique {
            members: (0..n).filter(|&i| m & (1 << i) != 0).collect(),
            b,
            e,
            delta,
        })
        .collect();
    Ok(CliqueReport::new(delta, cliques))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Contact, NodeRegistry};

    fn stream(n: usize, contacts: &[(usize, usize, u64)]) -> ContactStream {
        ContactStream::new(
            NodeRegistry::from_names((0..n).map(|i| format!("n{i}"))).unwrap(),
            contacts.iter().map(|&(s, d, t)| Contact::new(s, d, t)).collect(),
        )
        .unwrap()
    }

    fn clique(members: &[usize], b: u64, e: u64, delta: u64) -> DeltaClique {
        DeltaClique { members: members.to_vec(), b, e, delta }
    }

    #[test]
    fn single_contact_is_maximal() {
        let s = stream(2, &[(0, 1, 5)]);
        let r = delta_cliques(&s, 3, None).unwrap();
        assert_eq!(r.cliques, [clique(&[0, 1], 5, 5, 3)]);
        assert_eq!(clique_oracle(&s, 3).unwrap(), r);
    }

    #[test]
    fn repeated_pair_contacts() {
        let s = stream(2, &[(0, 1, 0), (1, 0, 2), (0, 1, 4)]);
        let r = delta_cliques(&s, 2, None).unwrap();
        assert_eq!(r.cliques, [clique(&[0, 1], 0, 4, 2)]);
        assert_eq!(clique_oracle(&s, 2).unwrap(), r);
    }

    #[test]
    fn triangle() {
        let contacts: Vec<_> = [0, 3, 6]
            .iter()
            .flat_map(|&t| [(0, 1, t), (1, 2, t), (2, 0, t)])
            .collect();
        let s = stream(3, &contacts);
        let r = delta_cliques(&s, 3, None).unwrap();
        assert_eq!(r.cliques, [clique(&[0, 1, 2], 0, 6, 3)]);
        assert_eq!(clique_oracle(&s, 3).unwrap(), r);
    }

    #[test]
    fn gap_splits_interval() {
        let s = stream(2, &[(0, 1, 0), (0, 1, 10)]);
        let r = delta_cliques(&s, 2, None).unwrap();
        assert_eq!(r.cliques, [clique(&[0, 1], 0, 0, 2), clique(&[0, 1], 10, 10, 2)]);
        assert_eq!(clique_oracle(&s, 2).unwrap(), r);
    }

    #[test]
    fn empty_and_invalid() {
        let s = stream(3, &[]);
        assert!(delta_cliques(&s, 1, None).unwrap().is_empty());
        assert!(clique_oracle(&s, 1).unwrap().is_empty());
        assert!(delta_cliques(&s, 0, None).is_err());
        assert!(matches!(clique_oracle(&stream(9, &[]), 1), Err(Error::TooLarge(_))));
    }

    #[test]
    fn size_cap_limits_members() {
        let contacts: Vec<_> = [(0, 1), (0, 2), (1, 2)].iter().map(|&(u, v)| (u, v, 1)).collect();
        let s = stream(3, &contacts);
        let capped = delta_cliques(&s, 1, Some(2)).unwrap();
        assert_eq!(capped.len(), 3);
        assert!(capped.cliques.iter().all(|c| c.members.len() == 2));
    }

    #[test]
    fn report_order() {
        let r = CliqueReport::new(1, vec![clique(&[0, 1], 0, 1, 1), clique(&[0, 1, 2], 0, 0, 1), clique(&[0, 2], 0, 5, 1)]);
        assert_eq!(r.cliques[0].members, [0, 1, 2]);
        assert_eq!(r.cliques[1].members, [0, 2]);
    }

    #[test]
    fn runs_merge_adjacent() {
        assert_eq!(merge_runs(vec![(3, 5), (0, 2), (7, 8)]), [(0, 5), (7, 8)]);
        assert_eq!(intersect(&vec![(0, 10)], &vec![(2, 3), (5, 12)]), [(2, 3), (5, 10)]);
    }
}
