// SPDX-License-Identifier: Apache-2.0
#![allow(dead_code)]

use std::collections::BTreeSet;

use msnet::ingest::{synth_evolution, PlantedEvent, SynthConfig, VersionRange};
use msnet::{NodeRegistry, Snapshot, SnapshotSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn registry(n: usize) -> NodeRegistry {
    NodeRegistry::from_names((0..n).map(|i| format!("n{i}"))).unwrap()
}

pub fn sequence(n: usize, layers: &[Vec<(usize, usize, f64)>]) -> SnapshotSequence {
    let layers = layers
        .iter()
        .enumerate()
        .map(|(t, edges)| {
            let mut s = Snapshot::zeros(n, t.to_string());
            for &(i, j, w) in edges {
                s.add(i, j, w);
            }
            s
        })
        .collect();
    SnapshotSequence::new(registry(n), layers).unwrap()
}

/// Random connected undirected-union edge list: a random spanning tree plus extras.
pub fn random_connected_edges(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        let w = rng.gen_range(1..=3) as f64;
        if rng.gen_bool(0.5) {
            edges.push((u, v, w));
        } else {
            edges.push((v, u, w));
        }
    }
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            edges.push((u, v, rng.gen_range(1..=3) as f64));
        }
    }
    edges
}

pub fn jaccard(a: &[usize], b: &[usize]) -> f64 {
    let a: BTreeSet<_> = a.iter().collect();
    let b: BTreeSet<_> = b.iter().collect();
    let union = a.union(&b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(&b).count() as f64 / union as f64
}

/// Mean Jaccard under the best matching of found sets to planted sets.
pub fn best_matching_jaccard(found: &[Vec<usize>], planted: &[Vec<usize>]) -> f64 {
    fn go(found: &[Vec<usize>], planted: &[Vec<usize>], used: &mut Vec<bool>, k: usize) -> f64 {
        if k == planted.len() {
            return 0.0;
        }
        let mut best = f64::NEG_INFINITY;
        for f in 0..found.len() {
            if !used[f] {
                used[f] = true;
                best = best.max(jaccard(&found[f], &planted[k]) + go(found, planted, used, k + 1));
                used[f] = false;
            }
        }
        if best == f64::NEG_INFINITY {
            0.0
        } else {
            best
        }
    }
    go(found, planted, &mut vec![false; found.len()], 0) / planted.len() as f64
}

pub fn rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n < 2 {
        return 1.0;
    }
    let mut agree = 0usize;
    let mut total = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            total += 1;
            if (a[i] == a[j]) == (b[i] == b[j]) {
                agree += 1;
            }
        }
    }
    agree as f64 / total as f64
}

/// 42 services, 7 versions, hub planted on versions 3..7.
pub fn hub_fixture(seed: u64) -> (SnapshotSequence, usize) {
    let cfg = SynthConfig::new(42, 7, 0.08, seed).with_event(PlantedEvent::Hub {
        versions: VersionRange::new(3, 7),
        node: None,
    });
    let (seq, truth) = synth_evolution(&cfg).unwrap();
    (seq, truth.hubs[3][0])
}

/// Dense and sparse regimes alternating over 8 layers, odd layers sparse.
pub fn alternating_fixture(seed: u64) -> (SnapshotSequence, Vec<usize>) {
    let mut cfg = SynthConfig::new(30, 8, 0.5, seed);
    cfg.persistence = 1.0;
    for t in (1..8).step_by(2) {
        cfg = cfg.with_event(PlantedEvent::StateSwitch { versions: VersionRange::new(t, t + 1), edge_prob: 0.05 });
    }
    let (seq, truth) = synth_evolution(&cfg).unwrap();
    (seq, truth.states.iter().map(|&s| s as usize).collect())
}

/// Two disjoint 5-node cliques over 8 layers: A on layers 0–3, B on 4–7.
pub fn two_clique_fixture(seed: u64, noise: f64) -> (SnapshotSequence, Vec<Vec<usize>>) {
    let a: Vec<usize> = (0..5).collect();
    let b: Vec<usize> = (5..10).collect();
    let cfg = SynthConfig::new(16, 8, noise, seed)
        .with_event(PlantedEvent::Clique { versions: VersionRange::new(0, 4), size: 5, nodes: Some(a.clone()) })
        .with_event(PlantedEvent::Clique { versions: VersionRange::new(4, 8), size: 5, nodes: Some(b.clone()) });
    let (seq, _) = synth_evolution(&cfg).unwrap();
    (seq, vec![a, b])
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
