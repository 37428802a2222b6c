// SPDX-License-Identifier: Apache-2.0

//! Seeded generator of evolving service graphs with known planted structure.
//!
//! The base graph of every version is a directed Erdős–Rényi draw coupled
//! across versions: each ordered pair carries a latent uniform that is kept
//! from one version to the next with probability `persistence` and redrawn
//! otherwise, and the edge exists iff the latent is below the version's edge
//! probability. Planted events are applied on top, in listed order.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Contact, ContactStream, NodeId, NodeRegistry, Snapshot, SnapshotSequence};
use crate::scalar::Scalar;

pub const DEFAULT_PERSISTENCE: f64 = 0.9;

fn default_persistence() -> f64 {
    DEFAULT_PERSISTENCE
}

/// Half-open version interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionRange {
    pub start: usize,
    pub end: usize,
}

impl VersionRange {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.start <= v && v < self.end
    }

    pub fn iter(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlantedEvent {
    /// `node` (random if absent) becomes the callee of at least half of all services.
    Hub {
        versions: VersionRange,
        #[serde(default)]
        node: Option<NodeId>,
    },
    /// All ordered pairs among `size` services (or the given `nodes`) call each other.
    Clique {
        versions: VersionRange,
        size: usize,
        #[serde(default)]
        nodes: Option<Vec<NodeId>>,
    },
    /// `node` is split: each of its callers moves to `partner` with probability 1/2,
    /// and `node` starts calling `partner`.
    Split {
        versions: VersionRange,
        #[serde(default)]
        node: Option<NodeId>,
        #[serde(default)]
        partner: Option<NodeId>,
    },
    /// The base edge probability is replaced by `edge_prob` in these versions.
    StateSwitch { versions: VersionRange, edge_prob: f64 },
}

impl PlantedEvent {
    pub fn versions(&self) -> VersionRange {
        match self {
            PlantedEvent::Hub { versions, .. }
            | PlantedEvent::Clique { versions, .. }
            | PlantedEvent::Split { versions, .. }
            | PlantedEvent::StateSwitch { versions, .. } => *versions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_services: usize,
    pub n_versions: usize,
    pub base_edge_prob: f64,
    #[serde(default)]
    pub planted_events: Vec<PlantedEvent>,
    pub seed: u64,
    /// Probability that a pair's latent draw carries over to the next version.
    #[serde(default = "default_persistence")]
    pub persistence: f64,
}

impl SynthConfig {
    pub fn new(n_services: usize, n_versions: usize, base_edge_prob: f64, seed: u64) -> Self {
        Self {
            n_services,
            n_versions,
            base_edge_prob,
            planted_events: Vec::new(),
            seed,
            persistence: DEFAULT_PERSISTENCE,
        }
    }

    pub fn with_event(mut self, event: PlantedEvent) -> Self {
        self.planted_events.push(event);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_services;
        let bad = |m: String| Err(Error::Validation(m));
        if n == 0 || self.n_versions == 0 {
            return bad("n_services and n_versions must be positive".into());
        }
        let prob_ok = |p: f64| (0.0..=1.0).contains(&p);
        if !prob_ok(self.base_edge_prob) || !prob_ok(self.persistence) {
            return bad("probabilities must lie in [0, 1]".into());
        }
        for (k, ev) in self.planted_events.iter().enumerate() {
            let r = ev.versions();
            if r.start >= r.end || r.end > self.n_versions {
                return bad(format!(
                    "event {k}: version range [{}, {}) outside [0, {})",
                    r.start, r.end, self.n_versions
                ));
            }
            let node_ok = |v: &Option<NodeId>| v.is_none_or(|v| v < n);
            match ev {
                PlantedEvent::Hub { node, .. } => {
                    if n < 2 || !node_ok(node) {
                        return bad(format!("event {k}: hub needs N ≥ 2 and a valid node"));
                    }
                }
                PlantedEvent::Clique { size, nodes, .. } => {
                    if *size < 2 || *size > n {
                        return bad(format!("event {k}: clique of size {size} impossible with N={n}"));
                    }
                    if let Some(nodes) = nodes {
                        let mut sorted = nodes.clone();
                        sorted.sort_unstable();
                        sorted.dedup();
                        if sorted.len() != *size || nodes.iter().any(|&v| v >= n) {
                            return bad(format!("event {k}: clique nodes must be {size} distinct ids < {n}"));
                        }
                    }
                }
                PlantedEvent::Split { node, partner, .. } => {
                    if n < 2 || !node_ok(node) || !node_ok(partner) || (node.is_some() && node == partner) {
                        return bad(format!("event {k}: split needs two distinct valid nodes"));
                    }
                }
                PlantedEvent::StateSwitch { edge_prob, .. } => {
                    if !prob_ok(*edge_prob) {
                        return bad(format!("event {k}: edge_prob must lie in [0, 1]"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedClique {
    pub members: Vec<NodeId>,
    pub versions: VersionRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedSplit {
    pub node: NodeId,
    pub partner: NodeId,
    pub versions: VersionRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Planted hub ids, per version.
    pub hubs: Vec<Vec<NodeId>>,
    pub cliques: Vec<PlantedClique>,
    pub splits: Vec<PlantedSplit>,
    /// Regime label per version: 0 for the base probability, then one label per
    /// distinct switched probability in order of first appearance.
    pub states: Vec<u32>,
}

enum Resolved {
    Hub { hub: NodeId, sources: Vec<NodeId>, versions: VersionRange },
    Clique { members: Vec<NodeId>, versions: VersionRange },
    Split { node: NodeId, partner: NodeId, versions: VersionRange },
    State { prob: f64, label: u32, versions: VersionRange },
}

fn service_names(n: usize) -> Vec<String> {
    let width = (n.max(2) - 1).to_string().len();
    (0..n).map(|i| format!("svc{i:0width$}")).collect()
}

fn pick_other(rng: &mut ChaCha8Rng, n: usize, not: NodeId) -> NodeId {
    let k = rng.gen_range(0..n - 1);
    if k >= not {
        k + 1
    } else {
        k
    }
}

pub fn synth_evolution<S: Scalar>(cfg: &SynthConfig) -> Result<(SnapshotSequence<S>, GroundTruth)> {
    cfg.validate()?;
    let n = cfg.n_services;
    let versions = cfg.n_versions;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut switched_probs: Vec<f64> = Vec::new();
    let mut resolved = Vec::with_capacity(cfg.planted_events.len());
    for ev in &cfg.planted_events {
        resolved.push(match ev {
            PlantedEvent::Hub { versions, node } => {
                let hub = node.unwrap_or_else(|| rng.gen_range(0..n));
                let others: Vec<NodeId> = (0..n).filter(|&v| v != hub).collect();
                let mut sources: Vec<NodeId> = sample(&mut rng, others.len(), n.div_ceil(2))
                    .into_iter()
                    .map(|k| others[k])
                    .collect();
                sources.sort_unstable();
                Resolved::Hub { hub, sources, versions: *versions }
            }
            PlantedEvent::Clique { versions, size, nodes } => {
                let mut members = match nodes {
                    Some(nodes) => nodes.clone(),
                    None => sample(&mut rng, n, *size).into_vec(),
                };
                members.sort_unstable();
                Resolved::Clique { members, versions: *versions }
            }
            PlantedEvent::Split { versions, node, partner } => {
                let node = node.unwrap_or_else(|| match partner {
                    Some(p) => pick_other(&mut rng, n, *p),
                    None => rng.gen_range(0..n),
                });
                let partner = partner.unwrap_or_else(|| pick_other(&mut rng, n, node));
                Resolved::Split { node, partner, versions: *versions }
            }
            PlantedEvent::StateSwitch { versions, edge_prob } => {
                let label = match switched_probs.iter().position(|p| p.to_bits() == edge_prob.to_bits()) {
                    Some(k) => k,
                    None => {
                        switched_probs.push(*edge_prob);
                        switched_probs.len() - 1
                    }
                };
                Resolved::State { prob: *edge_prob, label: label as u32 + 1, versions: *versions }
            }
        });
    }

    let mut truth = GroundTruth {
        hubs: vec![Vec::new(); versions],
        cliques: Vec::new(),
        splits: Vec::new(),
        states: vec![0; versions],
    };
    let mut probs = vec![cfg.base_edge_prob; versions];
    for ev in &resolved {
        match ev {
            Resolved::Hub { hub, versions, .. } => {
                for v in versions.iter() {
                    truth.hubs[v].push(*hub);
                }
            }
            Resolved::Clique { members, versions } => truth.cliques.push(PlantedClique {
                members: members.clone(),
                versions: *versions,
            }),
            Resolved::Split { node, partner, versions } => truth.splits.push(PlantedSplit {
                node: *node,
                partner: *partner,
                versions: *versions,
            }),
            Resolved::State { prob, label, versions } => {
                for v in versions.iter() {
                    probs[v] = *prob;
                    truth.states[v] = *label;
                }
            }
        }
    }
    for hubs in &mut truth.hubs {
        hubs.sort_unstable();
        hubs.dedup();
    }

    let mut latent: Vec<f64> = (0..n * n).map(|_| rng.gen::<f64>()).collect();
    let mut layers = Vec::with_capacity(versions);
    for v in 0..versions {
        if v > 0 {
            for u in latent.iter_mut() {
                if rng.gen::<f64>() >= cfg.persistence {
                    *u = rng.gen::<f64>();
                }
            }
        }
        let mut layer = Snapshot::zeros(n, format!("v{v}"));
        for i in 0..n {
            for j in 0..n {
                if i != j && latent[i * n + j] < probs[v] {
                    layer.set(i, j, S::one());
                }
            }
        }
        for ev in &resolved {
            match ev {
                Resolved::Hub { hub, sources, versions } if versions.contains(v) => {
                    for &src in sources {
                        layer.set(src, *hub, S::one());
                    }
                }
                Resolved::Clique { members, versions } if versions.contains(v) => {
                    for &a in members {
                        for &b in members {
                            layer.set(a, b, S::one());
                        }
                    }
                }
                Resolved::Split { node, partner, versions } if versions.contains(v) => {
                    for caller in 0..n {
                        let w = layer.weight(caller, *node);
                        if caller != *partner && w > S::zero() && rng.gen_bool(0.5) {
                            layer.set(caller, *node, S::zero());
                            layer.add(caller, *partner, w);
                        }
                    }
                    layer.set(*node, *partner, S::one());
                }
                _ => {}
            }
        }
        layers.push(layer);
    }

    let registry = NodeRegistry::from_names(service_names(n))?;
    Ok((SnapshotSequence::new(registry, layers)?, truth))
}

fn pick_weighted<S: Scalar>(rng: &mut ChaCha8Rng, weights: impl Iterator<Item = S> + Clone) -> Option<usize> {
    let total: f64 = weights.clone().map(Scalar::as_f64).sum();
    if !(total > 0.0) {
        return None;
    }
    let mut target = rng.gen::<f64>() * total;
    let mut last = None;
    for (k, w) in weights.enumerate() {
        let w = w.as_f64();
        if w <= 0.0 {
            continue;
        }
        last = Some(k);
        if target < w {
            return Some(k);
        }
        target -= w;
    }
    last
}

/// Replays random request walks over the layers of `seq`.
///
/// Request `r` runs on layer `⌊r·T / n_requests⌋`, enters at a node drawn in
/// proportion to its out-weight, and follows out-edges in proportion to
/// their weight for at most `max_depth` calls. Request `r` occupies the
/// ticks `r·(max_depth+1) ..`, one tick per call.
pub fn synth_traces<S: Scalar>(
    seq: &SnapshotSequence<S>,
    n_requests: usize,
    max_depth: usize,
    seed: u64,
) -> Result<ContactStream<S>> {
    if seq.is_empty() {
        return Err(Error::InvalidArgument("trace synthesis needs at least one layer".into()));
    }
    if n_requests == 0 || max_depth == 0 {
        return Err(Error::InvalidArgument("n_requests and max_depth must be positive".into()));
    }
    let n = seq.node_count();
    let t_layers = seq.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut contacts = Vec::new();
    let stride = max_depth as u64 + 1;
    for r in 0..n_requests {
        let layer = seq.layer(r * t_layers / n_requests);
        let Some(mut current) = pick_weighted(&mut rng, (0..n).map(|i| layer.out_weight(i))) else {
            continue;
        };
        let start = r as u64 * stride;
        for depth in 0..max_depth {
            let row = &layer.as_slice()[current * n..(current + 1) * n];
            let Some(next) = pick_weighted(&mut rng, row.iter().copied()) else {
                break;
            };
            contacts.push(Contact::new(current, next, start + depth as u64));
            current = next;
        }
    }
    ContactStream::new(seq.registry().clone(), contacts)
}
