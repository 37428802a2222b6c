// SPDX-License-Identifier: Apache-2.0

//! Temporal network data model: node registry, contact streams, snapshot
//! sequences, and conversions between the two representations.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type NodeId = usize;
pub type Timestamp = u64;

/// Dense name ↔ id mapping. Ids are assigned in first-seen order and never change.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct NodeRegistry {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl NodeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a registry from unique names, keeping their order.
    pub fn from_names<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut reg = Self::new();
        for name in names {
            let name = name.into();
            if reg.index.contains_key(&name) {
                return Err(Error::Validation(format!("duplicate node name {name:?}")));
            }
            reg.intern(&name);
        }
        Ok(reg)
    }

    /// Returns the id of `name`, assigning the next dense id if unseen.
    pub fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn id(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.names[id]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

impl TryFrom<Vec<String>> for NodeRegistry {
    type Error = Error;

    fn try_from(names: Vec<String>) -> Result<Self> {
        Self::from_names(names)
    }
}

impl From<NodeRegistry> for Vec<String> {
    fn from(reg: NodeRegistry) -> Self {
        reg.names
    }
}

/// One timestamped call `src → dst`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Contact<S = f64> {
    pub src: NodeId,
    pub dst: NodeId,
    pub t: Timestamp,
    pub weight: S,
}

impl<S: Scalar> Contact<S> {
    pub fn new(src: NodeId, dst: NodeId, t: Timestamp) -> Self {
        Self::weighted(src, dst, t, S::one())
    }

    pub fn weighted(src: NodeId, dst: NodeId, t: Timestamp, weight: S) -> Self {
        Self { src, dst, t, weight }
    }
}

/// Time-ordered directed contacts over a registry.
///
/// Contacts are sorted by `(t, src, dst)`; duplicates at the same key are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", try_from = "RawStream<S>")]
pub struct ContactStream<S = f64> {
    nodes: NodeRegistry,
    contacts: Vec<Contact<S>>,
    #[serde(skip)]
    self_loops_dropped: usize,
}

#[derive(Deserialize)]
#[serde(bound = "S: Scalar")]
struct RawStream<S> {
    nodes: NodeRegistry,
    contacts: Vec<Contact<S>>,
}

impl<S: Scalar> TryFrom<RawStream<S>> for ContactStream<S> {
    type Error = Error;

    fn try_from(raw: RawStream<S>) -> Result<Self> {
        Self::new(raw.nodes, raw.contacts)
    }
}

impl<S: Scalar> ContactStream<S> {
    /// Validates and sorts `contacts`. Self-calls are dropped and counted.
    pub fn new(nodes: NodeRegistry, contacts: Vec<Contact<S>>) -> Result<Self> {
        let n = nodes.len();
        let mut kept = Vec::with_capacity(contacts.len());
        let mut self_loops = 0;
        for c in contacts {
            if c.src >= n || c.dst >= n {
                return Err(Error::Validation(format!(
                    "contact {}→{} at t={} references a node outside the registry (N={n})",
                    c.src, c.dst, c.t
                )));
            }
            if !(c.weight > S::zero()) || !c.weight.is_finite() {
                return Err(Error::Validation(format!(
                    "contact {}→{} at t={} has non-positive weight {}",
                    c.src, c.dst, c.t, c.weight
                )));
            }
            if c.src == c.dst {
                self_loops += 1;
                continue;
            }
            kept.push(c);
        }
        if self_loops > 0 {
            log::warn!("dropped {self_loops} self-call contact(s)");
        }
        kept.sort_by_key(|c| (c.t, c.src, c.dst));
        Ok(Self {
            nodes,
            contacts: kept,
            self_loops_dropped: self_loops,
        })
    }

    pub fn empty(nodes: NodeRegistry) -> Self {
        Self {
            nodes,
            contacts: Vec::new(),
            self_loops_dropped: 0,
        }
    }

    pub fn registry(&self) -> &NodeRegistry {
        &self.nodes
    }

    pub fn contacts(&self) -> &[Contact<S>] {
        &self.contacts
    }

    pub fn len(&self) -> usize {
        self.contacts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contacts.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn self_loops_dropped(&self) -> usize {
        self.self_loops_dropped
    }

    pub fn first_time(&self) -> Option<Timestamp> {
        self.contacts.first().map(|c| c.t)
    }

    pub fn last_time(&self) -> Option<Timestamp> {
        self.contacts.last().map(|c| c.t)
    }

    /// Sum of contact weights into a single snapshot.
    pub fn aggregate(&self) -> Snapshot<S> {
        let mut snap = Snapshot::zeros(self.node_count(), "aggregate");
        for c in &self.contacts {
            snap.add(c.src, c.dst, c.weight);
        }
        snap
    }
}

/// One weighted directed layer. Dense storage; zero means "no edge".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", try_from = "RawSnapshot<S>", into = "RawSnapshot<S>")]
pub struct Snapshot<S = f64> {
    n: usize,
    weights: Vec<S>,
    label: String,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
struct RawSnapshot<S> {
    label: String,
    n: usize,
    edges: Vec<(NodeId, NodeId, S)>,
}

impl<S: Scalar> TryFrom<RawSnapshot<S>> for Snapshot<S> {
    type Error = Error;

    fn try_from(raw: RawSnapshot<S>) -> Result<Self> {
        let mut snap = Snapshot::zeros(raw.n, raw.label);
        for (i, j, w) in raw.edges {
            if i >= raw.n || j >= raw.n || i == j || !(w >= S::zero()) || !w.is_finite() {
                return Err(Error::Validation(format!(
                    "layer {:?}: invalid edge ({i}, {j}, {w})",
                    snap.label
                )));
            }
            snap.add(i, j, w);
        }
        Ok(snap)
    }
}

impl<S: Scalar> From<Snapshot<S>> for RawSnapshot<S> {
    fn from(snap: Snapshot<S>) -> Self {
        RawSnapshot {
            edges: snap.edges().collect(),
            n: snap.n,
            label: snap.label,
        }
    }
}

impl<S: Scalar> Snapshot<S> {
    pub fn zeros(n: usize, label: impl Into<String>) -> Self {
        Self {
            n,
            weights: vec![S::zero(); n * n],
            label: label.into(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    #[inline]
    pub fn weight(&self, src: NodeId, dst: NodeId) -> S {
        self.weights[src * self.n + dst]
    }

    /// Adds `w` to `src → dst`. Self-loops are ignored.
    pub fn add(&mut self, src: NodeId, dst: NodeId, w: S) {
        if src != dst {
            self.weights[src * self.n + dst] += w;
        }
    }

    pub fn set(&mut self, src: NodeId, dst: NodeId, w: S) {
        if src != dst {
            self.weights[src * self.n + dst] = w;
        }
    }

    /// Nonzero edges in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, S)> + '_ {
        let n = self.n;
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != S::zero())
            .map(move |(k, &w)| (k / n, k % n, w))
    }

    pub fn edge_count(&self) -> usize {
        self.weights.iter().filter(|w| **w != S::zero()).count()
    }

    pub fn total_weight(&self) -> S {
        self.weights.iter().copied().sum()
    }

    pub fn out_weight(&self, src: NodeId) -> S {
        self.weights[src * self.n..(src + 1) * self.n].iter().copied().sum()
    }

    pub fn in_degree(&self, dst: NodeId) -> usize {
        (0..self.n).filter(|&i| self.weight(i, dst) > S::zero()).count()
    }

    /// `A + Aᵀ` as a row-major dense matrix.
    pub fn symmetrized(&self) -> Vec<S> {
        let n = self.n;
        let mut out = vec![S::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.weights[i * n + j] + self.weights[j * n + i];
            }
        }
        out
    }

    pub fn as_slice(&self) -> &[S] {
        &self.weights
    }

    pub fn scaled(&self, factor: S) -> Self {
        Self {
            n: self.n,
            weights: self.weights.iter().map(|&w| w * factor).collect(),
            label: self.label.clone(),
        }
    }
}

/// Ordered layers over a shared registry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", try_from = "RawSequence<S>")]
pub struct SnapshotSequence<S = f64> {
    nodes: NodeRegistry,
    layers: Vec<Snapshot<S>>,
}

#[derive(Deserialize)]
#[serde(bound = "S: Scalar")]
struct RawSequence<S> {
    nodes: NodeRegistry,
    layers: Vec<Snapshot<S>>,
}

impl<S: Scalar> TryFrom<RawSequence<S>> for SnapshotSequence<S> {
    type Error = Error;

    fn try_from(raw: RawSequence<S>) -> Result<Self> {
        Self::new(raw.nodes, raw.layers)
    }
}

impl<S: Scalar> SnapshotSequence<S> {
    pub fn new(nodes: NodeRegistry, layers: Vec<Snapshot<S>>) -> Result<Self> {
        if let Some(bad) = layers.iter().find(|l| l.n() != nodes.len()) {
            return Err(Error::Validation(format!(
                "layer {:?} has dimension {} but the registry has {} nodes",
                bad.label(),
                bad.n(),
                nodes.len()
            )));
        }
        Ok(Self { nodes, layers })
    }

    pub fn registry(&self) -> &NodeRegistry {
        &self.nodes
    }

    pub fn layers(&self) -> &[Snapshot<S>] {
        &self.layers
    }

    pub fn layer(&self, t: usize) -> &Snapshot<S> {
        &self.layers[t]
    }

    /// Number of layers `T`.
    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Sum of all layers into one static snapshot.
    pub fn aggregate(&self) -> Snapshot<S> {
        let n = self.node_count();
        let mut snap = Snapshot::zeros(n, "aggregate");
        for layer in &self.layers {
            for (w, &x) in snap.weights.iter_mut().zip(&layer.weights) {
                *w += x;
            }
        }
        snap
    }

    /// Same sequence with node ids relabeled: node `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[NodeId]) -> Result<Self> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument("not a permutation of the node ids".into()));
        }
        let mut names = vec![String::new(); n];
        for (i, &p) in perm.iter().enumerate() {
            names[p] = self.nodes.name(i).to_owned();
        }
        let layers = self
            .layers
            .iter()
            .map(|layer| {
                let mut out = Snapshot::zeros(n, layer.label());
                for (i, j, w) in layer.edges() {
                    out.set(perm[i], perm[j], w);
                }
                out
            })
            .collect();
        Self::new(NodeRegistry::from_names(names)?, layers)
    }

    pub fn map_layers(&self, f: impl FnMut(&Snapshot<S>) -> Snapshot<S>) -> Self {
        Self {
            nodes: self.nodes.clone(),
            layers: self.layers.iter().map(f).collect(),
        }
    }
    /// Converts every weight to another scalar type.
    pub fn cast<T: Scalar>(&self) -> SnapshotSequence<T> {
        SnapshotSequence {
            nodes: self.nodes.clone(),
            layers: self
                .layers
                .iter()
                .map(|l| Snapshot {
                    n: l.n,
                    weights: l.weights.iter().map(|w| T::of(w.as_f64())).collect(),
                    label: l.label.clone(),
                })
                .collect(),
        }
    }
}

/// Sums contacts into half-open windows `[t0 + k·window, t0 + (k+1)·window)`.
///
/// Contacts before `t0` are rejected so that no weight is silently lost.
pub fn windowed_snapshots<S: Scalar>(
    stream: &ContactStream<S>,
    window: Timestamp,
    t0: Timestamp,
) -> Result<SnapshotSequence<S>> {
    if window == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let n = stream.node_count();
    let Some(t_max) = stream.last_time() else {
        return SnapshotSequence::new(stream.registry().clone(), Vec::new());
    };
    if let Some(first) = stream.first_time().filter(|&t| t < t0) {
        return Err(Error::InvalidArgument(format!(
            "contact at t={first} precedes window origin t0={t0}"
        )));
    }
    let count = ((t_max - t0) / window + 1) as usize;
    let mut layers: Vec<Snapshot<S>> = (0..count).map(|k| Snapshot::zeros(n, k.to_string())).collect();
    for c in stream.contacts() {
        let k = ((c.t - t0) / window) as usize;
        layers[k].add(c.src, c.dst, c.weight);
    }
    SnapshotSequence::new(stream.registry().clone(), layers)
}

/// Weakly connected components of the time-aggregated, symmetrized graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Components {
    /// Component label per node, numbered by smallest member id.
    pub labels: Vec<usize>,
    pub count: usize,
}

impl Components {
    pub fn is_connected(&self) -> bool {
        self.count <= 1
    }
}

pub fn union_connectivity<S: Scalar>(seq: &SnapshotSequence<S>) -> Components {
    let n = seq.node_count();
    let mut uf = petgraph::unionfind::UnionFind::<usize>::new(n);
    for layer in seq.layers() {
        for (i, j, _) in layer.edges() {
            uf.union(i, j);
        }
    }
    let mut label_of_root = HashMap::new();
    let labels: Vec<usize> = (0..n)
        .map(|i| {
            let next = label_of_root.len();
            *label_of_root.entry(uf.find(i)).or_insert(next)
        })
        .collect();
    Components {
        count: label_of_root.len(),
        labels,
    }
}
