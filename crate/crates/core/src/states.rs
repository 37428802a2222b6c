// SPDX-License-Identifier: Apache-2.0

//! System-state detection: distances between layers, clustered into
//! discrete states by average-linkage agglomeration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SnapshotSequence;
use crate::linalg::{laplacian, symmetric_eigenvalues};
use crate::scalar::Scalar;

/// Upper end of the automatic state-count search.
pub const MAX_AUTO_STATES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Frobenius norm of the difference of symmetrized layers.
    #[default]
    Frobenius,
    /// Euclidean distance between sorted Laplacian spectra.
    Spectral,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Frobenius => "frobenius",
            Metric::Spectral => "spectral",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frobenius" => Ok(Metric::Frobenius),
            "spectral" => Ok(Metric::Spectral),
            other => Err(Error::InvalidArgument(format!("unknown metric {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct DistanceMatrix<S = f64> {
    pub size: usize,
    /// Row-major `size × size`.
    pub values: Vec<S>,
    pub metric: Metric,
}

impl<S: Scalar> DistanceMatrix<S> {
    /// Symmetrizes and validates a raw matrix.
    pub fn from_rows(rows: Vec<Vec<S>>, metric: Metric) -> Result<Self> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(Error::InvalidArgument("distance matrix must be square".into()));
        }
        let values: Vec<S> = rows.into_iter().flatten().collect();
        for a in 0..size {
            if values[a * size + a] != S::zero() {
                return Err(Error::InvalidArgument("distance matrix needs a zero diagonal".into()));
            }
            for b in 0..size {
                let x = values[a * size + b];
                if !(x >= S::zero()) || x != values[b * size + a] {
                    return Err(Error::InvalidArgument("distances must be symmetric and nonnegative".into()));
                }
            }
        }
        Ok(Self { size, values, metric })
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> S {
        self.values[a * self.size + b]
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.values.chunks(self.size.max(1)).map(<[S]>::to_vec).collect()
    }
}

pub fn distance_matrix<S: Scalar>(seq: &SnapshotSequence<S>, metric: Metric) -> Result<DistanceMatrix<S>> {
    let t = seq.len();
    if t < 2 {
        return Err(Error::InvalidArgument(format!("state detection needs T ≥ 2 layers, got {t}")));
    }
    let n = seq.node_count();
    let sym: Vec<Vec<S>> = seq.layers().iter().map(|l| l.symmetrized()).collect();
    let features: Vec<Vec<S>> = match metric {
        Metric::Frobenius => sym,
        Metric::Spectral => sym.iter().map(|w| symmetric_eigenvalues(&laplacian(w, n), n)).collect(),
    };
    let mut values = vec![S::zero(); t * t];
    for a in 0..t {
        for b in a + 1..t {
            let d = features[a]
                .iter()
                .zip(&features[b])
                .map(|(&x, &y)| (x - y) * (x - y))
                .sum::<S>()
                .sqrt();
            values[a * t + b] = d;
            values[b * t + a] = d;
        }
    }
    Ok(DistanceMatrix { size: t, values, metric })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateLabeling {
    pub labels: Vec<usize>,
    #[serde(rename = "K")]
    pub k: usize,
    pub change_points: Vec<usize>,
}

impl StateLabeling {
    fn from_clusters(clusters: &[Vec<usize>], size: usize) -> Self {
        let mut raw = vec![0; size];
        for (c, members) in clusters.iter().enumerate() {
            for &m in members {
                raw[m] = c;
            }
        }
        Self::from_raw(&raw)
    }

    /// Renumbers arbitrary labels by first appearance.
    pub fn from_raw(raw: &[usize]) -> Self {
        let mut map: Vec<(usize, usize)> = Vec::new();
        let labels: Vec<usize> = raw
            .iter()
            .map(|&r| match map.iter().find(|(k, _)| *k == r) {
                Some(&(_, v)) => v,
                None => {
                    map.push((r, map.len()));
                    map.len() - 1
                }
            })
            .collect();
        let change_points = (1..labels.len()).filter(|&t| labels[t] != labels[t - 1]).collect();
        Self { k: map.len(), labels, change_points }
    }

    /// Layers per state.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (t, &l) in self.labels.iter().enumerate() {
            out[l].push(t);
        }
        out
    }
}

/// Average-linkage merges until `k` clusters remain.
///
/// Clusters are kept sorted by smallest member; among equal linkage values
/// the pair with the smallest positions in that order merges first.
fn agglomerate<S: Scalar>(d: &DistanceMatrix<S>, k: usize) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = (0..d.size).map(|t| vec![t]).collect();
    while clusters.len() > k.max(1) {
        let mut best: Option<(S, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let mut sum = S::zero();
                for &x in &clusters[a] {
                    for &y in &clusters[b] {
                        sum += d.get(x, y);
                    }
                }
                let link = sum / S::of_usize(clusters[a].len() * clusters[b].len());
                if best.is_none_or(|(v, _, _)| link < v) {
                    best = Some((link, a, b));
                }
            }
        }
        let (_, a, b) = best.expect("at least two clusters");
        let merged = clusters.remove(b);
        clusters[a].extend(merged);
        clusters[a].sort_unstable();
    }
    clusters
}

/// Mean silhouette coefficient; singletons and zero-spread points score 0.
pub fn silhouette<S: Scalar>(d: &DistanceMatrix<S>, labeling: &StateLabeling) -> S {
    let groups = labeling.members();
    if d.size == 0 {
        return S::zero();
    }
    let mut total = S::zero();
    for t in 0..d.size {
        let own = &groups[labeling.labels[t]];
        if own.len() < 2 {
            continue;
        }
        let mean_to = |g: &[usize]| g.iter().map(|&o| d.get(t, o)).sum::<S>() / S::of_usize(g.len());
        let a = own.iter().map(|&o| d.get(t, o)).sum::<S>() / S::of_usize(own.len() - 1);
        let b = groups
            .iter()
            .enumerate()
            .filter(|(l, _)| *l != labeling.labels[t])
            .map(|(_, g)| mean_to(g))
            .fold(S::infinity(), S::min);
        let spread = a.max(b);
        if spread > S::zero() && b.is_finite() {
            total += (b - a) / spread;
        }
    }
    total / S::of_usize(d.size)
}

/// Clusters layers into states; with `k = None` the silhouette picks the
/// count from `[2, min(T−1, 8)]` (fewest states on ties).
pub fn cluster_states<S: Scalar>(d: &DistanceMatrix<S>, k: Option<usize>) -> Result<StateLabeling> {
    let t = d.size;
    if t == 0 {
        return Err(Error::InvalidArgument("no layers to cluster".into()));
    }
    match k {
        Some(k) if k == 0 || k > t => Err(Error::InvalidArgument(format!("K must lie in [1, {t}], got {k}"))),
        Some(k) => Ok(StateLabeling::from_clusters(&agglomerate(d, k), t)),
        None => {
            let upper = (t.saturating_sub(1)).min(MAX_AUTO_STATES);
            if upper < 2 {
                return Ok(StateLabeling::from_clusters(&agglomerate(d, 1), t));
            }
            let mut best: Option<(S, StateLabeling)> = None;
            for k in 2..=upper {
                let labeling = StateLabeling::from_clusters(&agglomerate(d, k), t);
                let score = silhouette(d, &labeling);
                if best.as_ref().is_none_or(|(s, _)| score > *s) {
                    best = Some((score, labeling));
                }
            }
            Ok(best.expect("non-empty search range").1)
        }
    }
}
