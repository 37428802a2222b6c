// SPDX-License-Identifier: Apache-2.0

//! Maps analysis outputs to architectural-degradation findings.
//!
//! Detectors never re-run an analysis; they read its result and cite it as
//! evidence (`<artifact>#<fragment>`).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::centrality::SupraCentralityResult;
use crate::cliques::CliqueReport;
use crate::error::{Error, Result};
use crate::graph::{NodeId, Snapshot, Timestamp};
use crate::scalar::Scalar;
use crate::states::StateLabeling;

pub const CENTRALITY_ARTIFACT: &str = "centrality.json";
pub const SNAPSHOTS_ARTIFACT: &str = "snapshots.json";
pub const CLIQUES_ARTIFACT: &str = "cliques.json";
pub const STATES_ARTIFACT: &str = "states.json";

pub const DEFAULT_MIN_SLOPE: f64 = 0.0;
pub const DEFAULT_MIN_SIZE: usize = 3;
pub const DEFAULT_MIN_FRACTION: f64 = 0.5;
pub const DEFAULT_MAX_MINORITY_FRACTION: f64 = 0.2;

/// `3/N`, capped at 1.
pub fn default_theta(nodes: usize) -> f64 {
    (3.0 / nodes.max(1) as f64).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    Bottleneck,
    CyclicDependency,
    ServiceIntimacy,
    StateAnomaly,
}

impl FindingKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FindingKind::Bottleneck => "bottleneck",
            FindingKind::CyclicDependency => "cyclic_dependency",
            FindingKind::ServiceIntimacy => "service_intimacy",
            FindingKind::StateAnomaly => "state_anomaly",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subject {
    Nodes(Vec<NodeId>),
    Layers(Vec<usize>),
}

impl Subject {
    pub fn len(&self) -> usize {
        match self {
            Subject::Nodes(v) | Subject::Layers(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub kind: FindingKind,
    pub subject: Subject,
    pub score: f64,
    pub evidence: String,
    pub thresholds: BTreeMap<String, f64>,
}

impl Finding {
    pub fn evidence_artifact(&self) -> &str {
        self.evidence.split('#').next().unwrap_or_default()
    }
}

fn thresholds(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_owned(), v)).collect()
}

/// Least-squares slope of `ys` against `0, 1, …`; zero for fewer than two points.
pub fn slope(ys: &[f64]) -> f64 {
    let n = ys.len();
    if n < 2 {
        return 0.0;
    }
    let mean_x = (n - 1) as f64 / 2.0;
    let mean_y = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, &y) in ys.iter().enumerate() {
        let dx = x as f64 - mean_x;
        sxy += dx * (y - mean_y);
        sxx += dx * dx;
    }
    sxy / sxx
}

/// Flags nodes whose conditional centrality peaks at or above `theta` and
/// trends upward by at least `min_slope` per layer.
pub fn detect_bottleneck<S: Scalar>(result: &SupraCentralityResult<S>, theta: f64, min_slope: f64) -> Result<Vec<Finding>> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidArgument(format!("theta must lie in (0, 1], got {theta}")));
    }
    let mut out = Vec::new();
    for i in 0..result.nodes() {
        let series: Vec<f64> = result.conditional.iter().map(|row| row[i].as_f64()).collect();
        let peak = series.iter().copied().fold(0.0, f64::max);
        let trend = slope(&series);
        if peak >= theta && trend >= min_slope {
            out.push(Finding {
                kind: FindingKind::Bottleneck,
                subject: Subject::Nodes(vec![i]),
                score: peak,
                evidence: format!("{CENTRALITY_ARTIFACT}#conditional/node/{i}"),
                thresholds: thresholds(&[("theta", theta), ("min_slope", min_slope), ("slope", trend)]),
            });
        }
    }
    Ok(out)
}

/// One finding per strongly connected component of two or more services.
pub fn detect_cycles<S: Scalar>(agg: &Snapshot<S>) -> Vec<Finding> {
    let mut g = DiGraph::<(), ()>::with_capacity(agg.n(), agg.edge_count());
    let nodes: Vec<_> = (0..agg.n()).map(|_| g.add_node(())).collect();
    for (i, j, w) in agg.edges() {
        if w > S::zero() {
            g.add_edge(nodes[i], nodes[j], ());
        }
    }
    let mut comps: Vec<Vec<NodeId>> = tarjan_scc(&g)
        .into_iter()
        .filter(|c| c.len() >= 2)
        .map(|c| {
            let mut ids: Vec<NodeId> = c.into_iter().map(|x| x.index()).collect();
            ids.sort_unstable();
            ids
        })
        .collect();
    comps.sort();
    comps
        .into_iter()
        .map(|ids| Finding {
            kind: FindingKind::CyclicDependency,
            score: ids.len() as f64,
            evidence: format!("{SNAPSHOTS_ARTIFACT}#aggregate/scc/{}", ids[0]),
            subject: Subject::Nodes(ids),
            thresholds: thresholds(&[("min_component_size", 2.0)]),
        })
        .collect()
}

/// Flags Δ-cliques with at least `min_size` members spanning at least
/// `min_fraction` of the observation window.
pub fn detect_intimacy(
    report: &CliqueReport,
    observation_span: Timestamp,
    min_size: usize,
    min_fraction: f64,
) -> Result<Vec<Finding>> {
    if observation_span == 0 {
        return Err(Error::InvalidArgument("observation span must be positive".into()));
    }
    if min_size < 2 {
        return Err(Error::InvalidArgument("min_size must be at least 2".into()));
    }
    if !(min_fraction > 0.0 && min_fraction <= 1.0) {
        return Err(Error::InvalidArgument("min_fraction must lie in (0, 1]".into()));
    }
    let span = observation_span as f64;
    Ok(report
        .cliques
        .iter()
        .enumerate()
        .filter(|(_, c)| c.members.len() >= min_size && c.span() as f64 / span >= min_fraction)
        .map(|(k, c)| Finding {
            kind: FindingKind::ServiceIntimacy,
            subject: Subject::Nodes(c.members.clone()),
            score: c.members.len() as f64 * c.span() as f64 / span,
            evidence: format!("{CLIQUES_ARTIFACT}#cliques/{k}"),
            thresholds: thresholds(&[
                ("min_size", min_size as f64),
                ("min_fraction", min_fraction),
                ("delta", c.delta as f64),
            ]),
        })
        .collect())
}

/// Flags states that occupy at most `max_minority_fraction` of the layers.
pub fn detect_state_anomaly(labeling: &StateLabeling, max_minority_fraction: f64) -> Result<Vec<Finding>> {
    if !(max_minority_fraction > 0.0 && max_minority_fraction < 1.0) {
        return Err(Error::InvalidArgument("max_minority_fraction must lie in (0, 1)".into()));
    }
    let total = labeling.labels.len() as f64;
    Ok(labeling
        .members()
        .into_iter()
        .enumerate()
        .filter_map(|(state, layers)| {
            let share = layers.len() as f64 / total;
            (share <= max_minority_fraction && !layers.is_empty()).then(|| Finding {
                kind: FindingKind::StateAnomaly,
                subject: Subject::Layers(layers),
                score: 1.0 - share,
                evidence: format!("{STATES_ARTIFACT}#state/{state}"),
                thresholds: thresholds(&[("max_minority_fraction", max_minority_fraction)]),
            })
        })
        .collect())
}

pub fn fingerprint(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub tool_version: String,
    /// SHA-256 of each input artifact.
    pub inputs: BTreeMap<String, String>,
    pub parameters: BTreeMap<String, serde_json::Value>,
    /// Artifacts findings may cite.
    pub artifacts: Vec<String>,
    pub nodes: Vec<String>,
    pub findings: Vec<Finding>,
}

impl Report {
    pub fn new(
        inputs: BTreeMap<String, String>,
        parameters: BTreeMap<String, serde_json::Value>,
        nodes: Vec<String>,
        mut findings: Vec<Finding>,
    ) -> Self {
        findings.sort_by(|a, b| {
            a.kind
                .cmp(&b.kind)
                .then(b.score.total_cmp(&a.score))
                .then_with(|| a.subject.cmp(&b.subject))
        });
        let artifacts = inputs.keys().cloned().collect();
        Self {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            inputs,
            parameters,
            artifacts,
            nodes,
            findings,
        }
    }

    /// Every finding cites an artifact listed in the report.
    pub fn evidence_resolves(&self) -> bool {
        self.findings
            .iter()
            .all(|f| self.artifacts.iter().any(|a| a == f.evidence_artifact()))
    }

    pub fn of_kind(&self, kind: FindingKind) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(move |f| f.kind == kind)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} degradation report", self.tool, self.tool_version);
        for (name, hash) in &self.inputs {
            let _ = writeln!(out, "  input {name} sha256:{hash}");
        }
        if self.findings.is_empty() {
            let _ = writeln!(out, "\nno findings");
            return out;
        }
        let mut current = None;
        for f in &self.findings {
            if current != Some(f.kind) {
                current = Some(f.kind);
                let count = self.of_kind(f.kind).count();
                let _ = writeln!(out, "\n[{}] {count} finding(s)", f.kind.as_str());
            }
            let subject = match &f.subject {
                Subject::Nodes(ids) => ids
                    .iter()
                    .map(|&i| self.nodes.get(i).cloned().unwrap_or_else(|| format!("#{i}")))
                    .collect::<Vec<_>>()
                    .join(", "),
                Subject::Layers(ls) => format!(
                    "layers {}",
                    ls.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
                ),
            };
            let _ = writeln!(out, "  score {:.6}  {subject}  ({})", f.score, f.evidence);
        }
        out
    }
}
