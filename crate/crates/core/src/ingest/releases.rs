// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeRegistry, Snapshot, SnapshotSequence};
use crate::scalar::Scalar;

/// `{"versions":[{"label":str,"edges":[[src,dst,weight],...]},...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReleaseManifest {
    pub versions: Vec<VersionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VersionEntry {
    pub label: String,
    pub edges: Vec<(String, String, f64)>,
}

impl ReleaseManifest {
    pub fn from_sequence<S: Scalar>(seq: &SnapshotSequence<S>) -> Self {
        let reg = seq.registry();
        let versions = seq
            .layers()
            .iter()
            .map(|layer| VersionEntry {
                label: layer.label().to_owned(),
                edges: layer
                    .edges()
                    .map(|(i, j, w)| (reg.name(i).to_owned(), reg.name(j).to_owned(), w.as_f64()))
                    .collect(),
            })
            .collect();
        Self { versions }
    }
}

/// One layer per manifest version, over the union of service names.
pub fn parse_releases<S: Scalar>(text: &str) -> Result<SnapshotSequence<S>> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Outer {
        versions: Vec<serde_json::Value>,
    }
    let outer: Outer = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;

    let mut entries = Vec::with_capacity(outer.versions.len());
    for (k, value) in outer.versions.into_iter().enumerate() {
        let label = value
            .get("label")
            .and_then(|l| l.as_str())
            .map(str::to_owned)
            .unwrap_or_else(|| format!("#{k}"));
        let entry: VersionEntry = serde_json::from_value(value)
            .map_err(|e| Error::Validation(format!("version {label:?}: {e}")))?;
        entries.push(entry);
    }

    let mut registry = NodeRegistry::new();
    let mut ids = Vec::with_capacity(entries.len());
    for entry in &entries {
        let mut edges = Vec::with_capacity(entry.edges.len());
        for (src, dst, w) in &entry.edges {
            if !(*w >= 0.0) || !w.is_finite() {
                return Err(Error::Validation(format!(
                    "version {:?}: edge [{src:?}, {dst:?}] has invalid weight {w}",
                    entry.label
                )));
            }
            edges.push((registry.intern(src), registry.intern(dst), *w));
        }
        ids.push(edges);
    }

    let n = registry.len();
    let mut self_loops = 0;
    let layers = entries
        .iter()
        .zip(ids)
        .map(|(entry, edges)| {
            let mut snap = Snapshot::zeros(n, entry.label.as_str());
            for (i, j, w) in edges {
                if i == j {
                    self_loops += 1;
                }
                snap.add(i, j, S::of(w));
            }
            snap
        })
        .collect();
    if self_loops > 0 {
        log::warn!("dropped {self_loops} self-call edge(s) from release manifest");
    }
    SnapshotSequence::new(registry, layers)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_versions_forty_two_services() {
        let versions: Vec<VersionEntry> = (0..7)
            .map(|v| VersionEntry {
                label: format!("v{v}"),
                edges: (0..42)
                    .map(|i| (format!("svc{i}"), format!("svc{}", (i + 1 + v) % 42), 1.0))
                    .collect(),
            })
            .collect();
        let text = serde_json::to_string(&ReleaseManifest { versions }).unwrap();
        let seq = parse_releases::<f64>(&text).unwrap();
        assert_eq!(seq.len(), 7);
        assert_eq!(seq.node_count(), 42);
        assert_eq!(seq.layer(6).label(), "v6");
    }

    #[test]
    fn single_empty_version() {
        let seq = parse_releases::<f64>(r#"{"versions":[{"label":"1.0","edges":[]}]}"#).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(seq.node_count(), 0);
        assert_eq!(seq.layer(0).edge_count(), 0);
    }

    #[test]
    fn duplicate_edges_sum() {
        let seq = parse_releases::<f64>(
            r#"{"versions":[{"label":"a","edges":[["x","y",1.5],["x","y",2]]}]}"#,
        )
        .unwrap();
        assert_eq!(seq.layer(0).weight(0, 1), 3.5);
    }

    #[test]
    fn registry_is_union_across_versions() {
        let seq = parse_releases::<f64>(
            r#"{"versions":[{"label":"a","edges":[["x","y",1]]},{"label":"b","edges":[["z","x",1]]}]}"#,
        )
        .unwrap();
        assert_eq!(seq.registry().names(), ["x", "y", "z"]);
        assert_eq!(seq.layer(0).n(), 3);
    }

    #[test]
    fn negative_weight_names_version_and_edge() {
        let err = parse_releases::<f64>(
            r#"{"versions":[{"label":"v2","edges":[["x","y",-1]]}]}"#,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("v2") && msg.contains("\"x\""), "{msg}");
    }

    #[test]
    fn unknown_field_names_version() {
        let err = parse_releases::<f64>(
            r#"{"versions":[{"label":"v9","edges":[],"extra":1}]}"#,
        )
        .unwrap_err();
        assert!(matches!(&err, Error::Validation(m) if m.contains("v9")), "{err}");
        assert!(parse_releases::<f64>(r#"{"versions":[],"x":1}"#).is_err());
    }
}
