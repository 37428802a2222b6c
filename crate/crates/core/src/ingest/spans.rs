// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Contact, ContactStream, NodeRegistry};
use crate::scalar::Scalar;

/// One span of a distributed trace. Unknown fields are ignored on input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanRecord {
    pub trace_id: String,
    pub span_id: String,
    #[serde(default)]
    pub parent_span_id: Option<String>,
    pub service: String,
    pub operation: String,
    pub start_us: u64,
    pub duration_us: u64,
}

#[derive(Debug, Clone)]
pub struct ParsedSpans<S = f64> {
    pub stream: ContactStream<S>,
    pub spans: usize,
    /// Spans whose parent id did not resolve inside their trace.
    pub dangling_parents: usize,
}

/// Builds caller→callee contacts from a JSON Lines span dump.
///
/// A contact is emitted for each span whose parent exists in the same trace
/// and belongs to a different service, timestamped with the child's start.
pub fn parse_spans<S: Scalar>(text: &str) -> Result<ParsedSpans<S>> {
    let mut registry = NodeRegistry::new();
    let mut records = Vec::new();
    // (trace, span) -> index into records
    let mut by_id: HashMap<(String, String), usize> = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: SpanRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: lineno + 1,
            message: e.to_string(),
        })?;
        let key = (rec.trace_id.clone(), rec.span_id.clone());
        if by_id.insert(key, records.len()).is_some() {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("duplicate span_id {:?} in trace {:?}", rec.span_id, rec.trace_id),
            });
        }
        let service = registry.intern(&rec.service);
        records.push((rec, service));
    }

    let mut contacts = Vec::new();
    let mut dangling = 0;
    for (rec, child) in &records {
        let Some(parent_id) = rec.parent_span_id.as_deref().filter(|p| !p.is_empty()) else {
            continue;
        };
        match by_id.get(&(rec.trace_id.clone(), parent_id.to_owned())) {
            Some(&p) => {
                let parent = records[p].1;
                if parent != *child {
                    contacts.push(Contact::new(parent, *child, rec.start_us));
                }
            }
            None => dangling += 1,
        }
    }
    if dangling > 0 {
        log::warn!("{dangling} span(s) reference a missing parent; treated as roots");
    }
    Ok(ParsedSpans {
        stream: ContactStream::new(registry, contacts)?,
        spans: records.len(),
        dangling_parents: dangling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span(trace: &str, id: &str, parent: Option<&str>, service: &str, start: u64) -> String {
        serde_json::to_string(&SpanRecord {
            trace_id: trace.into(),
            span_id: id.into(),
            parent_span_id: parent.map(Into::into),
            service: service.into(),
            operation: "op".into(),
            start_us: start,
            duration_us: 10,
        })
        .unwrap()
    }

    fn edges(p: &ParsedSpans) -> Vec<(String, String, u64)> {
        let reg = p.stream.registry();
        p.stream
            .contacts()
            .iter()
            .map(|c| (reg.name(c.src).to_owned(), reg.name(c.dst).to_owned(), c.t))
            .collect()
    }

    #[test]
    fn root_and_child() {
        let text = [span("t", "1", None, "A", 0), span("t", "2", Some("1"), "B", 100)].join("\n");
        let p = parse_spans::<f64>(&text).unwrap();
        assert_eq!(edges(&p), [("A".into(), "B".into(), 100)]);
    }

    #[test]
    fn same_service_is_internal() {
        let text = [span("t", "1", None, "A", 0), span("t", "2", Some("1"), "A", 100)].join("\n");
        let p = parse_spans::<f64>(&text).unwrap();
        assert!(p.stream.is_empty());
        assert_eq!(p.stream.node_count(), 1);
    }

    #[test]
    fn three_level_chain() {
        // Hand trace: span 3 (C) resolves to parent 2 (B), span 2 to parent 1 (A).
        let text = [
            span("t", "3", Some("2"), "C", 250),
            span("t", "1", None, "A", 0),
            span("t", "2", Some("1"), "B", 100),
        ]
        .join("\n");
        let p = parse_spans::<f64>(&text).unwrap();
        assert_eq!(
            edges(&p),
            [("A".into(), "B".into(), 100), ("B".into(), "C".into(), 250)]
        );
    }

    #[test]
    fn parents_do_not_cross_traces() {
        let text = [span("t1", "1", None, "A", 0), span("t2", "2", Some("1"), "B", 5)].join("\n");
        let p = parse_spans::<f64>(&text).unwrap();
        assert!(p.stream.is_empty());
        assert_eq!(p.dangling_parents, 1);
    }

    #[test]
    fn dangling_parent_is_root() {
        let text = span("t", "2", Some("missing"), "B", 5);
        let p = parse_spans::<f64>(&text).unwrap();
        assert_eq!(p.dangling_parents, 1);
        assert!(p.stream.is_empty());
        assert_eq!(p.stream.registry().names(), ["B"]);
    }

    #[test]
    fn malformed_line_reports_number() {
        let text = format!("{}\n\n{{not json\n", span("t", "1", None, "A", 0));
        match parse_spans::<f64>(&text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_ignored() {
        let text = r#"{"trace_id":"t","span_id":"1","service":"A","operation":"x","start_us":1,"duration_us":2,"tags":{"k":"v"}}"#;
        let p = parse_spans::<f64>(text).unwrap();
        assert_eq!(p.spans, 1);
    }

    #[test]
    fn duplicate_span_is_rejected() {
        let text = [span("t", "1", None, "A", 0), span("t", "1", None, "B", 0)].join("\n");
        assert!(matches!(parse_spans::<f64>(&text), Err(Error::Parse { line: 2, .. })));
    }
}
