// SPDX-License-Identifier: Apache-2.0

mod common;

use std::collections::BTreeMap;

use msnet::centrality::{supra_centrality, DEFAULT_MAX_ITER};
use msnet::cliques::delta_cliques;
use msnet::detect::{
    default_theta, detect_bottleneck, detect_cycles, detect_intimacy, detect_state_anomaly, FindingKind, Report, Subject,
    CENTRALITY_ARTIFACT, CLIQUES_ARTIFACT, SNAPSHOTS_ARTIFACT, STATES_ARTIFACT,
};
use msnet::ingest::{synth_evolution, synth_traces, PlantedEvent, SynthConfig, VersionRange};
use msnet::states::{cluster_states, distance_matrix, Metric, StateLabeling};
use msnet::Snapshot;
use proptest::prelude::*;
use rand::Rng;

/// Mutual reachability classes by transitive closure.
fn brute_force_scc(g: &Snapshot) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut reach = vec![vec![false; n]; n];
    for (i, j, _) in g.edges() {
        reach[i][j] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut done = vec![false; n];
    for i in 0..n {
        if done[i] {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&j| j == i || (reach[i][j] && reach[j][i])).collect();
        for &j in &class {
            done[j] = true;
        }
        if class.len() >= 2 {
            out.push(class);
        }
    }
    out
}

fn nodes(f: &msnet::detect::Finding) -> Vec<usize> {
    match &f.subject {
        Subject::Nodes(v) | Subject::Layers(v) => v.clone(),
    }
}

#[test]
fn planted_three_cycle_is_the_only_scc() {
    let n = 42;
    let mut rng = common::rng(8);
    let mut g = Snapshot::zeros(n, "aggregate");
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.1) {
                g.add(i, j, 1.0);
            }
        }
    }
    let (a, b, c) = (5, 17, 30);
    g.add(a, b, 1.0);
    g.add(b, c, 1.0);
    g.add(c, a, 1.0);
    let found: Vec<Vec<usize>> = detect_cycles(&g).iter().map(nodes).collect();
    let brute = brute_force_scc(&g);
    assert_eq!(found, brute);
    assert_eq!(found.len(), 1);
    assert!([a, b, c].iter().all(|x| found[0].contains(x)));
}

#[test]
fn planted_hub_tops_bottleneck_findings() {
    let mut hits = 0;
    for seed in 0..10 {
        let (seq, hub) = common::hub_fixture(seed);
        let r = supra_centrality(&seq, 1.0, 1e-10, DEFAULT_MAX_ITER).unwrap();
        let findings = detect_bottleneck(&r, default_theta(42), 0.0).unwrap();
        let report = Report::new(BTreeMap::new(), BTreeMap::new(), vec![], findings);
        if report.findings.first().is_some_and(|f| f.subject == Subject::Nodes(vec![hub])) {
            hits += 1;
        }
    }
    assert!(hits >= 9, "{hits}/10");
}

/// Four services calling each other constantly on top of sparse noise.
fn intimacy_stream(seed: u64) -> (msnet::Stream, Vec<usize>) {
    let members = vec![2, 7, 11, 15];
    let cfg = SynthConfig::new(20, 1, 0.02, seed).with_event(PlantedEvent::Clique {
        versions: VersionRange::new(0, 1),
        size: 4,
        nodes: Some(members.clone()),
    });
    let (seq, _) = synth_evolution(&cfg).unwrap();
    (synth_traces(&seq, 400, 3, seed).unwrap(), members)
}

#[test]
fn planted_clique_flagged_without_false_positives() {
    for seed in 0..10 {
        let (stream, members) = intimacy_stream(seed);
        let report = delta_cliques(&stream, 100, None).unwrap();
        let span = stream.last_time().unwrap() - stream.first_time().unwrap();
        let findings = detect_intimacy(&report, span, 3, 0.5).unwrap();
        assert!(!findings.is_empty(), "seed {seed}");
        for f in &findings {
            let got = nodes(f);
            assert!(got.iter().all(|x| members.contains(x)), "seed {seed}: {got:?}");
        }
        assert!(findings.iter().any(|f| nodes(f) == members), "seed {seed}");
    }
}

#[test]
fn minority_regime_flagged() {
    let mut cfg = SynthConfig::new(30, 7, 0.4, 3);
    cfg.persistence = 1.0;
    cfg = cfg.with_event(PlantedEvent::StateSwitch { versions: VersionRange::new(6, 7), edge_prob: 0.05 });
    let (seq, _) = synth_evolution::<f64>(&cfg).unwrap();
    let labels = cluster_states(&distance_matrix(&seq, Metric::Frobenius).unwrap(), Some(2)).unwrap();
    let findings = detect_state_anomaly(&labels, 0.2).unwrap();
    assert_eq!(findings.len(), 1);
    assert_eq!(findings[0].subject, Subject::Layers(vec![6]));
}

fn full_report(seed: u64) -> Report {
    let (seq, _) = common::hub_fixture(seed);
    let r = supra_centrality(&seq, 1.0, 1e-10, DEFAULT_MAX_ITER).unwrap();
    let (stream, _) = intimacy_stream(seed);
    let cliques = delta_cliques(&stream, 100, None).unwrap();
    let labels = cluster_states(&distance_matrix(&seq, Metric::Frobenius).unwrap(), None).unwrap();
    let mut findings = detect_bottleneck(&r, default_theta(42), 0.0).unwrap();
    findings.extend(detect_cycles(&seq.aggregate()));
    findings.extend(detect_intimacy(&cliques, stream.last_time().unwrap(), 3, 0.5).unwrap());
    findings.extend(detect_state_anomaly(&labels, 0.2).unwrap());
    let inputs = [CENTRALITY_ARTIFACT, SNAPSHOTS_ARTIFACT, CLIQUES_ARTIFACT, STATES_ARTIFACT]
        .iter()
        .map(|a| (a.to_string(), msnet::detect::fingerprint(a.as_bytes())))
        .collect();
    Report::new(inputs, BTreeMap::new(), seq.registry().names().to_vec(), findings)
}

#[test]
fn reports_are_byte_identical_and_resolve() {
    let a = serde_json::to_string(&full_report(2)).unwrap();
    let b = serde_json::to_string(&full_report(2)).unwrap();
    assert_eq!(a, b);
    let r = full_report(2);
    assert!(r.evidence_resolves());
    assert!(r.findings.iter().all(|f| f.score >= 0.0 && !f.subject.is_empty()));
    let kinds: Vec<FindingKind> = r.findings.iter().map(|f| f.kind).collect();
    assert!(kinds.windows(2).all(|w| w[0] <= w[1]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn raising_thresholds_never_adds(seed in 0u64..4, theta in 0.01f64..0.5, bump in 0.0f64..0.5, size in 2usize..5, frac in 0.05f64..0.9) {
        let (seq, _) = common::hub_fixture(seed);
        let r = supra_centrality(&seq, 1.0, 1e-10, DEFAULT_MAX_ITER).unwrap();
        let lo = detect_bottleneck(&r, theta, 0.0).unwrap();
        let hi = detect_bottleneck(&r, (theta + bump).min(1.0), 0.0).unwrap();
        prop_assert!(hi.iter().all(|f| lo.contains(f) || lo.iter().any(|g| g.subject == f.subject)));
        prop_assert!(hi.len() <= lo.len());

        let (stream, _) = intimacy_stream(seed);
        let cliques = delta_cliques(&stream, 60, None).unwrap();
        let span = stream.last_time().unwrap();
        let base = detect_intimacy(&cliques, span, size, frac).unwrap();
        let bigger = detect_intimacy(&cliques, span, size + 1, frac).unwrap();
        let longer = detect_intimacy(&cliques, span, size, (frac + bump).min(1.0)).unwrap();
        prop_assert!(bigger.len() <= base.len() && longer.len() <= base.len());
        prop_assert!(bigger.iter().chain(&longer).all(|f| base.iter().any(|g| g.subject == f.subject)));
    }

    #[test]
    fn infinite_slope_flags_nothing(seed in 0u64..4) {
        let (seq, _) = common::hub_fixture(seed);
        let r = supra_centrality(&seq, 1.0, 1e-10, DEFAULT_MAX_ITER).unwrap();
        prop_assert!(detect_bottleneck(&r, 0.01, f64::INFINITY).unwrap().is_empty());
    }

    #[test]
    fn minority_threshold_monotone(raw in prop::collection::vec(0usize..3, 1..12), lo in 0.05f64..0.5, bump in 0.0f64..0.4) {
        let labeling = StateLabeling::from_raw(&raw);
        let a = detect_state_anomaly(&labeling, lo).unwrap();
        let b = detect_state_anomaly(&labeling, (lo + bump).min(0.99)).unwrap();
        prop_assert!(a.len() <= b.len());
    }
}
