// SPDX-License-Identifier: Apache-2.0

use anyhow::{Context, Result};
use msnet::ingest::{parse_releases, parse_spans, synth_evolution, synth_traces, SynthConfig};
use msnet::{windowed_snapshots, Snapshots};

use super::{Output, Run};
use crate::args::{IngestReleasesArgs, IngestTracesArgs, SynthArgs};
use crate::io::Bundle;

pub fn traces(run: &mut Run, a: &IngestTracesArgs) -> Result<Output> {
    let text = run.inputs.read_text(&a.input)?;
    let parsed = parse_spans::<f64>(&text)?;
    run.param("window", a.window);
    run.param("t0", a.window.map(|_| a.t0));
    let mut bundle = Bundle::new(&a.out.out);
    bundle.json("stream.json", &parsed.stream)?;
    if let Some(window) = a.window {
        bundle.json("snapshots.json", &windowed_snapshots(&parsed.stream, window, a.t0)?)?;
    }
    bundle.json(
        "ingest_summary.json",
        &serde_json::json!({
            "spans": parsed.spans,
            "contacts": parsed.stream.len(),
            "services": parsed.stream.node_count(),
            "dangling_parents": parsed.dangling_parents,
        }),
    )?;
    Ok(Output::Files { bundle, out: a.out.out.clone() })
}

pub fn releases(run: &mut Run, a: &IngestReleasesArgs) -> Result<Output> {
    let text = run.inputs.read_text(&a.input)?;
    let seq: Snapshots = parse_releases(&text)?;
    let mut bundle = Bundle::new(&a.out.out);
    bundle.json("snapshots.json", &seq)?;
    Ok(Output::Files { bundle, out: a.out.out.clone() })
}

pub fn synth(run: &mut Run, a: &SynthArgs) -> Result<Output> {
    let cfg: SynthConfig = match &a.config {
        Some(path) => run.inputs.json(path).context("generator config")?,
        None => {
            let mut cfg = SynthConfig::new(a.services, a.versions, a.edge_prob, a.seed);
            cfg.persistence = a.persistence;
            for ev in a.hub.iter().chain(&a.clique).chain(&a.split).chain(&a.state_switch) {
                cfg = cfg.with_event(ev.clone());
            }
            cfg
        }
    };
    run.seed = Some(cfg.seed);
    run.param("config", &cfg);
    let (seq, truth) = synth_evolution::<f64>(&cfg)?;
    let mut bundle = Bundle::new(&a.out.out);
    bundle.json("snapshots.json", &seq)?;
    bundle.json("ground_truth.json", &truth)?;
    if let Some(requests) = a.requests {
        run.param("requests", requests);
        run.param("max_depth", a.max_depth);
        let stream = synth_traces(&seq, requests, a.max_depth, cfg.seed)?;
        bundle.json("stream.json", &stream)?;
    }
    Ok(Output::Files { bundle, out: a.out.out.clone() })
}
