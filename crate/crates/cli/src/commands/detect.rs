// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use msnet::cliques::{CliqueReport, DeltaClique};
use msnet::detect::{
    default_theta, detect_bottleneck, detect_cycles, detect_intimacy, detect_state_anomaly, fingerprint, Report,
    CENTRALITY_ARTIFACT, CLIQUES_ARTIFACT, SNAPSHOTS_ARTIFACT, STATES_ARTIFACT,
};
use msnet::states::StateLabeling;
use msnet::{NodeRegistry, Snapshots};
use serde::de::DeserializeOwned;

use super::analyses::{CentralityDoc, CliquesDoc};
use super::{Output, Run};
use crate::args::{DetectArgs, ReportArgs};
use crate::io::{resolve, Bundle};

fn load<T: DeserializeOwned>(run: &mut Run, dir: &Path, name: &str, hashes: &mut BTreeMap<String, String>) -> Result<Option<T>> {
    let path = dir.join(name);
    if !path.exists() {
        return Ok(None);
    }
    let bytes = run.inputs.read(&path)?;
    hashes.insert(name.to_owned(), fingerprint(&bytes));
    let value = serde_json::from_slice(&bytes)
        .map_err(|e| msnet::Error::Parse { line: e.line(), message: e.to_string() })
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(Some(value))
}

fn clique_report(doc: &CliquesDoc) -> Result<CliqueReport> {
    let registry = NodeRegistry::from_names(doc.nodes.iter().cloned())?;
    let cliques = doc
        .cliques
        .iter()
        .map(|c| {
            let mut members = c
                .members
                .iter()
                .map(|m| registry.id(m).ok_or_else(|| msnet::Error::Validation(format!("unknown clique member {m:?}"))))
                .collect::<msnet::Result<Vec<_>>>()?;
            members.sort_unstable();
            Ok(DeltaClique { members, b: c.b, e: c.e, delta: c.delta })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CliqueReport { delta: doc.delta, cliques })
}

pub fn detect(run: &mut Run, a: &DetectArgs) -> Result<Output> {
    if !a.input.is_dir() {
        bail!(msnet::Error::InvalidArgument(format!("{} is not an artifact directory", a.input.display())));
    }
    let mut hashes = BTreeMap::new();
    let centrality: Option<CentralityDoc> = load(run, &a.input, CENTRALITY_ARTIFACT, &mut hashes)?;
    let snapshots: Option<Snapshots> = load(run, &a.input, SNAPSHOTS_ARTIFACT, &mut hashes)?;
    let cliques: Option<CliquesDoc> = load(run, &a.input, CLIQUES_ARTIFACT, &mut hashes)?;
    let states: Option<StateLabeling> = load(run, &a.input, STATES_ARTIFACT, &mut hashes)?;
    if hashes.is_empty() {
        bail!(msnet::Error::InvalidArgument(format!("no analysis artifacts found in {}", a.input.display())));
    }

    let nodes: Vec<String> = centrality
        .as_ref()
        .map(|c| c.nodes.clone())
        .or_else(|| snapshots.as_ref().map(|s| s.registry().names().to_vec()))
        .or_else(|| cliques.as_ref().map(|c| c.nodes.clone()))
        .unwrap_or_default();

    let mut params: BTreeMap<String, serde_json::Value> = BTreeMap::new();
    let mut findings = Vec::new();
    if let Some(doc) = &centrality {
        let theta = a.theta.unwrap_or_else(|| default_theta(doc.result.nodes()));
        params.insert("theta".into(), theta.into());
        params.insert("min_slope".into(), a.min_slope.into());
        findings.extend(detect_bottleneck(&doc.result, theta, a.min_slope)?);
    }
    if let Some(seq) = &snapshots {
        findings.extend(detect_cycles(&seq.aggregate()));
    }
    if let Some(doc) = &cliques {
        params.insert("min_size".into(), a.min_size.into());
        params.insert("min_fraction".into(), a.min_fraction.into());
        let span = match (doc.first_time, doc.last_time) {
            (Some(f), Some(l)) => l - f,
            _ => 0,
        };
        if span > 0 {
            findings.extend(detect_intimacy(&clique_report(doc)?, span, a.min_size, a.min_fraction)?);
        } else {
            log::warn!("clique stream has no time extent; intimacy detection skipped");
        }
    }
    if let Some(labels) = &states {
        params.insert("max_minority_fraction".into(), a.max_minority.into());
        findings.extend(detect_state_anomaly(labels, a.max_minority)?);
    }
    for (k, v) in &params {
        run.parameters.insert(k.clone(), v.clone());
    }
    let report = Report::new(hashes, params, nodes, findings);
    let mut bundle = Bundle::new(&a.out.out);
    bundle.json("report.json", &report)?;
    Ok(Output::Files { bundle, out: a.out.out.clone() })
}

pub fn report(run: &mut Run, a: &ReportArgs) -> Result<Output> {
    let report: Report = run.inputs.json(&resolve(&a.input, "report.json"))?;
    let mut bundle = Bundle::new(&a.out.out);
    bundle.add("report.txt", report.render_text().into_bytes());
    Ok(Output::Files { bundle, out: a.out.out.clone() })
}
