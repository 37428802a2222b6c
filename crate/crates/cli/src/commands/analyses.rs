// SPDX-License-Identifier: Apache-2.0

use anyhow::{bail, Result};
use msnet::centrality::{katz_fold, supra_centrality};
use msnet::cliques::delta_cliques;
use msnet::communities::{assign_communities, ntf_restarts, NtfOptions};
use msnet::epidemics::sis_ensemble;
use msnet::states::{cluster_states, distance_matrix, silhouette};
use msnet::{NodeRegistry, SisConfig};
use serde::{Deserialize, Serialize};

use super::{Output, Run};
use crate::args::{CentralityArgs, CliquesArgs, CommunitiesArgs, KatzArgs, SisArgs, StatesArgs};
use crate::io::{fmt_f64, to_csv, Bundle};
use crate::plot::{emit_plot, Series};

const PLOTTED_NODES: usize = 5;

#[derive(Serialize, Deserialize)]
pub struct CentralityDoc {
    pub nodes: Vec<String>,
    #[serde(flatten)]
    pub result: msnet::SupraCentrality,
}

pub fn centrality(run: &mut Run, a: &CentralityArgs) -> Result<Output> {
    let seq = run.inputs.snapshots(&a.input)?;
    run.param("omega", a.omega);
    run.param("tol", a.tol);
    run.param("max_iter", a.max_iter);
    let result = supra_centrality(&seq, a.omega, a.tol, a.max_iter)?;
    let names = seq.registry().names();

    let mut rows = Vec::new();
    for (t, (joint, cond)) in result.joint.iter().zip(&result.conditional).enumerate() {
        for (i, name) in names.iter().enumerate() {
            rows.push(vec![name.clone(), t.to_string(), fmt_f64(joint[i]), fmt_f64(cond[i])]);
        }
    }
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&x, &y| result.marginal_node[y].total_cmp(&result.marginal_node[x]).then(x.cmp(&y)));
    let series: Vec<Series> = order
        .iter()
        .take(PLOTTED_NODES)
        .map(|&i| Series::new(names[i].clone(), result.conditional.iter().map(|row| row[i]).collect()))
        .collect();

    let mut bundle = Bundle::new(&a.out.out);
    bundle.add("centrality.csv", to_csv(&["node", "layer", "joint", "conditional"], rows)?);
    bundle.add(
        "centrality.svg",
        emit_plot("Conditional centrality", "layer", "Z", &series)?.into_bytes(),
    );
    bundle.json("centrality.json", &CentralityDoc { nodes: names.to_vec(), result })?;
    Ok(Output::Files { bundle, out: a.out.out.clone() })
}

pub fn katz(run: &mut Run, a: &KatzArgs) -> Result<Output> {
    let stream = run.inputs.stream(&a.input)?;
    let state = katz_fold(&stream, a.beta, a.decay)?;
    let at = a.query_at.unwrap_or_else(|| stream.last_time().unwrap_or(0));
    run.param("beta", a.beta);
    run.param("c", a.decay);
    run.param("query_at", at);
    let scores = state.scores_at(at)?;
    let rows = stream
        .registry()
        .names()
        .iter()
        .zip(&scores)
        .map(|(name, &s)| vec![name.clone(), fmt_f64(s)]);
    let csv = to_csv(&["node", "score"], rows)?;
    match &a.out {
        None => Ok(Output::Stdout(csv)),
        Some(out) => {
            let mut bundle = Bundle::new(out);
            bundle.add("katz.csv", csv);
            Ok(Output::Files { bundle, out: out.clone() })
        }
    }
}

pub fn communities(run: &mut Run, a: &CommunitiesArgs) -> Result<Output> {
    let seq = run.inputs.snapshots(&a.input)?;
    let opts = NtfOptions { max_iter: a.max_iter, tol: a.tol };
    run.seed = Some(a.seed);
    run.param("rank", a.rank);
    run.param("restarts", a.restarts);
    run.param("options", opts);
    run.param("node_threshold", a.node_threshold);
    run.param("time_threshold", a.time_threshold);
    let (runs, best) = ntf_restarts(&seq, a.rank, opts, a.seed, a.restarts)?;
    let factors = &runs[best];
    let assignment = assign_communities(factors, a.node_threshold, a.time_threshold)?;
    let names = seq.registry().names();
    let named: Vec<_> = assignment
        .communities
        .iter()
        .map(|c| {
            serde_json::json!({
                "members": c.members.iter().map(|&i| names[i].clone()).collect::<Vec<_>>(),
                "member_ids": c.members,
                "active_layers": c.active_layers,
            })
        })
        .collect();
    let doc = serde_json::json!({
        "nodes": names,
        "best_seed": factors.seed,
        "restart_objectives": runs.iter().map(|r| r.objective()).collect::<Vec<_>>(),
        "factors": factors,
        "communities": named,
        "node_threshold": a.node_threshold,
        "time_threshold": a.time_threshold,
    });

    let header: Vec<String> = std::iter::once("layer".to_owned())
        .chain((0..a.rank).map(|r| format!("community_{r}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = (0..seq.len()).map(|t| {
        std::iter::once(t.to_string())
            .chain((0..a.rank).map(|r| fmt_f64(factors.time_factor.get(t, r))))
            .collect::<Vec<_>>()
    });
    let series: Vec<Series> = (0..a.rank)
        .map(|r| Series::new(format!("community {r}"), factors.time_factor.column(r)))
        .collect();

    let mut bundle = Bundle::new(&a.out.out);
    bundle.json("communities.json", &doc)?;
    bundle.add("time_factor.csv", to_csv(&header, rows)?);
    bundle.add(
        "communities.svg",
        emit_plot("Community activity", "layer", "time factor", &series)?.into_bytes(),
    );
    Ok(Output::Files { bundle, out: a.out.out.clone() })
}

fn resolve_nodes(registry: &NodeRegistry, given: &[String]) -> Result<Vec<usize>> {
    given
        .iter()
        .map(|s| match registry.id(s) {
            Some(id) => Ok(id),
            None => match s.parse::<usize>() {
                Ok(id) if id < registry.len() => Ok(id),
                _ => Err(msnet::Error::InvalidArgument(format!("unknown service {s:?}")).into()),
            },
        })
        .collect()
}

pub fn sis(run: &mut Run, a: &SisArgs) -> Result<Output> {
    let seq = run.inputs.snapshots(&a.input)?;
    let seeds = resolve_nodes(seq.registry(), &a.seeds)?;
    let mut cfg = SisConfig::new(a.beta, a.mu, seeds, a.steps_per_layer, a.seed);
    cfg.directed = a.directed;
    run.seed = Some(a.seed);
    run.param("config", &cfg);
    run.param("runs", a.runs);
    let stats = sis_ensemble(&seq, &cfg, a.runs)?;
    let rows = stats
        .mean
        .iter()
        .zip(&stats.stddev)
        .enumerate()
        .map(|(k, (m, s))| vec![(k + 1).to_string(), fmt_f64(*m), fmt_f64(*s)]);
    let mut bundle = Bundle::new(&a.out.out);
    bundle.add("sis.csv", to_csv(&["step", "mean_prevalence", "stddev"], rows)?);
    bundle.add(
        "sis.svg",
        emit_plot("SIS prevalence", "step", "prevalence", &[Series::new("mean", stats.mean.clone())])?.into_bytes(),
    );
    bundle.json("sis.json", &serde_json::json!({ "config": cfg, "stats": stats }))?;
    Ok(Output::Files { bundle, out: a.out.out.clone() })
}

pub fn states(run: &mut Run, a: &StatesArgs) -> Result<Output> {
    let seq = run.inputs.snapshots(&a.input)?;
    run.param("metric", a.metric);
    run.param("k", a.k);
    if let Some(k) = a.k {
        if k == 0 || k > seq.len() {
            bail!(msnet::Error::InvalidArgument(format!("K={k} must lie in [1, T={}]", seq.len())));
        }
    }
    let d = distance_matrix(&seq, a.metric)?;
    let labeling = cluster_states(&d, a.k)?;
    let header: Vec<String> = std::iter::once("layer".to_owned()).chain((0..d.size).map(|t| t.to_string())).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = d
        .rows()
        .into_iter()
        .enumerate()
        .map(|(t, row)| std::iter::once(t.to_string()).chain(row.into_iter().map(fmt_f64)).collect::<Vec<_>>());
    let mut bundle = Bundle::new(&a.out.out);
    bundle.add("distances.csv", to_csv(&header, rows)?);
    bundle.json(
        "states.json",
        &serde_json::json!({
            "labels": labeling.labels,
            "K": labeling.k,
            "change_points": labeling.change_points,
            "metric": a.metric,
            "silhouette": silhouette(&d, &labeling),
        }),
    )?;
    Ok(Output::Files { bundle, out: a.out.out.clone() })
}

#[derive(Serialize, Deserialize)]
pub struct NamedClique {
    pub members: Vec<String>,
    pub b: u64,
    pub e: u64,
    pub delta: u64,
}

#[derive(Serialize, Deserialize)]
pub struct CliquesDoc {
    pub delta: u64,
    pub nodes: Vec<String>,
    pub first_time: Option<u64>,
    pub last_time: Option<u64>,
    pub cliques: Vec<NamedClique>,
}

pub fn cliques(run: &mut Run, a: &CliquesArgs) -> Result<Output> {
    let stream = run.inputs.stream(&a.input)?;
    run.param("delta", a.delta);
    run.param("max_nodes", a.max_nodes);
    let report = delta_cliques(&stream, a.delta, a.max_nodes)?;
    let names = stream.registry().names();
    let doc = CliquesDoc {
        delta: a.delta,
        nodes: names.to_vec(),
        first_time: stream.first_time(),
        last_time: stream.last_time(),
        cliques: report
            .cliques
            .iter()
            .map(|c| NamedClique {
                members: c.members.iter().map(|&i| names[i].clone()).collect(),
                b: c.b,
                e: c.e,
                delta: c.delta,
            })
            .collect(),
    };
    let mut bundle = Bundle::new(&a.out.out);
    bundle.json("cliques.json", &doc)?;
    Ok(Output::Files { bundle, out: a.out.out.clone() })
}
