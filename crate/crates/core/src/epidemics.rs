// SPDX-License-Identifier: Apache-2.0

//! Discrete-time SIS spreading over a snapshot sequence.
//!
//! Every random decision is drawn from a per-step stream that does not
//! depend on the epidemic state: step `k` uses the ChaCha stream `k` of the
//! run seed, consuming `N²` infection draws (row-major over infector,
//! target) followed by `N` recovery draws. Runs with equal seeds therefore
//! share their random numbers across parameter values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, SnapshotSequence};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SisConfig<S = f64> {
    /// Per-contact infection probability.
    pub beta_inf: S,
    /// Per-step recovery probability.
    pub mu: S,
    pub seeds: Vec<NodeId>,
    pub steps_per_layer: usize,
    /// Spread only along call direction instead of both ways.
    #[serde(default)]
    pub directed: bool,
    pub rng_seed: u64,
}

impl<S: Scalar> SisConfig<S> {
    pub fn new(beta_inf: S, mu: S, seeds: Vec<NodeId>, steps_per_layer: usize, rng_seed: u64) -> Self {
        Self { beta_inf, mu, seeds, steps_per_layer, directed: false, rng_seed }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let prob = |p: S| p >= S::zero() && p <= S::one();
        if !prob(self.beta_inf) || !prob(self.mu) {
            return Err(Error::InvalidArgument("beta_inf and mu must lie in [0, 1]".into()));
        }
        if self.steps_per_layer == 0 {
            return Err(Error::InvalidArgument("steps_per_layer must be positive".into()));
        }
        if let Some(bad) = self.seeds.iter().find(|&&s| s >= n) {
            return Err(Error::InvalidArgument(format!("seed node {bad} outside registry of {n}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SisTrajectory<S = f64> {
    pub initial: Vec<bool>,
    /// Infected flags after each global step.
    pub infected: Vec<Vec<bool>>,
    pub prevalence: Vec<S>,
}

impl<S: Scalar> SisTrajectory<S> {
    pub fn steps(&self) -> usize {
        self.infected.len()
    }

    pub fn final_prevalence(&self) -> S {
        self.prevalence.last().copied().unwrap_or_else(S::zero)
    }
}

fn prevalence<S: Scalar>(state: &[bool]) -> S {
    S::of_usize(state.iter().filter(|&&x| x).count()) / S::of_usize(state.len())
}

pub fn sis_run<S: Scalar>(seq: &SnapshotSequence<S>, cfg: &SisConfig<S>) -> Result<SisTrajectory<S>> {
    let n = seq.node_count();
    if n == 0 {
        return Err(Error::InvalidArgument("SIS needs at least one node".into()));
    }
    cfg.validate(n)?;
    let mut state = vec![false; n];
    for &s in &cfg.seeds {
        state[s] = true;
    }
    let initial = state.clone();
    let spare = S::one() - cfg.beta_inf;
    let mu = cfg.mu.as_f64();
    let total = seq.len() * cfg.steps_per_layer;
    let mut infected = Vec::with_capacity(total);
    let mut prev = Vec::with_capacity(total);
    let mut draws = vec![0.0f64; n * n];
    let mut recover = vec![0.0f64; n];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

    for step in 0..total {
        let layer = seq.layer(step / cfg.steps_per_layer);
        rng.set_stream(step as u64);
        rng.set_word_pos(0);
        draws.iter_mut().for_each(|d| *d = rng.gen());
        recover.iter_mut().for_each(|d| *d = rng.gen());

        let mut next = state.clone();
        for u in (0..n).filter(|&u| state[u]) {
            for v in (0..n).filter(|&v| !state[v]) {
                let w = if cfg.directed {
                    layer.weight(u, v)
                } else {
                    layer.weight(u, v) + layer.weight(v, u)
                };
                if w > S::zero() {
                    let p = S::one() - spare.powf(w);
                    if draws[u * n + v] < p.as_f64() {
                        next[v] = true;
                    }
                }
            }
        }
        for v in (0..n).filter(|&v| state[v]) {
            if recover[v] < mu {
                next[v] = false;
            }
        }
        state = next;
        prev.push(prevalence(&state));
        infected.push(state.clone());
    }
    Ok(SisTrajectory { initial, infected, prevalence: prev })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct PrevalenceStats<S = f64> {
    pub runs: usize,
    pub mean: Vec<S>,
    /// Sample standard deviation; zero for a single run.
    pub stddev: Vec<S>,
}

/// Runs `n_runs` simulations with seeds `rng_seed + k` and aggregates prevalence.
pub fn sis_ensemble<S: Scalar>(seq: &SnapshotSequence<S>, cfg: &SisConfig<S>, n_runs: usize) -> Result<PrevalenceStats<S>> {
    if n_runs == 0 {
        return Err(Error::InvalidArgument("n_runs must be at least 1".into()));
    }
    let runs: Vec<SisTrajectory<S>> = (0..n_runs as u64)
        .into_par_iter()
        .map(|k| {
            let cfg = SisConfig { rng_seed: cfg.rng_seed.wrapping_add(k), ..cfg.clone() };
            sis_run(seq, &cfg)
        })
        .collect::<Result<_>>()?;
    let steps = runs[0].steps();
    let count = S::of_usize(n_runs);
    let mut mean = vec![S::zero(); steps];
    for run in &runs {
        for (m, &p) in mean.iter_mut().zip(&run.prevalence) {
            *m += p;
        }
    }
    mean.iter_mut().for_each(|m| *m /= count);
    let mut stddev = vec![S::zero(); steps];
    if n_runs > 1 {
        for run in &runs {
            for ((s, &p), &m) in stddev.iter_mut().zip(&run.prevalence).zip(&mean) {
                *s += (p - m) * (p - m);
            }
        }
        let dof = S::of_usize(n_runs - 1);
        stddev.iter_mut().for_each(|s| *s = (*s / dof).sqrt());
    }
    Ok(PrevalenceStats { runs: n_runs, mean, stddev })
}
