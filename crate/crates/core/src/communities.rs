// SPDX-License-Identifier: Apache-2.0

//! Temporal community detection by nonnegative CP factorization of the
//! node × node × time adjacency tensor.
//!
//! Each rank-one component `a_r ∘ b_r ∘ c_r` is a community: `a_r` weighs its
//! callers, `b_r` its callees and `c_r` its activity in each layer, so a
//! community may be active in non-consecutive layers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, SnapshotSequence};
use crate::scalar::Scalar;

pub const DEFAULT_MAX_ITER: usize = 500;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_RESTARTS: usize = 5;
const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Row-major `rows × rank` nonnegative matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Factor<S = f64> {
    pub rows: usize,
    pub rank: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> Factor<S> {
    pub fn zeros(rows: usize, rank: usize) -> Self {
        Self { rows, rank, data: vec![S::zero(); rows * rank] }
    }

    fn random(rows: usize, rank: usize, rng: &mut ChaCha8Rng) -> Self {
        // (0, 1): gen::<f64>() is in [0, 1), and 0 would freeze the entry
        let data = (0..rows * rank).map(|_| S::of(1.0 - rng.gen::<f64>())).collect();
        Self { rows, rank, data }
    }

    #[inline]
    pub fn get(&self, row: usize, r: usize) -> S {
        self.data[row * self.rank + r]
    }

    pub fn column(&self, r: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, r)).collect()
    }

    fn column_max(&self, r: usize) -> S {
        (0..self.rows).map(|i| self.get(i, r)).fold(S::zero(), S::max)
    }

    /// `FᵀF`, `rank × rank`.
    fn gram(&self) -> Vec<S> {
        let k = self.rank;
        let mut g = vec![S::zero(); k * k];
        for row in self.data.chunks(k) {
            for p in 0..k {
                for q in 0..k {
                    g[p * k + q] += row[p] * row[q];
                }
            }
        }
        g
    }

    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, self.rank);
        for (i, &p) in perm.iter().enumerate() {
            out.data[p * self.rank..(p + 1) * self.rank]
                .copy_from_slice(&self.data[i * self.rank..(i + 1) * self.rank]);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct TensorFactors<S = f64> {
    pub rank: usize,
    pub out_factor: Factor<S>,
    pub in_factor: Factor<S>,
    pub time_factor: Factor<S>,
    /// Squared Frobenius reconstruction error after each iteration.
    pub objective_trace: Vec<S>,
    pub seed: u64,
}

impl<S: Scalar> TensorFactors<S> {
    /// Uniform-random (0, 1) starting point drawn from `seed`.
    pub fn random_init(nodes: usize, layers: usize, rank: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            rank,
            out_factor: Factor::random(nodes, rank, &mut rng),
            in_factor: Factor::random(nodes, rank, &mut rng),
            time_factor: Factor::random(layers, rank, &mut rng),
            objective_trace: Vec::new(),
            seed,
        }
    }

    pub fn objective(&self) -> S {
        self.objective_trace.last().copied().unwrap_or_else(S::infinity)
    }

    pub fn reconstruct(&self, i: usize, j: usize, t: usize) -> S {
        (0..self.rank)
            .map(|r| self.out_factor.get(i, r) * self.in_factor.get(j, r) * self.time_factor.get(t, r))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NtfOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for NtfOptions {
    fn default() -> Self {
        Self { max_iter: DEFAULT_MAX_ITER, tol: DEFAULT_TOL }
    }
}

/// Dense `N × N × T` tensor, index `(t·N + i)·N + j`.
struct Tensor<S> {
    n: usize,
    t: usize,
    data: Vec<S>,
}

impl<S: Scalar> Tensor<S> {
    fn from_sequence(seq: &SnapshotSequence<S>) -> Self {
        let mut data = Vec::with_capacity(seq.node_count() * seq.node_count() * seq.len());
        for layer in seq.layers() {
            data.extend_from_slice(layer.as_slice());
        }
        Self { n: seq.node_count(), t: seq.len(), data }
    }

    fn norm_sq(&self) -> S {
        self.data.iter().map(|&x| x * x).sum()
    }
}

/// Squared Frobenius distance between the tensor and its reconstruction.
fn objective<S: Scalar>(x: &Tensor<S>, f: &TensorFactors<S>) -> S {
    let (n, k) = (x.n, f.rank);
    let mut err = S::zero();
    let mut ac = vec![S::zero(); k];
    for t in 0..x.t {
        for i in 0..n {
            for (r, v) in ac.iter_mut().enumerate() {
                *v = f.out_factor.get(i, r) * f.time_factor.get(t, r);
            }
            let row = &x.data[(t * n + i) * n..(t * n + i + 1) * n];
            for (j, &obs) in row.iter().enumerate() {
                let mut est = S::zero();
                for (r, &v) in ac.iter().enumerate() {
                    est += v * f.in_factor.get(j, r);
                }
                let d = obs - est;
                err += d * d;
            }
        }
    }
    err
}

/// `X₍mode₎ · (Khatri–Rao of the other two factors)` for each mode.
fn mttkrp<S: Scalar>(x: &Tensor<S>, f: &TensorFactors<S>, mode: usize) -> Factor<S> {
    let (n, k) = (x.n, f.rank);
    let rows = if mode == 2 { x.t } else { n };
    let mut out = Factor::zeros(rows, k);
    for t in 0..x.t {
        for i in 0..n {
            let row = &x.data[(t * n + i) * n..(t * n + i + 1) * n];
            for (j, &obs) in row.iter().enumerate() {
                if obs == S::zero() {
                    continue;
                }
                for r in 0..k {
                    let (target, value) = match mode {
                        0 => (i, f.in_factor.get(j, r) * f.time_factor.get(t, r)),
                        1 => (j, f.out_factor.get(i, r) * f.time_factor.get(t, r)),
                        _ => (t, f.out_factor.get(i, r) * f.in_factor.get(j, r)),
                    };
                    out.data[target * k + r] += obs * value;
                }
            }
        }
    }
    out
}

fn multiplicative_step<S: Scalar>(factor: &mut Factor<S>, numerator: &Factor<S>, gram: &[S]) {
    let k = factor.rank;
    let floor = S::of(DENOMINATOR_FLOOR);
    for row in 0..factor.rows {
        let current: Vec<S> = factor.data[row * k..(row + 1) * k].to_vec();
        for r in 0..k {
            let denom: S = (0..k).map(|q| current[q] * gram[q * k + r]).sum();
            factor.data[row * k + r] = current[r] * numerator.get(row, r) / denom.max(floor);
        }
    }
}

fn hadamard<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(&x, &y)| x * y).collect()
}

fn check_rank<S: Scalar>(seq: &SnapshotSequence<S>, rank: usize) -> Result<()> {
    if seq.is_empty() {
        return Err(Error::InvalidArgument("factorization needs T ≥ 1".into()));
    }
    if rank == 0 || rank > seq.node_count() * seq.len() {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} must lie in [1, N·T = {}]",
            seq.node_count() * seq.len()
        )));
    }
    Ok(())
}

/// Lee–Seung multiplicative updates from the given starting factors.
pub fn ntf_factorize_from<S: Scalar>(
    seq: &SnapshotSequence<S>,
    init: TensorFactors<S>,
    opts: NtfOptions,
) -> Result<TensorFactors<S>> {
    check_rank(seq, init.rank)?;
    let (n, t) = (seq.node_count(), seq.len());
    if init.out_factor.rows != n || init.in_factor.rows != n || init.time_factor.rows != t {
        return Err(Error::InvalidArgument("initial factors do not match the tensor shape".into()));
    }
    let x = Tensor::from_sequence(seq);
    let scale = x.norm_sq();
    let tol = S::of(opts.tol);
    let mut f = init;
    f.objective_trace.clear();
    for _ in 0..opts.max_iter.max(1) {
        let num = mttkrp(&x, &f, 0);
        let gram = hadamard(&f.in_factor.gram(), &f.time_factor.gram());
        multiplicative_step(&mut f.out_factor, &num, &gram);

        let num = mttkrp(&x, &f, 1);
        let gram = hadamard(&f.out_factor.gram(), &f.time_factor.gram());
        multiplicative_step(&mut f.in_factor, &num, &gram);

        let num = mttkrp(&x, &f, 2);
        let gram = hadamard(&f.out_factor.gram(), &f.in_factor.gram());
        multiplicative_step(&mut f.time_factor, &num, &gram);

        let obj = objective(&x, &f);
        let prev = f.objective_trace.last().copied();
        f.objective_trace.push(obj);
        // exact fit to working precision; further steps only shuffle roundoff
        if obj <= scale * S::epsilon() {
            break;
        }
        if let Some(prev) = prev {
            let improvement = (prev - obj) / prev.max(scale * S::epsilon());
            if improvement < tol {
                break;
            }
        }
    }
    normalize_columns(&mut f);
    Ok(f)
}

/// Rescales node columns to unit maximum, moving the scale into time activity.
fn normalize_columns<S: Scalar>(f: &mut TensorFactors<S>) {
    for r in 0..f.rank {
        let ma = f.out_factor.column_max(r);
        let mb = f.in_factor.column_max(r);
        if ma > S::zero() && mb > S::zero() {
            for i in 0..f.out_factor.rows {
                f.out_factor.data[i * f.rank + r] /= ma;
                f.in_factor.data[i * f.rank + r] /= mb;
            }
            for t in 0..f.time_factor.rows {
                f.time_factor.data[t * f.rank + r] *= ma * mb;
            }
        }
    }
}

pub fn ntf_factorize<S: Scalar>(
    seq: &SnapshotSequence<S>,
    rank: usize,
    opts: NtfOptions,
    seed: u64,
) -> Result<TensorFactors<S>> {
    check_rank(seq, rank)?;
    let init = TensorFactors::random_init(seq.node_count(), seq.len(), rank, seed);
    ntf_factorize_from(seq, init, opts)
}

/// Runs restarts with seeds `seed, seed+1, …` in parallel.
///
/// Returns every run in seed order and the index of the best one (lowest
/// objective, lowest seed on ties).
pub fn ntf_restarts<S: Scalar>(
    seq: &SnapshotSequence<S>,
    rank: usize,
    opts: NtfOptions,
    seed: u64,
    restarts: usize,
) -> Result<(Vec<TensorFactors<S>>, usize)> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    let runs: Vec<TensorFactors<S>> = (0..restarts as u64)
        .into_par_iter()
        .map(|k| ntf_factorize(seq, rank, opts, seed.wrapping_add(k)))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (k, run) in runs.iter().enumerate() {
        if run.objective() < runs[best].objective() {
            best = k;
        }
    }
    Ok((runs, best))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Community {
    pub members: Vec<NodeId>,
    pub active_layers: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityAssignment {
    pub communities: Vec<Community>,
    pub node_threshold: f64,
    pub time_threshold: f64,
}

/// Thresholds each factor column relative to its maximum.
pub fn assign_communities<S: Scalar>(
    factors: &TensorFactors<S>,
    node_threshold: f64,
    time_threshold: f64,
) -> Result<CommunityAssignment> {
    let valid = |x: f64| x > 0.0 && x <= 1.0;
    if !valid(node_threshold) || !valid(time_threshold) {
        return Err(Error::InvalidArgument("thresholds must lie in (0, 1]".into()));
    }
    let communities = (0..factors.rank)
        .map(|r| {
            let nodes = factors.out_factor.rows;
            let strength: Vec<S> = (0..nodes)
                .map(|i| factors.out_factor.get(i, r).max(factors.in_factor.get(i, r)))
                .collect();
            let top = strength.iter().copied().fold(S::zero(), S::max);
            let cut = S::of(node_threshold) * top;
            let members = (0..nodes).filter(|&i| top > S::zero() && strength[i] >= cut).collect();

            let top_t = factors.time_factor.column_max(r);
            let cut_t = S::of(time_threshold) * top_t;
            let active_layers = (0..factors.time_factor.rows)
                .filter(|&t| top_t > S::zero() && factors.time_factor.get(t, r) >= cut_t)
                .collect();
            Community { members, active_layers }
        })
        .collect();
    Ok(CommunityAssignment { communities, node_threshold, time_threshold })
}
