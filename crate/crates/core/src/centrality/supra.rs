// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{union_connectivity, SnapshotSequence};
use crate::scalar::Scalar;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Row sum of the uniform rank-one term added to the supra-matrix.
pub const PERTURBATION: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SupraCentralityResult<S = f64> {
    /// `joint[t][i]`: share of node `i` in layer `t`; sums to 1 overall.
    pub joint: Vec<Vec<S>>,
    pub marginal_node: Vec<S>,
    pub marginal_layer: Vec<S>,
    /// `joint` normalized per layer.
    pub conditional: Vec<Vec<S>>,
    pub omega: S,
    pub iterations: usize,
    pub residual: S,
}

impl<S: Scalar> SupraCentralityResult<S> {
    pub fn layers(&self) -> usize {
        self.joint.len()
    }

    pub fn nodes(&self) -> usize {
        self.marginal_node.len()
    }

    /// Node with the largest marginal centrality (lowest id on ties).
    pub fn top_node(&self) -> Option<usize> {
        let mut best: Option<(usize, S)> = None;
        for (i, &x) in self.marginal_node.iter().enumerate() {
            if best.is_none_or(|(_, b)| x > b) {
                best = Some((i, x));
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Dominant eigenvector of the chain-coupled supra-matrix of symmetrized layers.
///
/// Layer `t` contributes the block `A⁽ᵗ⁾ + A⁽ᵗ⁾ᵀ`; copies of node `i` in
/// adjacent layers are coupled with weight `omega`. The uniform term
/// `PERTURBATION / (N·T) · 11ᵀ` makes the eigenvector unique. Power iteration runs on
/// the matrix shifted by half its largest row sum, which leaves the
/// eigenvector unchanged and keeps bipartite spectra from oscillating.
/// Iteration stops once both the L1 step and its extrapolated distance to
/// the fixed point fall below `tol`.
pub fn supra_centrality<S: Scalar>(
    seq: &SnapshotSequence<S>,
    omega: S,
    tol: S,
    max_iter: usize,
) -> Result<SupraCentralityResult<S>> {
    let t_layers = seq.len();
    let n = seq.node_count();
    if t_layers == 0 || n == 0 {
        return Err(Error::InvalidArgument("supra centrality needs T ≥ 1 and N ≥ 1".into()));
    }
    if !(omega > S::zero()) || !omega.is_finite() {
        return Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")));
    }
    if !(tol > S::zero()) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let comps = union_connectivity(seq);
    if !comps.is_connected() {
        return Err(Error::Disconnected { components: comps.count });
    }

    let blocks: Vec<Vec<S>> = seq.layers().iter().map(|l| l.symmetrized()).collect();
    let size = n * t_layers;
    let delta = S::of(PERTURBATION) / S::of_usize(n * t_layers);

    let mut max_row = S::zero();
    for (t, block) in blocks.iter().enumerate() {
        let coupling = omega * S::of_usize(usize::from(t > 0) + usize::from(t + 1 < t_layers));
        for i in 0..n {
            let row: S = block[i * n..(i + 1) * n].iter().copied().sum();
            max_row = max_row.max(row + coupling);
        }
    }
    let shift = (max_row + delta * S::of_usize(size)) / S::of(2.0);

    let mut x = vec![S::one() / S::of_usize(size); size];
    let mut next = vec![S::zero(); size];
    let mut residual = S::infinity();
    let mut converged = false;
    // below this the step size is roundoff and the contraction estimate is noise
    let floor = S::epsilon() * S::of_usize(size);
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mass: S = x.iter().copied().sum();
        for t in 0..t_layers {
            let block = &blocks[t];
            let base = t * n;
            for i in 0..n {
                let row = &block[i * n..(i + 1) * n];
                let mut acc = S::zero();
                for (j, &a) in row.iter().enumerate() {
                    if a != S::zero() {
                        acc += a * x[base + j];
                    }
                }
                if t > 0 {
                    acc += omega * x[base - n + i];
                }
                if t + 1 < t_layers {
                    acc += omega * x[base + n + i];
                }
                next[base + i] = acc + delta * mass + shift * x[base + i];
            }
        }
        let norm: S = next.iter().copied().sum();
        let previous = residual;
        residual = S::zero();
        for (xi, yi) in x.iter_mut().zip(&next) {
            let y = *yi / norm;
            residual += (y - *xi).abs();
            *xi = y;
        }
        // distance to the fixed point, extrapolated from the contraction rate
        let rate = residual / previous;
        let remaining = if rate < S::one() { residual * rate / (S::one() - rate) } else { S::infinity() };
        if residual < tol && (remaining < tol || residual <= floor) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged {
            iterations,
            residual: residual.as_f64(),
        });
    }

    let total: S = x.iter().copied().sum();
    let joint: Vec<Vec<S>> = x.chunks(n).map(|row| row.iter().map(|&v| v / total).collect()).collect();
    let marginal_layer: Vec<S> = joint.iter().map(|row| row.iter().copied().sum()).collect();
    let marginal_node: Vec<S> = (0..n).map(|i| joint.iter().map(|row| row[i]).sum()).collect();
    let conditional = joint
        .iter()
        .zip(&marginal_layer)
        .map(|(row, &sum)| {
            if sum > S::zero() {
                row.iter().map(|&v| v / sum).collect()
            } else {
                vec![S::zero(); n]
            }
        })
        .collect();
    Ok(SupraCentralityResult {
        joint,
        marginal_node,
        marginal_layer,
        conditional,
        omega,
        iterations,
        residual,
    })
}
