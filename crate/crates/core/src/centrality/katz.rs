// SPDX-License-Identifier: Apache-2.0

//! Online temporal Katz centrality with lazy exponential decay.
//!
//! The score of `v` sums, over every temporal walk ending at `v` (strictly
//! increasing contact times), the product of `weight · beta` along the walk
//! times `exp(−c · (now − t_first))`. Each arriving contact `u → v` at `t`
//! adds `weight · beta · (1 + s_u(t⁻))` to `s_v`, where `s_u(t⁻)` only counts
//! walks whose last contact happened strictly before `t`.

use crate::error::{Error, Result};
use crate::graph::{Contact, ContactStream, NodeId, Timestamp};
use crate::scalar::Scalar;

/// Largest stream the walk-enumeration oracle accepts by default.
pub const KATZ_ORACLE_MAX_CONTACTS: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct KatzState<S = f64> {
    beta: S,
    decay: S,
    score: Vec<S>,
    last_update: Vec<Timestamp>,
    /// Score and time of each node before its update at `last_update`.
    before: Vec<(S, Timestamp)>,
    now: Timestamp,
}

impl<S: Scalar> KatzState<S> {
    pub fn new(nodes: usize, beta: S, decay: S) -> Result<Self> {
        if !(beta > S::zero() && beta <= S::one()) {
            return Err(Error::InvalidArgument(format!("beta must lie in (0, 1], got {beta}")));
        }
        if !(decay >= S::zero()) || !decay.is_finite() {
            return Err(Error::InvalidArgument(format!("decay rate must be ≥ 0, got {decay}")));
        }
        Ok(Self {
            beta,
            decay,
            score: vec![S::zero(); nodes],
            last_update: vec![0; nodes],
            before: vec![(S::zero(), 0); nodes],
            now: 0,
        })
    }

    pub fn beta(&self) -> S {
        self.beta
    }

    pub fn decay(&self) -> S {
        self.decay
    }

    pub fn now(&self) -> Timestamp {
        self.now
    }

    pub fn nodes(&self) -> usize {
        self.score.len()
    }

    /// Raw (undecayed) score and its last update time.
    pub fn raw(&self, node: NodeId) -> (S, Timestamp) {
        (self.score[node], self.last_update[node])
    }

    fn decayed(&self, value: S, from: Timestamp, to: Timestamp) -> S {
        if self.decay == S::zero() || value == S::zero() {
            value
        } else {
            value * (-self.decay * S::of((to - from) as f64)).exp()
        }
    }

    pub fn update(&mut self, contact: &Contact<S>) -> Result<()> {
        let t = contact.t;
        if t < self.now {
            return Err(Error::Monotonicity { now: self.now, got: t });
        }
        let (u, v) = (contact.src, contact.dst);
        if u >= self.nodes() || v >= self.nodes() {
            return Err(Error::InvalidArgument(format!("contact {u}→{v} outside state of {} nodes", self.nodes())));
        }
        let (su, tu) = if self.last_update[u] == t {
            self.before[u]
        } else {
            (self.score[u], self.last_update[u])
        };
        let incoming = self.decayed(su, tu, t);
        if self.last_update[v] < t {
            self.before[v] = (self.score[v], self.last_update[v]);
            self.score[v] = self.decayed(self.score[v], self.last_update[v], t);
            self.last_update[v] = t;
        }
        self.score[v] += contact.weight * self.beta * (S::one() + incoming);
        self.now = t;
        Ok(())
    }

    pub fn query(&self, node: NodeId, at: Timestamp) -> Result<S> {
        if at < self.now {
            return Err(Error::Monotonicity { now: self.now, got: at });
        }
        Ok(self.decayed(self.score[node], self.last_update[node], at))
    }

    pub fn scores_at(&self, at: Timestamp) -> Result<Vec<S>> {
        (0..self.nodes()).map(|v| self.query(v, at)).collect()
    }
}

pub fn katz_update<S: Scalar>(mut state: KatzState<S>, contact: &Contact<S>) -> Result<KatzState<S>> {
    state.update(contact)?;
    Ok(state)
}

pub fn katz_query<S: Scalar>(state: &KatzState<S>, node: NodeId, at: Timestamp) -> Result<S> {
    state.query(node, at)
}

/// Feeds a whole stream into a fresh state.
pub fn katz_fold<S: Scalar>(stream: &ContactStream<S>, beta: S, decay: S) -> Result<KatzState<S>> {
    let mut state = KatzState::new(stream.node_count(), beta, decay)?;
    for c in stream.contacts() {
        state.update(c)?;
    }
    Ok(state)
}

pub fn katz_oracle<S: Scalar>(stream: &ContactStream<S>, beta: S, decay: S, at: Timestamp) -> Result<Vec<S>> {
    katz_oracle_bounded(stream, beta, decay, at, KATZ_ORACLE_MAX_CONTACTS)
}

/// Sums every temporal walk explicitly. Exponential in the stream length.
pub fn katz_oracle_bounded<S: Scalar>(
    stream: &ContactStream<S>,
    beta: S,
    decay: S,
    at: Timestamp,
    max_contacts: usize,
) -> Result<Vec<S>> {
    if stream.len() > max_contacts {
        return Err(Error::TooLarge(format!(
            "{} contacts exceed the walk-enumeration bound of {max_contacts}",
            stream.len()
        )));
    }
    if let Some(last) = stream.last_time().filter(|&t| t > at) {
        return Err(Error::Monotonicity { now: last, got: at });
    }
    let contacts = stream.contacts();
    let mut out = vec![S::zero(); stream.node_count()];

    // Depth-first over walks: (index of last contact, accumulated weight).
    fn extend<S: Scalar>(contacts: &[Contact<S>], last: usize, weight: S, beta: S, factor: S, out: &mut [S]) {
        let here = contacts[last];
        out[here.dst] += weight * factor;
        for (k, next) in contacts.iter().enumerate() {
            if next.t > here.t && next.src == here.dst {
                extend(contacts, k, weight * next.weight * beta, beta, factor, out);
            }
        }
    }
    for (k, first) in contacts.iter().enumerate() {
        let factor = (-decay * S::of((at - first.t) as f64)).exp();
        extend(contacts, k, first.weight * beta, beta, factor, &mut out);
    }
    Ok(out)
}
