// SPDX-License-Identifier: Apache-2.0

//! Temporal centrality: batch supra-adjacency eigenvector centrality over
//! snapshot sequences and online temporal Katz centrality over contact streams.

mod katz;
mod supra;

pub use katz::{katz_fold, katz_oracle, katz_oracle_bounded, katz_query, katz_update, KatzState, KATZ_ORACLE_MAX_CONTACTS};
pub use supra::{supra_centrality, SupraCentralityResult, DEFAULT_MAX_ITER, DEFAULT_TOL, PERTURBATION};
