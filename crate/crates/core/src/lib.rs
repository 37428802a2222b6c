// SPDX-License-Identifier: Apache-2.0

//! Temporal network analyses for microservice systems.
//!
//! Two representations are supported: per-release [`SnapshotSequence`]s and
//! timestamped trace-call [`ContactStream`]s. On top of them the crate offers
//! supra-adjacency and streaming Katz centrality, tensor-factorization
//! communities, SIS spreading, state detection, Δ-clique mining, and
//! detectors that turn those results into degradation findings.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`.

pub mod centrality;
pub mod cliques;
pub mod communities;
pub mod detect;
pub mod epidemics;
mod error;
pub mod graph;
pub mod ingest;
pub mod linalg;
mod scalar;
pub mod states;

pub use error::{Error, Result};
pub use graph::{
    union_connectivity, windowed_snapshots, Components, Contact, ContactStream, NodeId, NodeRegistry, Snapshot,
    SnapshotSequence, Timestamp,
};
pub use scalar::Scalar;

pub type Stream = ContactStream<f64>;
pub type Snapshots = SnapshotSequence<f64>;
pub type Layer = Snapshot<f64>;
pub type SupraCentrality = centrality::SupraCentralityResult<f64>;
pub type Katz = centrality::KatzState<f64>;
pub type Factors = communities::TensorFactors<f64>;
pub type SisConfig = epidemics::SisConfig<f64>;
pub type SisTrajectory = epidemics::SisTrajectory<f64>;
pub type Distances = states::DistanceMatrix<f64>;

pub type Stream32 = ContactStream<f32>;
pub type Snapshots32 = SnapshotSequence<f32>;
pub type SupraCentrality32 = centrality::SupraCentralityResult<f32>;
