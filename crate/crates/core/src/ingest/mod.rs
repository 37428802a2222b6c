// SPDX-License-Identifier: Apache-2.0

//! Readers for trace span dumps and release manifests, plus synthetic
//! evolving systems with planted ground truth.

mod releases;
mod spans;
mod synth;

pub use releases::{parse_releases, ReleaseManifest, VersionEntry};
pub use spans::{parse_spans, ParsedSpans, SpanRecord};
pub use synth::{
    synth_evolution, synth_traces, GroundTruth, PlantedClique, PlantedEvent, PlantedSplit,
    SynthConfig, VersionRange, DEFAULT_PERSISTENCE,
};
