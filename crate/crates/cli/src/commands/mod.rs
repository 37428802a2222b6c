// SPDX-License-Identifier: Apache-2.0

mod analyses;
mod detect;
mod ingest;

use std::collections::BTreeMap;
use std::io::Write as _;

use anyhow::Result;
use serde::Serialize;
use serde_json::Value;

use crate::args::Command;
use crate::io::{Bundle, Inputs};

/// Recorded verbatim next to every output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub subcommand: String,
    /// Input path → SHA-256 of its content.
    pub inputs: BTreeMap<String, String>,
    pub parameters: BTreeMap<String, Value>,
    pub output_dir: Option<String>,
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
}

/// What a command produced: files for the output directory, or text for stdout.
pub enum Output {
    Files { bundle: Bundle, out: std::path::PathBuf },
    Stdout(Vec<u8>),
}

pub struct Run {
    pub inputs: Inputs,
    pub parameters: BTreeMap<String, Value>,
    pub seed: Option<u64>,
}

impl Run {
    fn new() -> Self {
        Self { inputs: Inputs::default(), parameters: BTreeMap::new(), seed: None }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.parameters.insert(key.to_owned(), v);
    }
}

pub fn execute(command: &Command) -> Result<()> {
    let mut run = Run::new();
    let output = match command {
        Command::IngestTraces(a) => ingest::traces(&mut run, a)?,
        Command::IngestReleases(a) => ingest::releases(&mut run, a)?,
        Command::Synth(a) => ingest::synth(&mut run, a)?,
        Command::Centrality(a) => analyses::centrality(&mut run, a)?,
        Command::KatzStream(a) => analyses::katz(&mut run, a)?,
        Command::Communities(a) => analyses::communities(&mut run, a)?,
        Command::Sis(a) => analyses::sis(&mut run, a)?,
        Command::States(a) => analyses::states(&mut run, a)?,
        Command::Cliques(a) => analyses::cliques(&mut run, a)?,
        Command::Detect(a) => detect::detect(&mut run, a)?,
        Command::Report(a) => detect::report(&mut run, a)?,
    };
    match output {
        Output::Stdout(bytes) => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()?;
        }
        Output::Files { mut bundle, out } => {
            let name = command.name();
            let manifest = RunManifest {
                tool: "msnet".into(),
                tool_version: env!("CARGO_PKG_VERSION").into(),
                subcommand: name.into(),
                inputs: run.inputs.seen,
                parameters: run.parameters,
                output_dir: Some(out.display().to_string()),
                seed: run.seed,
                outputs: bundle.names(),
            };
            bundle.json(&format!("manifest.{name}.json"), &manifest)?;
            bundle.commit()?;
        }
    }
    Ok(())
}
