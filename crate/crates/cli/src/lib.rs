// SPDX-License-Identifier: Apache-2.0

//! File-based pipeline around the `msnet` analyses.

pub mod args;
mod commands;
pub mod io;
pub mod plot;

use std::process::ExitCode;

use clap::Parser;

pub use commands::RunManifest;

/// Exit code for analysis and input failures; usage errors exit with 2 via clap.
pub const EXIT_ANALYSIS: u8 = 1;

fn error_document(err: &anyhow::Error) -> serde_json::Value {
    let kind = err
        .chain()
        .find_map(|e| e.downcast_ref::<msnet::Error>())
        .map_or_else(
            || if err.chain().any(|e| e.is::<std::io::Error>()) { "io" } else { "error" },
            msnet::Error::kind,
        );
    let chain: Vec<String> = err.chain().map(ToString::to_string).collect();
    serde_json::json!({ "error": { "kind": kind, "message": chain.join(": ") } })
}

pub fn run() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = args::Cli::parse();
    match commands::execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", error_document(&err));
            ExitCode::from(EXIT_ANALYSIS)
        }
    }
}
