// SPDX-License-Identifier: Apache-2.0

//! Byte-stable serialization and all-or-nothing output bundles.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use msnet::detect::fingerprint;
use msnet::ingest::parse_spans;
use msnet::{Snapshots, Stream};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    // Value's map is ordered by key
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

pub fn to_csv<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))
}

/// Outputs are staged in memory and written only once everything succeeded.
pub struct Bundle {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Bundle {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), files: Vec::new() }
    }

    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_owned(), bytes));
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let bytes = to_json(value)?;
        self.add(name, bytes);
        Ok(())
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Writes every file to a temporary sibling, then renames them into place.
    pub fn commit(self) -> Result<()> {
        fs::create_dir_all(&self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        let pid = std::process::id();
        let mut staged = Vec::new();
        for (name, bytes) in &self.files {
            let tmp = self.dir.join(format!(".{name}.{pid}.tmp"));
            if let Err(e) = fs::write(&tmp, bytes) {
                for (t, _) in &staged {
                    let _ = fs::remove_file(t);
                }
                let _ = fs::remove_file(&tmp);
                return Err(e).with_context(|| format!("writing {}", tmp.display()));
            }
            staged.push((tmp, self.dir.join(name)));
        }
        for (tmp, dst) in staged {
            fs::rename(&tmp, &dst).with_context(|| format!("renaming into {}", dst.display()))?;
        }
        Ok(())
    }
}

/// Reads inputs and remembers their fingerprints for the run manifest.
#[derive(Default)]
pub struct Inputs {
    pub seen: BTreeMap<String, String>,
}

impl Inputs {
    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.seen.insert(path.display().to_string(), fingerprint(&bytes));
        Ok(bytes)
    }

    pub fn read_text(&mut self, path: &Path) -> Result<String> {
        let bytes = self.read(path)?;
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    pub fn json<T: DeserializeOwned>(&mut self, path: &Path) -> Result<T> {
        let text = self.read_text(path)?;
        parse_json(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn snapshots(&mut self, input: &Path) -> Result<Snapshots> {
        self.json(&resolve(input, "snapshots.json"))
    }

    /// A `.jsonl` file is parsed as spans; anything else as a stream document.
    pub fn stream(&mut self, input: &Path) -> Result<Stream> {
        let path = resolve(input, "stream.json");
        if path.extension().is_some_and(|e| e == "jsonl") {
            let text = self.read_text(&path)?;
            return Ok(parse_spans(&text)?.stream);
        }
        self.json(&path)
    }
}

/// Malformed documents surface as `msnet::Error::Parse` so they map to exit code 1.
fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| anyhow::Error::new(msnet::Error::Parse { line: e.line(), message: e.to_string() }))
}

/// A directory input resolves to its default artifact.
pub fn resolve(input: &Path, default_name: &str) -> PathBuf {
    if input.is_dir() {
        input.join(default_name)
    } else {
        input.to_path_buf()
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}
