//! Run manifests and CSV output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Full precision, 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    /// SHA-256 of the deterministic fields: command, parameters, seeds,
    /// input hash and tool version.
    pub hash: String,
    pub command: String,
    pub parameters: Value,
    pub seeds: Vec<u64>,
    pub input_sha256: String,
    pub tool_version: String,
    pub threads: usize,
    pub wall_time_s: f64,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
    pub results: Value,
}

impl RunManifest {
    pub fn new(
        command: &str,
        parameters: Value,
        seeds: Vec<u64>,
        input: &[u8],
        threads: usize,
    ) -> Self {
        let input_sha256 = sha256_hex(input);
        // serde_json maps are ordered, so this serialization is canonical
        let core = json!({
            "command": command,
            "parameters": parameters,
            "seeds": seeds,
            "input_sha256": input_sha256,
            "tool_version": TOOL_VERSION,
        });
        let hash = sha256_hex(&serde_json::to_vec(&core).expect("json serializes"));
        Self {
            hash,
            command: command.to_string(),
            parameters,
            seeds,
            input_sha256,
            tool_version: TOOL_VERSION.to_string(),
            threads,
            wall_time_s: 0.0,
            warnings: Vec::new(),
            outputs: Vec::new(),
            results: Value::Null,
        }
    }
}

/// Where a run writes its files: `<dir>/<stem>.<command>.<ext>`.
pub struct OutputSet {
    dir: PathBuf,
    prefix: String,
    pub manifest: RunManifest,
}

impl OutputSet {
    pub fn new(dir: &Path, stem: &str, manifest: RunManifest) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
        let prefix = format!("{stem}.{}", manifest.command);
        Ok(Self {
            dir: dir.to_path_buf(),
            prefix,
            manifest,
        })
    }

    fn path(&mut self, suffix: &str) -> PathBuf {
        let name = format!("{}{suffix}", self.prefix);
        self.manifest.outputs.push(name.clone());
        self.dir.join(name)
    }

    /// CSV writer whose first lines are `#` comments naming the manifest
    /// hash, followed by `extra` comments.
    pub fn csv(
        &mut self,
        suffix: &str,
        extra: &[String],
    ) -> Result<csv::Writer<BufWriter<File>>, CliError> {
        let path = self.path(suffix);
        let mut w = BufWriter::new(create(&path)?);
        let io = |e: std::io::Error| CliError::Input(format!("writing {}: {e}", path.display()));
        writeln!(w, "# manifest {}", self.manifest.hash).map_err(io)?;
        for line in extra {
            writeln!(w, "# {line}").map_err(io)?;
        }
        Ok(csv::Writer::from_writer(w))
    }

    /// JSON data file carrying the manifest hash.
    pub fn json(&mut self, suffix: &str, mut body: Value) -> Result<(), CliError> {
        if let Value::Object(m) = &mut body {
            m.insert("manifest".into(), Value::String(self.manifest.hash.clone()));
        }
        let path = self.path(suffix);
        write_json(&path, &body)
    }

    pub fn finish(mut self, wall_time_s: f64) -> Result<PathBuf, CliError> {
        self.manifest.wall_time_s = wall_time_s;
        let path = self.dir.join(format!("{}.manifest.json", self.prefix));
        write_json(&path, &self.manifest)?;
        Ok(path)
    }
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    std::fs::write(path, s).map_err(|e| CliError::Input(format!("writing {}: {e}", path.display())))
}

pub fn flush<W: Write>(mut w: csv::Writer<W>) -> Result<(), CliError> {
    w.flush()
        .map_err(|e| CliError::Input(format!("writing csv: {e}")))
}
