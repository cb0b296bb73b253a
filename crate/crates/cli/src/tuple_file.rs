//! JSON file format for matrix tuples.
//!
//! ```json
//! { "n": 2, "N": 2, "name": "diagpair",
//!   "matrices": [ [[[1,0],[0,0]], [[0,0],[0,0]]],
//!                 [[[0,0],[0,0]], [[0,0],[1,0]]] ],
//!   "expected_properties": { "hermitian": true, "hyperbolic": true } }
//! ```
//!
//! Each entry is a `[re, im]` pair and matrices are listed row by row.

use std::path::Path;

use serde::{Deserialize, Serialize};
use weylscope::examples;
use weylscope::linalg::{c64, CMat};
use weylscope::pencil::{HyperbolicityReport, HyperbolicityVerdict};
use weylscope::MatrixTuple;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedProperties {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hermitian: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperbolic: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleFile {
    pub n: usize,
    #[serde(rename = "N")]
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_properties: Option<ExpectedProperties>,
}

impl TupleFile {
    /// Parses and validates the shape. Serde reports line and column for
    /// syntax and type errors; shape errors name the offending field.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let file: Self =
            serde_json::from_str(text).map_err(|e| CliError::Input(format!("tuple file: {e}")))?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("tuple file serializes");
        s.push('\n');
        s
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Input(format!("tuple file: {msg}")));
        if self.n == 0 || self.dim == 0 {
            return bad("n and N must be positive".into());
        }
        if self.matrices.len() != self.n {
            return bad(format!(
                "matrices: expected n = {} matrices, found {}",
                self.n,
                self.matrices.len()
            ));
        }
        for (j, m) in self.matrices.iter().enumerate() {
            if m.len() != self.dim {
                return bad(format!(
                    "matrices[{j}]: expected N = {} rows, found {}",
                    self.dim,
                    m.len()
                ));
            }
            for (r, row) in m.iter().enumerate() {
                if row.len() != self.dim {
                    return bad(format!(
                        "matrices[{j}][{r}]: expected N = {} entries, found {}",
                        self.dim,
                        row.len()
                    ));
                }
                if let Some(c) = row
                    .iter()
                    .position(|z| !z[0].is_finite() || !z[1].is_finite())
                {
                    return bad(format!("matrices[{j}][{r}][{c}]: entry is not finite"));
                }
            }
        }
        Ok(())
    }

    pub fn to_tuple(&self) -> Result<MatrixTuple, CliError> {
        self.validate()?;
        let mats = self
            .matrices
            .iter()
            .map(|m| CMat::from_fn(self.dim, self.dim, |i, k| c64(m[i][k][0], m[i][k][1])))
            .collect();
        let t = MatrixTuple::new(mats).map_err(|e| CliError::Input(format!("tuple file: {e}")))?;
        Ok(match &self.name {
            Some(name) => t.with_name(name.clone()),
            None => t,
        })
    }

    pub fn from_tuple(a: &MatrixTuple, expected: Option<ExpectedProperties>) -> Self {
        let matrices = a
            .matrices()
            .iter()
            .map(|m| {
                (0..m.nrows())
                    .map(|i| {
                        (0..m.ncols())
                            .map(|k| [m[(i, k)].re, m[(i, k)].im])
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self {
            n: a.n(),
            dim: a.dim(),
            name: a.name().map(str::to_owned),
            matrices,
            expected_properties: expected,
        }
    }

    /// Disagreements between `expected_properties` and what was computed.
    /// An inconclusive hyperbolicity check is consistent with `true` since
    /// sampling can never prove hyperbolicity of a non-hermitian tuple.
    pub fn property_mismatches(
        &self,
        a: &MatrixTuple,
        report: Option<&HyperbolicityReport>,
    ) -> Vec<String> {
        let mut out = Vec::new();
        let Some(exp) = self.expected_properties else {
            return out;
        };
        if let Some(h) = exp.hermitian {
            if h != a.is_hermitian() {
                out.push(format!(
                    "expected_properties.hermitian is {h} but the matrices are{} hermitian",
                    if a.is_hermitian() { "" } else { " not" }
                ));
            }
        }
        if let (Some(h), Some(r)) = (exp.hyperbolic, report) {
            let consistent = match r.verdict {
                HyperbolicityVerdict::Hyperbolic => h,
                HyperbolicityVerdict::NotHyperbolic => !h,
                HyperbolicityVerdict::Inconclusive => h,
            };
            if !consistent {
                out.push(format!(
                    "expected_properties.hyperbolic is {h} but the check says {:?}",
                    r.verdict
                ));
            }
        }
        out
    }
}

/// A tuple together with where it came from.
pub struct LoadedTuple {
    pub tuple: MatrixTuple,
    pub file: TupleFile,
    /// Stem used for output file names.
    pub stem: String,
    /// Bytes hashed into the manifest: the file contents, or the canonical
    /// serialization for builtins.
    pub source_bytes: Vec<u8>,
    pub warnings: Vec<String>,
}

/// Reads a tuple file, or a builtin given as `builtin:pauli`,
/// `builtin:pauli2(a1,a2)` and so on.
pub fn load_tuple(source: &str) -> Result<LoadedTuple, CliError> {
    let (file, stem, bytes) = match source.strip_prefix("builtin:") {
        Some(spec) => {
            let a = builtin_tuple(spec)?;
            let file = TupleFile::from_tuple(&a, None);
            let stem = a.name().unwrap_or("builtin").to_string();
            let bytes = file.to_json().into_bytes();
            (file, stem, bytes)
        }
        None => {
            let path = Path::new(source);
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {source}: {e}")))?;
            let file = TupleFile::from_json(&text).map_err(|e| match e {
                CliError::Input(m) => CliError::Input(format!("{source}: {m}")),
                other => other,
            })?;
            let stem = file.name.clone().unwrap_or_else(|| {
                path.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "tuple".into())
            });
            (file, stem, text.into_bytes())
        }
    };
    let tuple = file.to_tuple()?;
    let warnings = file.property_mismatches(&tuple, None);
    Ok(LoadedTuple {
        tuple,
        file,
        stem,
        source_bytes: bytes,
        warnings,
    })
}

fn builtin_tuple(spec: &str) -> Result<MatrixTuple, CliError> {
    let (name, args) = match spec.split_once('(') {
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| CliError::Usage(format!("builtin:{spec}: missing ')'")))?;
            (name, crate::parse_floats(inner)?)
        }
        None => (spec, Vec::new()),
    };
    let no_args = |t: MatrixTuple| {
        if args.is_empty() {
            Ok(t)
        } else {
            Err(CliError::Usage(format!(
                "builtin:{name} takes no parameters"
            )))
        }
    };
    match name {
        "pauli" => no_args(examples::pauli()),
        "pauli_pair" => no_args(examples::pauli_pair()),
        "diagpair" => no_args(examples::diagpair()),
        "nilpair" => no_args(examples::nilpair()),
        "example63" => no_args(examples::example63()),
        "pauli2" => match args.as_slice() {
            [a1, a2] => Ok(examples::pauli2([*a1, *a2])),
            _ => Err(CliError::Usage("builtin:pauli2 needs two parameters a1,a2".into())),
        },
        _ => Err(CliError::Usage(format!(
            "unknown builtin tuple '{name}'; known: pauli, pauli_pair, diagpair, nilpair, example63, pauli2(a1,a2)"
        ))),
    }
}
