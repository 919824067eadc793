//! Triangulation documents.
//!
//! ```json
//! { "name": "S2", "vertices": 4, "top_simplices": [[0, 1, 2], ...],
//!   "orientation_signs": [1, -1, ...], "boundary_marked": false }
//! ```
//!
//! `orientation_signs` is optional (propagated from the first simplex when
//! absent). Schema problems are reported with a JSON pointer.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use sapc_core::simplicial::ComplexError;
use sapc_core::{OrientedManifoldComplex, SimplicialComplex};
use serde_json::Value;
use thiserror::Error;

/// Environment variable naming the directory of shipped triangulations.
pub const CORPUS_ENV: &str = "SAPC_CORPUS_DIR";

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot find input `{0}` (looked in the working directory and the corpus directory)")]
    NotFound(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: not valid JSON: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{}: at `{pointer}`: {message}", path.display())]
    Schema { path: PathBuf, pointer: String, message: String },
    #[error("{}: at `{pointer}`: {source}", path.display())]
    Complex { path: PathBuf, pointer: String, source: ComplexError },
}

impl InputError {
    /// JSON pointer of the offending value, when the error has one.
    pub fn pointer(&self) -> Option<&str> {
        match self {
            InputError::Schema { pointer, .. } | InputError::Complex { pointer, .. } => Some(pointer),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub name: String,
    pub vertices: usize,
    pub top_simplices: Vec<Vec<i64>>,
    pub orientation_signs: Option<Vec<i64>>,
    pub boundary_marked: bool,
    pub path: PathBuf,
}

/// Directory holding the shipped corpus: `$SAPC_CORPUS_DIR`, else the
/// `corpus/` directory of the source tree.
pub fn corpus_dir() -> PathBuf {
    match env::var_os(CORPUS_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus"),
    }
}

/// An existing path as given, else the same name (with or without `.json`)
/// inside the corpus directory.
pub fn resolve(input: &str) -> Result<PathBuf, InputError> {
    let direct = PathBuf::from(input);
    if direct.is_file() {
        return Ok(direct);
    }
    let dir = corpus_dir();
    for candidate in [dir.join(input), dir.join(format!("{input}.json"))] {
        if candidate.is_file() {
            return Ok(candidate);
        }
    }
    Err(InputError::NotFound(input.to_string()))
}

pub fn load(input: &str) -> Result<Document, InputError> {
    let path = resolve(input)?;
    let text = fs::read_to_string(&path).map_err(|source| InputError::Io { path: path.clone(), source })?;
    parse_document(&text, &path)
}

pub fn parse_document(text: &str, path: &Path) -> Result<Document, InputError> {
    let value: Value = serde_json::from_str(text).map_err(|source| InputError::Json { path: path.into(), source })?;
    let schema = |pointer: &str, message: &str| InputError::Schema {
        path: path.into(),
        pointer: pointer.into(),
        message: message.into(),
    };
    let obj = value.as_object().ok_or_else(|| schema("", "expected an object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "name" | "vertices" | "top_simplices" | "orientation_signs" | "boundary_marked") {
            return Err(schema(&format!("/{}", escape(key)), "unknown field"));
        }
    }
    let name = match obj.get("name") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(schema("/name", "expected a string")),
        None => return Err(schema("/name", "missing required field")),
    };
    let vertices = match obj.get("vertices") {
        Some(v) => v.as_u64().ok_or_else(|| schema("/vertices", "expected a non-negative integer"))? as usize,
        None => return Err(schema("/vertices", "missing required field")),
    };
    let tops = match obj.get("top_simplices") {
        Some(Value::Array(a)) => a,
        Some(_) => return Err(schema("/top_simplices", "expected an array")),
        None => return Err(schema("/top_simplices", "missing required field")),
    };
    if tops.is_empty() {
        return Err(schema("/top_simplices", "expected at least one simplex"));
    }
    let mut top_simplices = Vec::with_capacity(tops.len());
    for (i, t) in tops.iter().enumerate() {
        let row = t.as_array().ok_or_else(|| schema(&format!("/top_simplices/{i}"), "expected an array"))?;
        if row.is_empty() {
            return Err(schema(&format!("/top_simplices/{i}"), "empty simplex"));
        }
        let mut s = Vec::with_capacity(row.len());
        for (j, v) in row.iter().enumerate() {
            let p = format!("/top_simplices/{i}/{j}");
            let v = v.as_i64().ok_or_else(|| schema(&p, "expected an integer"))?;
            if v < 0 || v as u64 >= vertices as u64 {
                return Err(schema(&p, &format!("vertex {v} outside 0..{vertices}")));
            }
            s.push(v);
        }
        top_simplices.push(s);
    }
    let orientation_signs = match obj.get("orientation_signs") {
        None | Some(Value::Null) => None,
        Some(Value::Array(a)) => {
            if a.len() != top_simplices.len() {
                return Err(schema(
                    "/orientation_signs",
                    &format!("expected {} signs, found {}", top_simplices.len(), a.len()),
                ));
            }
            let mut signs = Vec::with_capacity(a.len());
            for (i, v) in a.iter().enumerate() {
                match v.as_i64() {
                    Some(s @ (1 | -1)) => signs.push(s),
                    _ => return Err(schema(&format!("/orientation_signs/{i}"), "expected 1 or -1")),
                }
            }
            Some(signs)
        }
        Some(_) => return Err(schema("/orientation_signs", "expected an array")),
    };
    let boundary_marked = match obj.get("boundary_marked") {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(schema("/boundary_marked", "expected a boolean")),
    };
    Ok(Document { name, vertices, top_simplices, orientation_signs, boundary_marked, path: path.into() })
}

/// Escapes a key for use inside a JSON pointer.
fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

impl Document {
    fn complex_error(&self, source: ComplexError) -> InputError {
        let pointer = match &source {
            ComplexError::SignCount { .. } => "/orientation_signs".to_string(),
            ComplexError::BadSign { index, .. } => format!("/orientation_signs/{index}"),
            ComplexError::InconsistentOrientation { .. } if self.orientation_signs.is_some() => {
                "/orientation_signs".to_string()
            }
            ComplexError::NonManifoldLink { .. } if !self.boundary_marked => "/boundary_marked".to_string(),
            _ => "/top_simplices".to_string(),
        };
        InputError::Complex { path: self.path.clone(), pointer, source }
    }

    /// The underlying simplicial complex, with no orientation requirements.
    pub fn complex(&self) -> Result<SimplicialComplex, InputError> {
        let tops: Vec<Vec<u32>> = self.top_simplices.iter().map(|t| t.iter().map(|&v| v as u32).collect()).collect();
        SimplicialComplex::from_maximal(self.vertices, &tops).map_err(|e| self.complex_error(e))
    }

    /// The oriented manifold (with boundary when `boundary_marked`).
    pub fn manifold(&self) -> Result<OrientedManifoldComplex, InputError> {
        OrientedManifoldComplex::from_top_simplices(
            &self.name,
            self.vertices,
            &self.top_simplices,
            self.orientation_signs.as_deref(),
            self.boundary_marked,
        )
        .map_err(|e| self.complex_error(e))
    }
}
