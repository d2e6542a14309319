//! JSON documents shared by the library and the command line.
//!
//! Scalars are `"num/den"` strings. Parse failures report the JSON path of
//! the offending field together with line and column.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};
use crate::reductions::{ChainGeneratingSet, SingleSystemGeneratingSet};
use crate::scalar::Scalar;
use crate::verdict::BoundCheck;

/// A generating set of either shape, tagged by `"kind"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratingSet {
    Single(SingleSystemGeneratingSet),
    Chain(ChainGeneratingSet),
}

/// Ball radii a generating set was compiled with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Construction {
    pub epsilon: Scalar,
    pub epsilon_prime: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<BoundCheck>,
}

/// A generating set document, optionally recording its construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratingSetDocument {
    #[serde(flatten)]
    pub set: GeneratingSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<Construction>,
}

pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        GptError::Parse(format!(
            "at `{path}` (line {}, column {}): {inner}",
            inner.line(),
            inner.column()
        ))
    })?;
    de.end().map_err(|e| GptError::Parse(e.to_string()))?;
    Ok(value)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| GptError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    from_json_str(&text).map_err(|e| match e {
        GptError::Parse(m) => GptError::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)).map_err(|e| GptError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
