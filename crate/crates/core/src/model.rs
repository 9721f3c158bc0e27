//! Binary linear model shared by the segmenter and the stylometric
//! classifier, with a versioned JSON file format.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const MODEL_FORMAT: &str = "tibtext-model";
pub const MODEL_VERSION: u32 = 1;

/// Training provenance kept alongside the weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainMeta {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

/// Sparse binary linear classifier over string-keyed features.
///
/// A non-negative score predicts the first label. Weights are kept in a
/// BTreeMap so serialization and dot products are deterministic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub labels: (String, String),
    pub weights: BTreeMap<String, f64>,
    pub bias: f64,
    pub meta: TrainMeta,
}

impl LinearModel {
    pub fn new(pos: &str, neg: &str, meta: TrainMeta) -> LinearModel {
        LinearModel {
            labels: (pos.to_string(), neg.to_string()),
            weights: BTreeMap::new(),
            bias: 0.0,
            meta,
        }
    }

    /// Signed score of a sparse feature vector.
    pub fn score<'a, I: IntoIterator<Item = (&'a str, f64)>>(&self, features: I) -> f64 {
        let mut s = self.bias;
        for (k, v) in features {
            if let Some(w) = self.weights.get(k) {
                s += w * v;
            }
        }
        s
    }

    /// Label for a score; exact zero resolves to the first label.
    pub fn label_for(&self, score: f64) -> &str {
        if score >= 0.0 {
            &self.labels.0
        } else {
            &self.labels.1
        }
    }
}

/// Serialized wrapper with format identification.
#[derive(Serialize, Deserialize)]
struct ModelFile<T> {
    format: String,
    version: u32,
    kind: String,
    #[serde(flatten)]
    payload: T,
}

pub fn save_model<T: Serialize>(path: &Path, kind: &str, payload: &T) -> Result<()> {
    let file = ModelFile {
        format: MODEL_FORMAT.to_string(),
        version: MODEL_VERSION,
        kind: kind.to_string(),
        payload,
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn load_model<T: for<'de> Deserialize<'de>>(path: &Path, kind: &str) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    let file: ModelFile<T> = serde_json::from_str(&text)?;
    if file.format != MODEL_FORMAT {
        return Err(Error::InvalidModel(format!(
            "unexpected format {:?}",
            file.format
        )));
    }
    if file.version != MODEL_VERSION {
        return Err(Error::InvalidModel(format!(
            "unsupported version {}",
            file.version
        )));
    }
    if file.kind != kind {
        return Err(Error::InvalidModel(format!(
            "model kind {:?}, expected {kind:?}",
            file.kind
        )));
    }
    Ok(file.payload)
}
