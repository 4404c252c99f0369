//! The on-disk model format.
//!
//! A trained model is a single versioned JSON document carrying the encoder
//! configuration, the stored exemplar patterns with their labels, the full
//! weight matrix (as rows, for readability) and the bias vector. Loading
//! re-validates every structural invariant — symmetry, zero diagonal,
//! dimensions, label rules — so a hand-edited file cannot smuggle an
//! inconsistent network past the constructor. Serialisation is
//! deterministic: saving a loaded model reproduces the file byte for byte.

use std::path::Path;

use hopcall_core::{EncoderConfig, HopfieldModel, StoredPattern};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The only format version this build reads and writes.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFileV1 {
    format_version: u32,
    encoder: EncoderConfig,
    stored: Vec<StoredPattern>,
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

/// Serialises a model to its canonical JSON text (pretty-printed, trailing
/// newline).
pub fn model_to_json(model: &HopfieldModel) -> String {
    let n = model.n_neurons();
    let file = ModelFileV1 {
        format_version: MODEL_FORMAT_VERSION,
        encoder: *model.encoder_config(),
        stored: model.stored().to_vec(),
        weights: model
            .weights_row_major()
            .chunks_exact(n)
            .map(|row| row.to_vec())
            .collect(),
        bias: model.bias().to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("model serialisation is infallible");
    text.push('\n');
    text
}

/// Parses and fully re-validates a model from JSON text.
pub fn model_from_json(text: &str) -> Result<HopfieldModel, ModelFileError> {
    let file: ModelFileV1 = serde_json::from_str(text)?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(ModelFileError::UnsupportedVersion {
            found: file.format_version,
            supported: MODEL_FORMAT_VERSION,
        });
    }
    let n = file.encoder.n_neurons();
    if file.weights.len() != n || file.weights.iter().any(|row| row.len() != n) {
        return Err(ModelFileError::Malformed {
            reason: format!("the weight matrix must be {n} rows of {n} values"),
        });
    }
    let weights: Vec<f64> = file.weights.into_iter().flatten().collect();
    Ok(HopfieldModel::from_parts(
        weights,
        file.bias,
        file.stored,
        file.encoder,
    )?)
}

/// Writes a model file.
pub fn save_model(path: &Path, model: &HopfieldModel) -> Result<(), ModelFileError> {
    std::fs::write(path, model_to_json(model)).map_err(|source| ModelFileError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads and validates a model file.
pub fn load_model(path: &Path) -> Result<HopfieldModel, ModelFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ModelFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    model_from_json(&text)
}

/// Failures while reading or writing model files.
#[derive(Debug, Error)]
pub enum ModelFileError {
    /// The file is not the JSON shape this format defines.
    #[error("model file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    /// A version this build does not understand.
    #[error("model file has format version {found}; this build reads version {supported}")]
    UnsupportedVersion {
        /// Version found in the file.
        found: u32,
        /// Version this build supports.
        supported: u32,
    },
    /// Structurally wrong payload (jagged matrix, wrong row count).
    #[error("malformed model file: {reason}")]
    Malformed {
        /// What was wrong.
        reason: String,
    },
    /// The payload parsed but violates a network invariant.
    #[error("model file failed validation: {0}")]
    Invalid(#[from] hopcall_core::hopfield::HopfieldError),
    /// Filesystem failure.
    #[error("{path}: {source}")]
    Io {
        /// Offending file.
        path: String,
        /// The OS-level error.
        source: std::io::Error,
    },
}
