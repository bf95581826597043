use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::FormatError;

/// Current container version. Readers reject any other.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Tagger,
    Classifier,
}

impl ModelKind {
    pub fn format_name(self) -> &'static str {
        match self {
            ModelKind::Tagger => "mediascope/hmm-tagger",
            ModelKind::Classifier => "mediascope/svm-classifier",
        }
    }
}

#[derive(Serialize)]
struct ContainerOut<'a, T> {
    format: &'a str,
    version: u32,
    model: &'a T,
}

#[derive(Deserialize)]
struct ContainerIn<T> {
    format: String,
    version: u32,
    model: T,
}

/// Writes `{"format", "version", "model"}` JSON. Floats are written in
/// shortest round-trip form, so loading gives back identical values.
pub fn save_model<T: Serialize>(kind: ModelKind, model: &T, mut out: impl Write) -> Result<(), FormatError> {
    let container = ContainerOut { format: kind.format_name(), version: MODEL_FORMAT_VERSION, model };
    serde_json::to_writer(&mut out, &container).map_err(|e| FormatError::Invalid(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn load_model<T: DeserializeOwned>(kind: ModelKind, reader: impl Read) -> Result<T, FormatError> {
    let c: ContainerIn<T> = serde_json::from_reader(reader).map_err(|e| FormatError::Invalid(format!("model container: {e}")))?;
    if c.format != kind.format_name() {
        return Err(FormatError::Invalid(format!("expected a {} model, found {}", kind.format_name(), c.format)));
    }
    if c.version != MODEL_FORMAT_VERSION {
        return Err(FormatError::Invalid(format!("unsupported model version {}", c.version)));
    }
    Ok(c.model)
}
