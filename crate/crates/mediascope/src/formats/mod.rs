//! On-disk formats: tweet streams, training corpora, rule tables, the
//! gazetteer, the media roster and versioned model containers.
//!
//! Readers take any [`BufRead`]; the `*_file` helpers open a path and attach
//! it to errors.

mod corpus;
mod gazetteer;
mod model;
mod roster;
mod tables;
mod tweets;

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};

pub use corpus::{read_labeled_corpus, read_tagged_corpus, write_labeled_corpus, write_tagged_corpus, LabeledDoc};
pub use gazetteer::{read_gazetteer, GazetteerLoad};
pub use model::{load_model, save_model, ModelKind, MODEL_FORMAT_VERSION};
pub use roster::{flag_unknown_media, read_roster, write_roster, RosterEntry};
pub use tables::{read_exceptions, read_frequency_list, read_lemmatizer, read_rules};
pub use tweets::{parse_tweet_stream, write_tweet_stream, TweetLine, TweetStream};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: Box<FormatError> },
}

impl FormatError {
    fn line(line: usize, message: impl Into<String>) -> Self {
        FormatError::Line { line, message: message.into() }
    }

    /// True when the underlying cause is an I/O failure rather than bad data.
    pub fn is_io(&self) -> bool {
        match self {
            FormatError::Io(_) => true,
            FormatError::File { source, .. } => source.is_io(),
            _ => false,
        }
    }
}

/// Recoverable problem with one input line.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LineWarning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for LineWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Opens `path` and runs `read` on it, tagging any error with the path.
pub fn read_file<T>(path: &Path, read: impl FnOnce(BufReader<File>) -> Result<T, FormatError>) -> Result<T, FormatError> {
    let wrap = |source: FormatError| FormatError::File { path: path.to_path_buf(), source: Box::new(source) };
    let file = File::open(path).map_err(|e| wrap(e.into()))?;
    read(BufReader::new(file)).map_err(wrap)
}

/// Numbered lines, skipping blanks and `#` comments.
fn data_lines(reader: impl BufRead) -> impl Iterator<Item = Result<(usize, String), FormatError>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(e.into())),
        Ok(l) if l.trim().is_empty() || l.starts_with('#') => None,
        Ok(l) => Some(Ok((i + 1, l))),
    })
}
