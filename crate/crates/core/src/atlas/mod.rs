//! Relation taxonomy, knowledge-graph data model, statistics and queries.

mod graph;
mod io;
mod phrase;
mod stats;
mod taxonomy;

pub use graph::{build_graph, sort_triples, AtlasGraph, Diagnostic, GraphTriple, Split, Triple};
pub use io::{
    atlas_tsv_string, parse_atlas, parse_atlas_jsonl, parse_atlas_tsv, read_atlas_tsv, write_atlas_jsonl,
    write_atlas_tsv,
};
pub use phrase::{
    node_key, normalize_whitespace, word_count, EventPhrase, InferenceTarget, PersonVar, BLANK, EMPTY_SENTINEL,
};
pub use stats::{graph_stats, StatsReport, WordAverage};
pub use taxonomy::{
    classify_dimension, CausalCategory, ContentType, Dimension, Subject, TaxonomyCoords, Volition,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AtlasError {
    #[error("unknown dimension {0:?}")]
    UnknownDimension(String),
    #[error("unknown split label {0:?}")]
    UnknownSplit(String),
    #[error("invalid event {text:?}: {reason}")]
    InvalidEvent { text: String, reason: String },
    #[error("empty inference target")]
    EmptyTarget,
    #[error("event {event:?} assigned to both {first} and {second}")]
    SplitConflict { event: String, first: Split, second: Split },

    #[error("line {line}: expected 5 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: unknown dimension {name:?}")]
    BadDimension { line: usize, name: String },
    #[error("line {line}: unknown split label {label:?}")]
    BadSplit { line: usize, label: String },
    #[error("line {line}: {source}")]
    BadField { line: usize, source: Box<AtlasError> },
    #[error("line {line}: malformed JSON record: {message}")]
    Json { line: usize, message: String },
    #[error("cannot write {field} {value:?} to a line-oriented file")]
    Unwritable { field: String, value: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl AtlasError {
    /// Line number for errors that came from parsing a file.
    pub fn line(&self) -> Option<usize> {
        match self {
            AtlasError::ColumnCount { line, .. }
            | AtlasError::BadDimension { line, .. }
            | AtlasError::BadSplit { line, .. }
            | AtlasError::BadField { line, .. }
            | AtlasError::Json { line, .. } => Some(*line),
            _ => None,
        }
    }
}
