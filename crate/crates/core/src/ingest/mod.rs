//! Turning raw event phrases and annotation dumps into normalized events and
//! split-labelled triples.

mod blanking;
mod coref;
mod normalize;
mod split;

pub use blanking::{blank_infrequent_args, parse_frequency_tables, CorpusSource, FrequencyTable};
pub use coref::{filter_coref_combinations, parse_coref_votes, CorefVoteRecord, MAX_COREF_WORKERS};
pub use normalize::{normalize_event, NameLexicon};
pub use split::{content_key, split_events, SplitAssignment, SplitRatios};

use std::collections::BTreeSet;

use thiserror::Error;

use crate::atlas::AtlasError;

/// The default stopword list used to find content words.
pub const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{found} distinct people in {raw:?}; at most three person variables exist")]
    TooManyPeople { raw: String, found: usize },
    #[error("{0} valid votes but only {MAX_COREF_WORKERS} workers judge each combination")]
    TooManyVotes(u8),
    #[error("no verb token in event {0:?}")]
    NoVerb(String),
    #[error("blank threshold must be at least 1")]
    BadThreshold,
    #[error("split ratios must be non-negative and sum to 1, got {0:?}")]
    BadRatios([f64; 3]),
    #[error("only {groups} content-key groups; every split has a positive ratio so at least 3 are needed")]
    TooFewGroups { groups: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Atlas(#[from] AtlasError),
}

/// A set of lowercase words loaded from a one-token-per-line file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordSet(BTreeSet<String>);

impl WordSet {
    pub fn parse(text: &str) -> Self {
        Self(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_lowercase).collect())
    }

    pub fn default_stopwords() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<S> for WordSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self(iter.into_iter().map(|s| s.as_ref().to_lowercase()).collect())
    }
}
