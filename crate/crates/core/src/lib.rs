//! If-then commonsense atlas toolkit.
//!
//! The crate is organised by pipeline stage:
//!
//! * [`atlas`]: the nine-dimension taxonomy, typed triples, the deduplicated
//!   graph, statistics and the canonical file formats.
//! * [`ingest`]: event normalization, argument blanking, coreference vote
//!   filtering and leakage-free train/dev/test bucketing.
//! * [`seq2seq`]: GRU encoder-decoders with encoder sharing that follows the
//!   relation hierarchy, trained with hand-written backpropagation.
//! * [`generate`]: beam search and the nearest-neighbor retrieval baseline.
//! * [`eval`]: top-k BLEU-2 with empty-annotation filtering and the
//!   human-judgment sheet workflow.
//! * [`overlap`]: dimension-to-relation mapping against an external knowledge
//!   base, triple overlap and event coverage.

pub mod atlas;
pub mod eval;
pub mod generate;
pub mod ingest;
pub mod overlap;
pub mod seq2seq;

pub use atlas::{AtlasError, AtlasGraph, Dimension, Split, Triple};
