//! GRU encoder-decoders trained from scratch in double precision.
//!
//! An event is read by a bidirectional encoder whose final states are bridged
//! into the initial state of a per-dimension decoder. Variants differ only in
//! which dimensions share an encoder; see [`encoder_grouping`].

mod checkpoint;
mod config;
mod embeddings;
mod gradcheck;
mod gru;
mod model;
mod tensor;
mod train;
mod vocab;

pub use checkpoint::{
    checkpoint_bytes, load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, Checkpoint, FORMAT_VERSION,
    MAGIC,
};
pub use config::{encoder_grouping, ModelConfig, Variant};
pub use embeddings::{apply_embeddings, parse_embeddings, StaticEmbeddings};
pub use gradcheck::{gradient_check, perturb_biases, random_instance, relative_error, GradCheckReport, MIN_SAMPLES, RELATIVE_FLOOR};
pub use gru::{GruCell, GruStep};
pub use model::{DecoderParams, EncoderParams, ModelParams, TrainingInstance};
pub use tensor::{log_sum_exp, sigmoid, softmax, Matrix};
pub use train::{batch_gradient, build_instances, train, Adam, Trainer};
pub use vocab::{build_vocab, detokenize, tokenize, VocabularyMap, BOS, EOS, PAD, RESERVED, UNK};

use crate::atlas::Dimension;

#[derive(Debug, thiserror::Error)]
pub enum Seq2SeqError {
    #[error("cannot encode an empty sequence")]
    EmptySequence,
    #[error("unknown encoder {0:?}")]
    UnknownEncoder(String),
    #[error("dimension {0} is not modelled by this variant")]
    UnsupportedDimension(Dimension),
    #[error("token id {id} outside vocabulary of {vocab}")]
    TokenOutOfRange { id: u32, vocab: usize },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("invalid training instance: {0}")]
    BadInstance(String),
    #[error("invalid vocabulary: {0}")]
    BadVocabulary(String),
    #[error("non-finite loss {loss} in epoch {epoch}, batch {batch}")]
    NonFinite { epoch: usize, batch: usize, loss: f64 },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("embedding file line {line}: {message}")]
    Embeddings { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
