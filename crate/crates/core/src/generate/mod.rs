//! Ranked candidate inferences: beam search over trained decoders and the
//! nearest-neighbor retrieval baseline.

mod beam;
mod dump;
mod neighbor;

pub use beam::{beam_search, greedy, BeamConfig, Scored, StepModel};
pub use dump::{parse_generation_dump, write_generation_dump};
pub use neighbor::{cosine, nearest_neighbor_predict, NearestNeighborIndex};

use serde::{Deserialize, Serialize};

use crate::atlas::Dimension;
use crate::seq2seq::{ModelParams, Seq2SeqError, VocabularyMap, BOS, EOS, PAD, UNK};

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error(transparent)]
    Model(#[from] Seq2SeqError),
    #[error("generation dump line {line}: {message}")]
    Dump { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generation {
    pub text: String,
    pub score: f64,
}

/// Ranked outputs for one (event, dimension) pair, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationList {
    pub event: String,
    pub dimension: Dimension,
    pub beam_width: usize,
    pub entries: Vec<Generation>,
}

impl GenerationList {
    /// Scores non-increasing, at most `beam_width` entries, no repeated text.
    pub fn is_well_formed(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.entries.len() <= self.beam_width
            && self.entries.windows(2).all(|w| w[0].score >= w[1].score)
            && self.entries.iter().all(|e| seen.insert(e.text.as_str()) && !e.score.is_nan())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeOptions {
    pub beam_width: usize,
    pub max_len: usize,
    /// Never emit `<unk>`.
    pub suppress_unk: bool,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        Self { beam_width: 10, max_len: 16, suppress_unk: false }
    }
}

impl DecodeOptions {
    /// `<pad>` and `<bos>` are never generated; `<unk>` only when suppressed.
    pub fn beam_config(&self) -> BeamConfig {
        let mut banned = vec![PAD, BOS];
        if self.suppress_unk {
            banned.push(UNK);
        }
        BeamConfig { beam_width: self.beam_width, max_len: self.max_len, bos: BOS, eos: EOS, banned }
    }
}

/// One decoder of a trained model viewed as a [`StepModel`].
pub struct DecoderView<'a> {
    pub params: &'a ModelParams,
    pub dimension: Dimension,
}

impl StepModel for DecoderView<'_> {
    type State = Vec<f64>;

    fn vocab_size(&self) -> usize {
        self.params.vocab_size()
    }

    fn step(&self, state: &Vec<f64>, prev: u32) -> Result<(Vec<f64>, Vec<f64>), Seq2SeqError> {
        let (probs, next) = self.params.decode_step(self.dimension, state, prev)?;
        Ok((probs.into_iter().map(f64::ln).collect(), next))
    }
}

fn encode_event(vocab: &VocabularyMap, event: &str) -> Result<Vec<u32>, Seq2SeqError> {
    let ids = vocab.encode(event);
    if ids.is_empty() {
        return Err(Seq2SeqError::EmptySequence);
    }
    Ok(ids)
}

/// Beam search for `event` and `dimension`. Hypotheses that detokenize to the
/// same text are merged, keeping the best-scoring one; hypotheses with no text
/// (an immediate `<eos>`) are dropped, so a list may hold fewer than
/// `beam_width` entries.
pub fn generate_beam(
    params: &ModelParams,
    vocab: &VocabularyMap,
    event: &str,
    dimension: Dimension,
    opts: &DecodeOptions,
) -> Result<GenerationList, GenerateError> {
    let s0 = params.initial_state(dimension, &encode_event(vocab, event)?)?;
    let view = DecoderView { params, dimension };
    let pool = beam_search(&view, s0, &opts.beam_config())?;
    let mut seen = std::collections::BTreeSet::new();
    let entries = pool
        .into_iter()
        .map(|s| Generation { text: vocab.decode(&s.tokens), score: s.score })
        .filter(|g| !g.text.is_empty() && seen.insert(g.text.clone()))
        .collect();
    Ok(GenerationList { event: event.to_string(), dimension, beam_width: opts.beam_width, entries })
}

/// Greedy decoding as a list of at most one entry; empty output gives an
/// empty list.
pub fn generate_greedy(
    params: &ModelParams,
    vocab: &VocabularyMap,
    event: &str,
    dimension: Dimension,
    opts: &DecodeOptions,
) -> Result<GenerationList, GenerateError> {
    let s0 = params.initial_state(dimension, &encode_event(vocab, event)?)?;
    let view = DecoderView { params, dimension };
    let best = greedy(&view, s0, &opts.beam_config())?;
    Ok(GenerationList {
        event: event.to_string(),
        dimension,
        beam_width: 1,
        entries: Some(Generation { text: vocab.decode(&best.tokens), score: best.score })
            .filter(|g| !g.text.is_empty())
            .into_iter()
            .collect(),
    })
}
