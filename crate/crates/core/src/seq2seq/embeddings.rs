use std::collections::BTreeMap;

use super::model::ModelParams;
use super::vocab::{tokenize, VocabularyMap};
use super::Seq2SeqError;

/// Fixed token vectors, read from `token<TAB>f1 f2 ... fd` lines or taken
/// from a model's embedding matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticEmbeddings {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl StaticEmbeddings {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Builds from explicit vectors; all must share one length.
    pub fn from_vectors(vectors: BTreeMap<String, Vec<f64>>) -> Result<Self, Seq2SeqError> {
        let dim = vectors.values().next().map_or(0, Vec::len);
        if vectors.values().any(|v| v.len() != dim || v.iter().any(|x| !x.is_finite())) {
            return Err(Seq2SeqError::Embeddings { line: 0, message: "vectors differ in length or are not finite".into() });
        }
        Ok(Self { dim, vectors })
    }

    /// The rows of a trained embedding matrix, keyed by vocabulary token.
    pub fn from_model(vocab: &VocabularyMap, params: &ModelParams) -> Self {
        let vectors = vocab
            .tokens()
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), params.embedding.row(i).to_vec()))
            .collect();
        Self { dim: params.embed_dim(), vectors }
    }

    /// Mean vector of the phrase's known tokens; `None` if none are known.
    pub fn mean_vector(&self, text: &str) -> Option<Vec<f64>> {
        let mut sum = vec![0.0; self.dim];
        let mut n = 0usize;
        for tok in tokenize(text) {
            if let Some(v) = self.vector(&tok) {
                super::tensor::axpy(1.0, v, &mut sum);
                n += 1;
            }
        }
        (n > 0).then(|| sum.into_iter().map(|x| x / n as f64).collect())
    }
}

pub fn parse_embeddings(input: &str) -> Result<StaticEmbeddings, Seq2SeqError> {
    let mut vectors = BTreeMap::new();
    let mut dim = None;
    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        let text = raw.strip_suffix('\r').unwrap_or(raw);
        if text.trim().is_empty() {
            continue;
        }
        let err = |message: String| Seq2SeqError::Embeddings { line, message };
        let (token, floats) = text.split_once('\t').ok_or_else(|| err("expected token<TAB>values".into()))?;
        if token.is_empty() {
            return Err(err("empty token".into()));
        }
        let values = floats
            .split_whitespace()
            .map(|f| f.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| err("values must be finite numbers".into()))?;
        if values.is_empty() {
            return Err(err("no values".into()));
        }
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(err(format!("expected {d} values, found {}", values.len())));
            }
            Some(_) => {}
        }
        if vectors.insert(token.to_string(), values).is_some() {
            return Err(err(format!("duplicate token {token:?}")));
        }
    }
    Ok(StaticEmbeddings { dim: dim.unwrap_or(0), vectors })
}

/// Copies vectors for vocabulary tokens into the embedding matrix and returns
/// how many rows were set.
pub fn apply_embeddings(
    params: &mut ModelParams,
    vocab: &VocabularyMap,
    emb: &StaticEmbeddings,
) -> Result<usize, Seq2SeqError> {
    if emb.is_empty() {
        return Ok(0);
    }
    if emb.dim() != params.embed_dim() {
        return Err(Seq2SeqError::BadConfig(format!(
            "embedding file has dimension {}, model expects {}",
            emb.dim(),
            params.embed_dim()
        )));
    }
    let mut n = 0;
    for (i, tok) in vocab.tokens().iter().enumerate() {
        if let Some(v) = emb.vector(tok) {
            params.embedding.row_mut(i).copy_from_slice(v);
            n += 1;
        }
    }
    Ok(n)
}
