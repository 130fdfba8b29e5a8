//! Binary checkpoint container.
//!
//! ```text
//! magic      8 bytes  "IFTHENCK"
//! version    u32 LE
//! header_len u64 LE, then that many bytes of JSON {format_version, variant, config, vocabulary}
//! count      u32 LE
//! count x { name_len u32, name utf-8, rows u32, cols u32, rows*cols f64 LE }
//! ```
//!
//! Tensors appear in the model's fixed flattening order. Every length is
//! checked against the bytes that remain before anything is allocated.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{encoder_grouping, ModelConfig, Variant};
use super::model::ModelParams;
use super::vocab::VocabularyMap;
use super::Seq2SeqError;

pub const MAGIC: &[u8; 8] = b"IFTHENCK";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format_version: u32,
    variant: Variant,
    config: ModelConfig,
    vocabulary: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config: ModelConfig,
    pub vocab: VocabularyMap,
    pub params: ModelParams,
}

fn bad(msg: impl Into<String>) -> Seq2SeqError {
    Seq2SeqError::Checkpoint(msg.into())
}

pub fn write_checkpoint<W: Write>(
    mut w: W,
    config: &ModelConfig,
    vocab: &VocabularyMap,
    params: &ModelParams,
) -> Result<(), Seq2SeqError> {
    if config.variant != params.variant()
        || config.embed_dim != params.embed_dim()
        || config.enc_hidden != params.enc_hidden()
        || config.dec_hidden != params.dec_hidden()
        || vocab.len() != params.vocab_size()
    {
        return Err(bad("config or vocabulary does not match the parameters"));
    }
    let header = Header {
        format_version: FORMAT_VERSION,
        variant: config.variant,
        config: config.clone(),
        vocabulary: vocab.tokens().to_vec(),
    };
    let json = serde_json::to_vec(&header).map_err(|e| bad(e.to_string()))?;
    let tensors = params.tensors();
    let mut buf = Vec::with_capacity(32 + json.len() + 8 * params.num_parameters());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(json.len() as u64).to_le_bytes());
    buf.extend_from_slice(&json);
    buf.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
    for (name, m) in tensors {
        buf.extend_from_slice(&(name.len() as u32).to_le_bytes());
        buf.extend_from_slice(name.as_bytes());
        buf.extend_from_slice(&(m.rows() as u32).to_le_bytes());
        buf.extend_from_slice(&(m.cols() as u32).to_le_bytes());
        for x in m.as_slice() {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn checkpoint_bytes(config: &ModelConfig, vocab: &VocabularyMap, params: &ModelParams) -> Result<Vec<u8>, Seq2SeqError> {
    let mut v = Vec::new();
    write_checkpoint(&mut v, config, vocab, params)?;
    Ok(v)
}

pub fn save_checkpoint(
    path: &Path,
    config: &ModelConfig,
    vocab: &VocabularyMap,
    params: &ModelParams,
) -> Result<(), Seq2SeqError> {
    let file = std::fs::File::create(path)?;
    write_checkpoint(std::io::BufWriter::new(file), config, vocab, params)
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, Seq2SeqError> {
    read_checkpoint(&std::fs::read(path)?)
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], Seq2SeqError> {
        if n > self.remaining() {
            return Err(bad(format!("truncated at byte {}", self.pos)));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, Seq2SeqError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, Seq2SeqError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

/// Number of scalars a model with this config and vocabulary holds, or
/// `None` on overflow or an unsupported variant.
fn parameter_count(config: &ModelConfig, vocab: usize) -> Option<u128> {
    let grouping = encoder_grouping(config.variant).ok()?;
    let n_enc = grouping.values().collect::<std::collections::BTreeSet<_>>().len() as u128;
    let n_dec = grouping.len() as u128;
    let (e, he, hd, v) = (config.embed_dim as u128, config.enc_hidden as u128, config.dec_hidden as u128, vocab as u128);
    let half = he / 2;
    let gru = |input: u128, h: u128| 3 * h * input + 3 * h * h + 6 * h;
    let enc = 2 * gru(e, half) + hd * he + hd;
    let dec = gru(e, hd) + v * hd + v;
    Some(v * e + n_enc * enc + n_dec * dec)
}

pub fn read_checkpoint(bytes: &[u8]) -> Result<Checkpoint, Seq2SeqError> {
    let mut c = Cursor { data: bytes, pos: 0 };
    if c.take(MAGIC.len())? != MAGIC {
        return Err(bad("not a checkpoint file"));
    }
    let version = c.u32()?;
    if version != FORMAT_VERSION {
        return Err(bad(format!("unsupported format version {version}")));
    }
    let header_len = c.u64()?;
    if header_len > c.remaining() as u64 {
        return Err(bad("header length exceeds file size"));
    }
    let header: Header = serde_json::from_slice(c.take(header_len as usize)?).map_err(|e| bad(format!("header: {e}")))?;
    if header.format_version != version || header.variant != header.config.variant {
        return Err(bad("header disagrees with container"));
    }
    header.config.validate()?;
    let vocab = VocabularyMap::from_tokens(header.vocabulary)?;

    let expected = parameter_count(&header.config, vocab.len()).ok_or_else(|| bad("variant has no parameters"))?;
    if expected.saturating_mul(8) > c.remaining() as u128 {
        return Err(bad("file too short for the declared model size"));
    }
    let mut params = ModelParams::zeros(&header.config, vocab.len())?;

    let count = c.u32()? as usize;
    let mut tensors = params.tensors_mut();
    if count != tensors.len() {
        return Err(bad(format!("expected {} tensors, found {count}", tensors.len())));
    }
    for (name, m) in tensors.iter_mut() {
        let name_len = c.u32()? as usize;
        let found = c.take(name_len)?;
        if found != name.as_bytes() {
            return Err(bad(format!("expected tensor {name}, found {:?}", String::from_utf8_lossy(found))));
        }
        let (rows, cols) = (c.u32()? as usize, c.u32()? as usize);
        if rows != m.rows() || cols != m.cols() {
            return Err(bad(format!("tensor {name} has shape {rows}x{cols}, expected {}x{}", m.rows(), m.cols())));
        }
        let raw = c.take(rows * cols * 8)?;
        for (x, chunk) in m.as_mut_slice().iter_mut().zip(raw.chunks_exact(8)) {
            *x = f64::from_le_bytes(chunk.try_into().expect("8 bytes"));
        }
    }
    drop(tensors);
    if c.remaining() != 0 {
        return Err(bad("trailing bytes after last tensor"));
    }
    Ok(Checkpoint { config: header.config, vocab, params })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (ModelConfig, VocabularyMap, ModelParams) {
        let config = ModelConfig {
            variant: Variant::EventPrePost,
            embed_dim: 4,
            enc_hidden: 4,
            dec_hidden: 3,
            seed: 17,
            ..Default::default()
        };
        let mut toks: Vec<String> = super::super::vocab::RESERVED.iter().map(|s| s.to_string()).collect();
        toks.extend(["eat".to_string(), "food".to_string()]);
        let vocab = VocabularyMap::from_tokens(toks).unwrap();
        let params = ModelParams::init(&config, vocab.len()).unwrap();
        (config, vocab, params)
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let (config, vocab, params) = fixture();
        let bytes = checkpoint_bytes(&config, &vocab, &params).unwrap();
        let ck = read_checkpoint(&bytes).unwrap();
        assert_eq!(ck.config, config);
        assert_eq!(ck.vocab, vocab);
        for ((_, a), (_, b)) in ck.params.tensors().into_iter().zip(params.tensors()) {
            let bits_a: Vec<u64> = a.as_slice().iter().map(|x| x.to_bits()).collect();
            let bits_b: Vec<u64> = b.as_slice().iter().map(|x| x.to_bits()).collect();
            assert_eq!(bits_a, bits_b);
        }
        assert_eq!(checkpoint_bytes(&ck.config, &ck.vocab, &ck.params).unwrap(), bytes);
        assert_eq!(parameter_count(&config, vocab.len()).unwrap(), params.num_parameters() as u128);
    }

    #[test]
    fn rejects_damage() {
        let (config, vocab, params) = fixture();
        let bytes = checkpoint_bytes(&config, &vocab, &params).unwrap();
        for cut in [0, 7, 12, 40, bytes.len() - 1] {
            assert!(read_checkpoint(&bytes[..cut]).is_err(), "cut {cut}");
        }
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(read_checkpoint(&extra).is_err());
        let mut wrong = bytes.clone();
        wrong[0] = b'X';
        assert!(read_checkpoint(&wrong).is_err());
    }

    #[test]
    fn mismatched_vocab_is_rejected_on_write() {
        let (config, _, params) = fixture();
        assert!(checkpoint_bytes(&config, &VocabularyMap::reserved_only(), &params).is_err());
    }
}
