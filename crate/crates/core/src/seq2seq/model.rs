use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{encoder_grouping, ModelConfig, Variant};
use super::gru::{GruCell, GruStep};
use super::tensor::{log_sum_exp, softmax, Matrix};
use super::vocab::EOS;
use super::Seq2SeqError;
use crate::atlas::Dimension;

/// Bidirectional encoder plus the affine bridge to the decoder state.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams {
    pub fwd: GruCell,
    pub bwd: GruCell,
    /// `dec_hidden x enc_hidden`
    pub bridge_w: Matrix,
    pub bridge_b: Matrix,
}

impl EncoderParams {
    fn zeros(embed: usize, enc_hidden: usize, dec_hidden: usize) -> Self {
        Self {
            fwd: GruCell::zeros(embed, enc_hidden / 2),
            bwd: GruCell::zeros(embed, enc_hidden / 2),
            bridge_w: Matrix::zeros(dec_hidden, enc_hidden),
            bridge_b: Matrix::zeros(dec_hidden, 1),
        }
    }

    fn random(embed: usize, enc_hidden: usize, dec_hidden: usize, scale: f64, rng: &mut ChaCha8Rng) -> Self {
        Self {
            fwd: GruCell::random(embed, enc_hidden / 2, scale, rng),
            bwd: GruCell::random(embed, enc_hidden / 2, scale, rng),
            bridge_w: Matrix::uniform(dec_hidden, enc_hidden, scale, rng),
            bridge_b: Matrix::zeros(dec_hidden, 1),
        }
    }

    fn tensors(&self) -> Vec<(String, &Matrix)> {
        let mut v = vec![("bridge.b".to_string(), &self.bridge_b), ("bridge.w".to_string(), &self.bridge_w)];
        v.extend(self.bwd.tensors().into_iter().map(|(n, m)| (format!("bwd.{n}"), m)));
        v.extend(self.fwd.tensors().into_iter().map(|(n, m)| (format!("fwd.{n}"), m)));
        v
    }

    fn tensors_mut(&mut self) -> Vec<(String, &mut Matrix)> {
        let mut v = vec![("bridge.b".to_string(), &mut self.bridge_b), ("bridge.w".to_string(), &mut self.bridge_w)];
        v.extend(self.bwd.tensors_mut().into_iter().map(|(n, m)| (format!("bwd.{n}"), m)));
        v.extend(self.fwd.tensors_mut().into_iter().map(|(n, m)| (format!("fwd.{n}"), m)));
        v
    }
}

/// Recurrent decoder with its output projection.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderParams {
    pub cell: GruCell,
    /// `|V| x dec_hidden`
    pub out_w: Matrix,
    pub out_b: Matrix,
}

impl DecoderParams {
    fn zeros(embed: usize, dec_hidden: usize, vocab: usize) -> Self {
        Self {
            cell: GruCell::zeros(embed, dec_hidden),
            out_w: Matrix::zeros(vocab, dec_hidden),
            out_b: Matrix::zeros(vocab, 1),
        }
    }

    fn random(embed: usize, dec_hidden: usize, vocab: usize, scale: f64, rng: &mut ChaCha8Rng) -> Self {
        Self {
            cell: GruCell::random(embed, dec_hidden, scale, rng),
            out_w: Matrix::uniform(vocab, dec_hidden, scale, rng),
            out_b: Matrix::zeros(vocab, 1),
        }
    }

    fn tensors(&self) -> Vec<(String, &Matrix)> {
        let mut v: Vec<_> = self.cell.tensors().into_iter().map(|(n, m)| (format!("cell.{n}"), m)).collect();
        v.push(("out.b".to_string(), &self.out_b));
        v.push(("out.w".to_string(), &self.out_w));
        v
    }

    fn tensors_mut(&mut self) -> Vec<(String, &mut Matrix)> {
        let mut v: Vec<_> = self.cell.tensors_mut().into_iter().map(|(n, m)| (format!("cell.{n}"), m)).collect();
        v.push(("out.b".to_string(), &mut self.out_b));
        v.push(("out.w".to_string(), &mut self.out_w));
        v
    }

    /// Output logits for a decoder state.
    pub fn logits(&self, state: &[f64]) -> Vec<f64> {
        let mut l = self.out_w.matvec(state);
        for (x, b) in l.iter_mut().zip(self.out_b.as_slice()) {
            *x += b;
        }
        l
    }
}

/// One worker's annotation for one event and dimension, as token ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingInstance {
    pub event: Vec<u32>,
    pub dimension: Dimension,
    /// Starts with `<bos>` and ends with `<eos>`.
    pub target: Vec<u32>,
    pub worker_id: String,
}

/// All trainable tensors of one model.
///
/// Dimensions that share an encoder look it up through `grouping`, so they
/// read and write the same [`EncoderParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    variant: Variant,
    embed_dim: usize,
    enc_hidden: usize,
    dec_hidden: usize,
    /// `|V| x embed_dim`, shared by encoder and decoder inputs.
    pub embedding: Matrix,
    encoders: BTreeMap<String, EncoderParams>,
    decoders: BTreeMap<Dimension, DecoderParams>,
    grouping: BTreeMap<Dimension, String>,
}

/// Forward trace of one encoder pass.
struct EncoderTrace {
    fwd: Vec<GruStep>,
    bwd: Vec<GruStep>,
    h: Vec<f64>,
    s0: Vec<f64>,
}

impl ModelParams {
    /// All-zero parameters with the topology of `config` for a vocabulary of
    /// `vocab_size` tokens.
    pub fn zeros(config: &ModelConfig, vocab_size: usize) -> Result<Self, Seq2SeqError> {
        config.validate()?;
        let grouping = encoder_grouping(config.variant)?;
        let (e, he, hd) = (config.embed_dim, config.enc_hidden, config.dec_hidden);
        let encoders = grouping.values().map(|id| (id.clone(), EncoderParams::zeros(e, he, hd))).collect();
        let decoders = grouping.keys().map(|d| (*d, DecoderParams::zeros(e, hd, vocab_size))).collect();
        Ok(Self {
            variant: config.variant,
            embed_dim: e,
            enc_hidden: he,
            dec_hidden: hd,
            embedding: Matrix::zeros(vocab_size, e),
            encoders,
            decoders,
            grouping,
        })
    }

    /// Uniform weights in `[-init_scale, init_scale]` and zero biases, drawn
    /// in canonical tensor order from a generator seeded with `config.seed`.
    pub fn init(config: &ModelConfig, vocab_size: usize) -> Result<Self, Seq2SeqError> {
        let mut p = Self::zeros(config, vocab_size)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let s = config.init_scale;
        let (e, he, hd) = (config.embed_dim, config.enc_hidden, config.dec_hidden);
        p.embedding = Matrix::uniform(vocab_size, e, s, &mut rng);
        for enc in p.encoders.values_mut() {
            *enc = EncoderParams::random(e, he, hd, s, &mut rng);
        }
        for dec in p.decoders.values_mut() {
            *dec = DecoderParams::random(e, hd, vocab_size, s, &mut rng);
        }
        Ok(p)
    }

    /// Same topology, every value zero.
    pub fn zeros_like(&self) -> Self {
        let mut p = self.clone();
        for (_, m) in p.tensors_mut() {
            m.fill(0.0);
        }
        p
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn vocab_size(&self) -> usize {
        self.embedding.rows()
    }

    pub fn embed_dim(&self) -> usize {
        self.embed_dim
    }

    pub fn enc_hidden(&self) -> usize {
        self.enc_hidden
    }

    pub fn dec_hidden(&self) -> usize {
        self.dec_hidden
    }

    pub fn grouping(&self) -> &BTreeMap<Dimension, String> {
        &self.grouping
    }

    pub fn encoder_ids(&self) -> impl Iterator<Item = &str> {
        self.encoders.keys().map(String::as_str)
    }

    pub fn dimensions(&self) -> impl Iterator<Item = Dimension> + '_ {
        self.decoders.keys().copied()
    }

    pub fn encoder(&self, id: &str) -> Result<&EncoderParams, Seq2SeqError> {
        self.encoders.get(id).ok_or_else(|| Seq2SeqError::UnknownEncoder(id.to_string()))
    }

    pub fn encoder_mut(&mut self, id: &str) -> Result<&mut EncoderParams, Seq2SeqError> {
        self.encoders.get_mut(id).ok_or_else(|| Seq2SeqError::UnknownEncoder(id.to_string()))
    }

    pub fn encoder_id(&self, dim: Dimension) -> Result<&str, Seq2SeqError> {
        self.grouping.get(&dim).map(String::as_str).ok_or(Seq2SeqError::UnsupportedDimension(dim))
    }

    /// The encoder that feeds `dim`'s decoder.
    pub fn encoder_for(&self, dim: Dimension) -> Result<&EncoderParams, Seq2SeqError> {
        self.encoder(self.encoder_id(dim)?)
    }

    pub fn encoder_for_mut(&mut self, dim: Dimension) -> Result<&mut EncoderParams, Seq2SeqError> {
        let id = self.encoder_id(dim)?.to_string();
        self.encoder_mut(&id)
    }

    pub fn decoder(&self, dim: Dimension) -> Result<&DecoderParams, Seq2SeqError> {
        self.decoders.get(&dim).ok_or(Seq2SeqError::UnsupportedDimension(dim))
    }

    pub fn decoder_mut(&mut self, dim: Dimension) -> Result<&mut DecoderParams, Seq2SeqError> {
        self.decoders.get_mut(&dim).ok_or(Seq2SeqError::UnsupportedDimension(dim))
    }

    /// Every tensor with its qualified name, in the fixed flattening order:
    /// the embedding, encoders by id, then decoders by dimension name, each
    /// with its matrices in name order.
    pub fn tensors(&self) -> Vec<(String, &Matrix)> {
        let mut v = vec![("embedding".to_string(), &self.embedding)];
        for (id, enc) in &self.encoders {
            v.extend(enc.tensors().into_iter().map(|(n, m)| (format!("encoder.{id}.{n}"), m)));
        }
        for (dim, dec) in &self.decoders {
            v.extend(dec.tensors().into_iter().map(|(n, m)| (format!("decoder.{dim}.{n}"), m)));
        }
        v
    }

    pub fn tensors_mut(&mut self) -> Vec<(String, &mut Matrix)> {
        let mut v = vec![("embedding".to_string(), &mut self.embedding)];
        for (id, enc) in &mut self.encoders {
            v.extend(enc.tensors_mut().into_iter().map(|(n, m)| (format!("encoder.{id}.{n}"), m)));
        }
        for (dim, dec) in &mut self.decoders {
            v.extend(dec.tensors_mut().into_iter().map(|(n, m)| (format!("decoder.{dim}.{n}"), m)));
        }
        v
    }

    pub fn num_parameters(&self) -> usize {
        self.tensors().iter().map(|(_, m)| m.len()).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.tensors().iter().all(|(_, m)| m.as_slice().iter().all(|x| x.is_finite()))
    }

    fn check_ids(&self, ids: &[u32]) -> Result<(), Seq2SeqError> {
        match ids.iter().find(|&&i| i as usize >= self.vocab_size()) {
            Some(&id) => Err(Seq2SeqError::TokenOutOfRange { id, vocab: self.vocab_size() }),
            None => Ok(()),
        }
    }

    fn run_encoder(&self, enc: &EncoderParams, ids: &[u32]) -> Result<EncoderTrace, Seq2SeqError> {
        if ids.is_empty() {
            return Err(Seq2SeqError::EmptySequence);
        }
        self.check_ids(ids)?;
        let half = self.enc_hidden / 2;
        let mut state = vec![0.0; half];
        let mut fwd = Vec::with_capacity(ids.len());
        for &id in ids {
            let step = enc.fwd.forward(self.embedding.row(id as usize), &state);
            state = step.h.clone();
            fwd.push(step);
        }
        let mut state_b = vec![0.0; half];
        let mut bwd = Vec::with_capacity(ids.len());
        for &id in ids.iter().rev() {
            let step = enc.bwd.forward(self.embedding.row(id as usize), &state_b);
            state_b = step.h.clone();
            bwd.push(step);
        }
        let mut h = state;
        h.extend_from_slice(&state_b);
        let mut s0 = enc.bridge_w.matvec(&h);
        for (x, b) in s0.iter_mut().zip(enc.bridge_b.as_slice()) {
            *x += b;
        }
        Ok(EncoderTrace { fwd, bwd, h, s0 })
    }

    /// Concatenated final forward and backward states for `ids`.
    pub fn encode(&self, encoder_id: &str, ids: &[u32]) -> Result<Vec<f64>, Seq2SeqError> {
        Ok(self.run_encoder(self.encoder(encoder_id)?, ids)?.h)
    }

    /// Initial decoder state for `dim`: the bridged encoding of the event.
    pub fn initial_state(&self, dim: Dimension, event: &[u32]) -> Result<Vec<f64>, Seq2SeqError> {
        Ok(self.run_encoder(self.encoder_for(dim)?, event)?.s0)
    }

    /// Feeds `prev` to `dim`'s decoder. Returns the next-token distribution
    /// and the new state.
    pub fn decode_step(
        &self,
        dim: Dimension,
        state: &[f64],
        prev: u32,
    ) -> Result<(Vec<f64>, Vec<f64>), Seq2SeqError> {
        let dec = self.decoder(dim)?;
        self.check_ids(&[prev])?;
        if state.len() != self.dec_hidden {
            return Err(Seq2SeqError::BadConfig(format!(
                "decoder state has length {}, expected {}",
                state.len(),
                self.dec_hidden
            )));
        }
        let step = dec.cell.forward(self.embedding.row(prev as usize), state);
        Ok((softmax(&dec.logits(&step.h)), step.h))
    }

    fn check_instance(&self, inst: &TrainingInstance) -> Result<(), Seq2SeqError> {
        if inst.target.len() < 2 || inst.target.last() != Some(&EOS) {
            return Err(Seq2SeqError::BadInstance("target must hold <bos>, tokens, <eos>".into()));
        }
        self.check_ids(&inst.target)
    }

    /// Mean negative log-likelihood of the target under teacher forcing.
    pub fn sequence_loss(&self, inst: &TrainingInstance) -> Result<f64, Seq2SeqError> {
        self.check_instance(inst)?;
        let dec = self.decoder(inst.dimension)?;
        let mut state = self.run_encoder(self.encoder_for(inst.dimension)?, &inst.event)?.s0;
        let mut total = 0.0;
        for w in inst.target.windows(2) {
            let step = dec.cell.forward(self.embedding.row(w[0] as usize), &state);
            let logits = dec.logits(&step.h);
            total += log_sum_exp(&logits) - logits[w[1] as usize];
            state = step.h;
        }
        Ok(total / (inst.target.len() - 1) as f64)
    }

    /// Adds `weight * d(loss)/d(theta)` into `grad` and returns the loss.
    pub fn accumulate_gradient(
        &self,
        inst: &TrainingInstance,
        weight: f64,
        grad: &mut ModelParams,
    ) -> Result<f64, Seq2SeqError> {
        self.check_instance(inst)?;
        let dim = inst.dimension;
        let enc_id = self.encoder_id(dim)?.to_string();
        let enc = self.encoder(&enc_id)?;
        let dec = self.decoder(dim)?;
        let trace = self.run_encoder(enc, &inst.event)?;

        let m = inst.target.len() - 1;
        let mut steps = Vec::with_capacity(m);
        let mut probs = Vec::with_capacity(m);
        let mut state = trace.s0.clone();
        let mut total = 0.0;
        for w in inst.target.windows(2) {
            let step = dec.cell.forward(self.embedding.row(w[0] as usize), &state);
            let logits = dec.logits(&step.h);
            total += log_sum_exp(&logits) - logits[w[1] as usize];
            probs.push(softmax(&logits));
            state = step.h.clone();
            steps.push(step);
        }
        let loss = total / m as f64;
        let scale = weight / m as f64;

        let ModelParams { embedding: g_emb, encoders: g_encs, decoders: g_decs, .. } = grad;
        let g_dec = g_decs.get_mut(&dim).ok_or(Seq2SeqError::UnsupportedDimension(dim))?;
        let mut ds = vec![0.0; self.dec_hidden];
        for i in (0..m).rev() {
            let mut dlogits: Vec<f64> = probs[i].iter().map(|p| p * scale).collect();
            dlogits[inst.target[i + 1] as usize] -= scale;
            let step = &steps[i];
            g_dec.out_w.add_outer(&dlogits, &step.h);
            g_dec.out_b.add_vec(&dlogits);
            let mut dh = ds;
            dec.out_w.tmatvec_acc(&dlogits, &mut dh);
            let mut dx = vec![0.0; self.embed_dim];
            ds = dec.cell.backward(step, &dh, &mut g_dec.cell, &mut dx);
            super::tensor::axpy(1.0, &dx, g_emb.row_mut(inst.target[i] as usize));
        }

        let g_enc = g_encs.get_mut(&enc_id).ok_or_else(|| Seq2SeqError::UnknownEncoder(enc_id.clone()))?;
        g_enc.bridge_w.add_outer(&ds, &trace.h);
        g_enc.bridge_b.add_vec(&ds);
        let mut dh_enc = vec![0.0; self.enc_hidden];
        enc.bridge_w.tmatvec_acc(&ds, &mut dh_enc);
        let half = self.enc_hidden / 2;
        let n = inst.event.len();

        let mut dh = dh_enc[..half].to_vec();
        for t in (0..n).rev() {
            let mut dx = vec![0.0; self.embed_dim];
            dh = enc.fwd.backward(&trace.fwd[t], &dh, &mut g_enc.fwd, &mut dx);
            super::tensor::axpy(1.0, &dx, g_emb.row_mut(inst.event[t] as usize));
        }
        let mut dh = dh_enc[half..].to_vec();
        for j in (0..n).rev() {
            let mut dx = vec![0.0; self.embed_dim];
            dh = enc.bwd.backward(&trace.bwd[j], &dh, &mut g_enc.bwd, &mut dx);
            super::tensor::axpy(1.0, &dx, g_emb.row_mut(inst.event[n - 1 - j] as usize));
        }
        Ok(loss)
    }
}
