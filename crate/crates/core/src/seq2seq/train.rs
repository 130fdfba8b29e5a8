use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::ModelConfig;
use super::model::{ModelParams, TrainingInstance};
use super::vocab::VocabularyMap;
use super::Seq2SeqError;
use crate::atlas::{AtlasGraph, Dimension, Split};

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

/// Stream used for batch shuffling, kept apart from initialization.
const SHUFFLE_STREAM: u64 = 1;

/// One instance per (Train triple, worker) for the given dimensions.
/// Empty-sentinel targets are skipped.
pub fn build_instances(graph: &AtlasGraph, vocab: &VocabularyMap, dims: &[Dimension]) -> Vec<TrainingInstance> {
    let mut out = Vec::new();
    for t in graph.triples() {
        if t.split != Split::Train || t.target.is_empty() || !dims.contains(&t.dimension) {
            continue;
        }
        let event = vocab.encode(t.event.text());
        let target = vocab.encode_target(t.target.text());
        for w in &t.workers {
            out.push(TrainingInstance {
                event: event.clone(),
                dimension: t.dimension,
                target: target.clone(),
                worker_id: w.clone(),
            });
        }
    }
    out
}

/// Adam moment estimates with the same layout as the model.
#[derive(Debug, Clone)]
pub struct Adam {
    m: ModelParams,
    v: ModelParams,
    t: u64,
}

impl Adam {
    pub fn new(params: &ModelParams) -> Self {
        Self { m: params.zeros_like(), v: params.zeros_like(), t: 0 }
    }

    /// One update. Coordinates whose step is exactly zero are left untouched,
    /// so tensors that have never received gradient stay bit-identical.
    pub fn step(&mut self, params: &mut ModelParams, grad: &ModelParams, lr: f64, skip_embedding: bool) {
        self.t += 1;
        let bc1 = 1.0 - BETA1.powi(self.t as i32);
        let bc2 = 1.0 - BETA2.powi(self.t as i32);
        let grads = grad.tensors();
        let ms = self.m.tensors_mut();
        let vs = self.v.tensors_mut();
        for ((((name, p), (_, g)), (_, m)), (_, v)) in params.tensors_mut().into_iter().zip(grads).zip(ms).zip(vs) {
            if skip_embedding && name == "embedding" {
                continue;
            }
            let (p, g, m, v) = (p.as_mut_slice(), g.as_slice(), m.as_mut_slice(), v.as_mut_slice());
            for i in 0..p.len() {
                m[i] = BETA1 * m[i] + (1.0 - BETA1) * g[i];
                v[i] = BETA2 * v[i] + (1.0 - BETA2) * g[i] * g[i];
                let update = lr * (m[i] / bc1) / ((v[i] / bc2).sqrt() + ADAM_EPS);
                if update != 0.0 {
                    p[i] -= update;
                }
            }
        }
    }
}

fn global_norm(grad: &ModelParams) -> f64 {
    grad.tensors().iter().map(|(_, m)| m.sum_sq()).sum::<f64>().sqrt()
}

/// Accumulates the gradient of the multitask objective for one batch: the
/// mean over dimensions present of the mean instance loss. Returns the
/// objective and the per-instance losses.
pub fn batch_gradient(
    params: &ModelParams,
    batch: &[&TrainingInstance],
    grad: &mut ModelParams,
) -> Result<(f64, Vec<f64>), Seq2SeqError> {
    let mut per_dim: BTreeMap<Dimension, usize> = BTreeMap::new();
    for inst in batch {
        *per_dim.entry(inst.dimension).or_default() += 1;
    }
    let n_dims = per_dim.len() as f64;
    let mut losses = Vec::with_capacity(batch.len());
    let mut objective = 0.0;
    for inst in batch {
        let w = 1.0 / (n_dims * per_dim[&inst.dimension] as f64);
        let loss = params.accumulate_gradient(inst, w, grad)?;
        objective += w * loss;
        losses.push(loss);
    }
    Ok((objective, losses))
}

/// Stateful trainer so that epochs can be run one at a time.
#[derive(Debug, Clone)]
pub struct Trainer {
    pub params: ModelParams,
    config: ModelConfig,
    adam: Adam,
    rng: ChaCha8Rng,
    epoch: usize,
}

impl Trainer {
    pub fn new(params: ModelParams, config: &ModelConfig) -> Result<Self, Seq2SeqError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(SHUFFLE_STREAM);
        Ok(Self { adam: Adam::new(&params), params, config: config.clone(), rng, epoch: 0 })
    }

    /// Runs one epoch and returns the mean instance loss seen during it
    /// (each loss taken before the update of its batch).
    pub fn run_epoch(&mut self, data: &[TrainingInstance]) -> Result<f64, Seq2SeqError> {
        if data.is_empty() {
            return Err(Seq2SeqError::BadConfig("no training instances".into()));
        }
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.shuffle(&mut self.rng);
        let mut losses = vec![0.0; data.len()];
        let mut grad = self.params.zeros_like();
        for (b, chunk) in order.chunks(self.config.batch_size).enumerate() {
            for (_, m) in grad.tensors_mut() {
                m.fill(0.0);
            }
            let batch: Vec<&TrainingInstance> = chunk.iter().map(|&i| &data[i]).collect();
            let (objective, batch_losses) = batch_gradient(&self.params, &batch, &mut grad)?;
            let norm = global_norm(&grad);
            if !objective.is_finite() || !norm.is_finite() {
                return Err(Seq2SeqError::NonFinite { epoch: self.epoch, batch: b, loss: objective });
            }
            if self.config.clip_norm > 0.0 && norm > self.config.clip_norm {
                let s = self.config.clip_norm / norm;
                for (_, m) in grad.tensors_mut() {
                    m.scale(s);
                }
            }
            self.adam.step(&mut self.params, &grad, self.config.learning_rate, self.config.freeze_embeddings);
            for (&i, l) in chunk.iter().zip(batch_losses) {
                losses[i] = l;
            }
        }
        self.epoch += 1;
        Ok(losses.iter().sum::<f64>() / data.len() as f64)
    }

    pub fn epochs_run(&self) -> usize {
        self.epoch
    }
}

/// Trains for `config.epochs` epochs. Returns the trained parameters and the
/// per-epoch mean loss.
pub fn train(
    params: ModelParams,
    data: &[TrainingInstance],
    config: &ModelConfig,
) -> Result<(ModelParams, Vec<f64>), Seq2SeqError> {
    let mut trainer = Trainer::new(params, config)?;
    let mut trace = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        let loss = trainer.run_epoch(data)?;
        log::debug!("epoch {} loss {loss:.6}", trainer.epochs_run());
        trace.push(loss);
    }
    Ok((trainer.params, trace))
}
