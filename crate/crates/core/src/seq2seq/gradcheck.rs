use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::model::{ModelParams, TrainingInstance};
use super::vocab::{BOS, EOS, RESERVED};
use super::Seq2SeqError;
use crate::atlas::Dimension;

/// Denominator floor for the relative error, so that two near-zero values
/// compare as equal.
pub const RELATIVE_FLOOR: f64 = 1e-8;

/// Minimum number of coordinates compared per check.
pub const MIN_SAMPLES: usize = 200;

#[derive(Debug, Clone, Serialize)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    pub checked: usize,
    /// Tensor name and flat index of the worst coordinate.
    pub worst: (String, usize),
    pub analytic_at_worst: f64,
    pub numeric_at_worst: f64,
}

/// `|a - n| / max(|a| + |n|, RELATIVE_FLOOR)`
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(RELATIVE_FLOOR)
}

/// Compares the analytic gradient of `sequence_loss` with central finite
/// differences on at least `samples` coordinates. Coordinates are drawn round
/// robin over every tensor the instance touches (embedding rows of its tokens,
/// its encoder, its decoder and output projection), uniformly within each.
/// `filter` restricts the tensors by qualified name.
pub fn gradient_check(
    params: &ModelParams,
    inst: &TrainingInstance,
    epsilon: f64,
    samples: usize,
    seed: u64,
    filter: Option<&dyn Fn(&str) -> bool>,
) -> Result<GradCheckReport, Seq2SeqError> {
    let mut grad = params.zeros_like();
    params.accumulate_gradient(inst, 1.0, &mut grad)?;

    let enc_prefix = format!("encoder.{}.", params.encoder_id(inst.dimension)?);
    let dec_prefix = format!("decoder.{}.", inst.dimension);
    let mut rows: Vec<u32> = inst.event.iter().chain(&inst.target[..inst.target.len() - 1]).copied().collect();
    rows.sort_unstable();
    rows.dedup();

    let names: Vec<String> = params
        .tensors()
        .into_iter()
        .map(|(n, _)| n)
        .filter(|n| n == "embedding" || n.starts_with(&enc_prefix) || n.starts_with(&dec_prefix))
        .filter(|n| filter.is_none_or(|f| f(n)))
        .collect();
    if names.is_empty() {
        return Err(Seq2SeqError::BadConfig("gradient check selected no tensors".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = params.clone();
    let mut report = GradCheckReport {
        max_relative_error: 0.0,
        checked: 0,
        worst: (String::new(), 0),
        analytic_at_worst: 0.0,
        numeric_at_worst: 0.0,
    };
    let total = samples.max(MIN_SAMPLES);
    for k in 0..total {
        let name = &names[k % names.len()];
        let idx = {
            let m = tensor(params, name);
            if name == "embedding" {
                let r = rows[rng.random_range(0..rows.len())] as usize;
                r * m.cols() + rng.random_range(0..m.cols())
            } else {
                rng.random_range(0..m.len())
            }
        };
        let orig = tensor(params, name).as_slice()[idx];
        set(&mut probe, name, idx, orig + epsilon);
        let plus = probe.sequence_loss(inst)?;
        set(&mut probe, name, idx, orig - epsilon);
        let minus = probe.sequence_loss(inst)?;
        set(&mut probe, name, idx, orig);
        let numeric = (plus - minus) / (2.0 * epsilon);
        let analytic = tensor(&grad, name).as_slice()[idx];
        let err = relative_error(analytic, numeric);
        report.checked += 1;
        if err > report.max_relative_error || report.worst.0.is_empty() {
            report.max_relative_error = err.max(report.max_relative_error);
            report.worst = (name.clone(), idx);
            report.analytic_at_worst = analytic;
            report.numeric_at_worst = numeric;
        }
    }
    Ok(report)
}

/// An instance of uniformly drawn non-reserved tokens: `event_len` event
/// tokens and a target of `target_len` tokens between `<bos>` and `<eos>`.
pub fn random_instance(
    vocab_size: usize,
    dimension: Dimension,
    event_len: usize,
    target_len: usize,
    seed: u64,
) -> Result<TrainingInstance, Seq2SeqError> {
    if vocab_size <= RESERVED.len() || event_len == 0 {
        return Err(Seq2SeqError::BadConfig(format!(
            "need a vocabulary above {} tokens and a non-empty event",
            RESERVED.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |n: usize| -> Vec<u32> {
        (0..n).map(|_| rng.random_range(RESERVED.len()..vocab_size) as u32).collect()
    };
    let event = draw(event_len);
    let mut target = vec![BOS];
    target.extend(draw(target_len));
    target.push(EOS);
    Ok(TrainingInstance { event, dimension, target, worker_id: "synthetic".into() })
}

/// Draws every bias uniformly from `[-scale, scale]`. Freshly initialized
/// models have zero biases, which would leave their gradient paths untested.
pub fn perturb_biases(params: &mut ModelParams, scale: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (name, m) in params.tensors_mut() {
        if name.ends_with(".b") || name.contains(".b_") {
            for x in m.as_mut_slice() {
                *x = rng.random_range(-scale..=scale);
            }
        }
    }
}

fn tensor<'a>(p: &'a ModelParams, name: &str) -> &'a super::tensor::Matrix {
    p.tensors().into_iter().find(|(n, _)| n == name).map(|(_, m)| m).expect("tensor name from the same model")
}

fn set(p: &mut ModelParams, name: &str, idx: usize, v: f64) {
    let (_, m) = p.tensors_mut().into_iter().find(|(n, _)| n == name).expect("tensor name from the same model");
    m.as_mut_slice()[idx] = v;
}
