use std::cmp::Ordering;

use crate::seq2seq::Seq2SeqError;

/// A left-to-right model: consumes one token and yields the log-probability
/// of every next token together with the new state.
pub trait StepModel {
    type State: Clone;

    fn vocab_size(&self) -> usize;

    fn step(&self, state: &Self::State, prev: u32) -> Result<(Vec<f64>, Self::State), Seq2SeqError>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamConfig {
    pub beam_width: usize,
    /// Maximum number of generated tokens, `<eos>` included.
    pub max_len: usize,
    pub bos: u32,
    pub eos: u32,
    /// Tokens that are never generated. The remaining probabilities are
    /// renormalized.
    pub banned: Vec<u32>,
}

/// A finished hypothesis: generated ids (ending in `eos` unless it hit
/// `max_len`) and the sum of their log-probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Scored {
    pub tokens: Vec<u32>,
    pub score: f64,
}

fn rank(a: &Scored, b: &Scored) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.tokens.cmp(&b.tokens))
}

struct Alive<S> {
    tokens: Vec<u32>,
    score: f64,
    /// State after the last token, and the next-token log-distribution.
    state: S,
    next: Vec<f64>,
}

fn restrict(mut logp: Vec<f64>, banned: &[u32]) -> Vec<f64> {
    if banned.is_empty() {
        return logp;
    }
    for &b in banned {
        if let Some(x) = logp.get_mut(b as usize) {
            *x = f64::NEG_INFINITY;
        }
    }
    let z = crate::seq2seq::log_sum_exp(&logp);
    logp.iter_mut().for_each(|x| *x -= z);
    logp
}

fn advance<M: StepModel>(
    model: &M,
    state: &M::State,
    token: u32,
    banned: &[u32],
) -> Result<(Vec<f64>, M::State), Seq2SeqError> {
    let (logp, next) = model.step(state, token)?;
    Ok((restrict(logp, banned), next))
}

/// Length-unnormalized beam search from `init`.
///
/// Each round expands every alive hypothesis by every allowed token and keeps
/// the best `beam_width` expansions (score descending, then token ids
/// ascending). Expansions that emit `eos` or reach `max_len` move to the
/// result pool. Search stops when nothing is alive or no alive hypothesis can
/// still enter the top `beam_width` of the pool.
pub fn beam_search<M: StepModel>(model: &M, init: M::State, cfg: &BeamConfig) -> Result<Vec<Scored>, Seq2SeqError> {
    let width = cfg.beam_width.max(1);
    let (next, state) = advance(model, &init, cfg.bos, &cfg.banned)?;
    let mut alive = vec![Alive { tokens: Vec::new(), score: 0.0, state, next }];
    let mut pool: Vec<Scored> = Vec::new();

    for len in 1..=cfg.max_len {
        let mut cands: Vec<(Scored, usize)> = Vec::new();
        for (parent, hyp) in alive.iter().enumerate() {
            for (tok, &lp) in hyp.next.iter().enumerate() {
                if lp == f64::NEG_INFINITY {
                    continue;
                }
                let mut tokens = hyp.tokens.clone();
                tokens.push(tok as u32);
                cands.push((Scored { tokens, score: hyp.score + lp }, parent));
            }
        }
        cands.sort_by(|a, b| rank(&a.0, &b.0));
        cands.truncate(width);

        let mut next_alive = Vec::new();
        for (cand, parent) in cands {
            let last = *cand.tokens.last().expect("non-empty");
            if last == cfg.eos || len == cfg.max_len {
                pool.push(cand);
            } else {
                let (next, state) = advance(model, &alive[parent].state, last, &cfg.banned)?;
                next_alive.push(Alive { tokens: cand.tokens, score: cand.score, state, next });
            }
        }
        alive = next_alive;
        if alive.is_empty() {
            break;
        }
        if pool.len() >= width {
            pool.sort_by(rank);
            let cutoff = pool[width - 1].score;
            let best_alive = alive.iter().map(|h| h.score).fold(f64::NEG_INFINITY, f64::max);
            if best_alive < cutoff {
                break;
            }
        }
    }
    pool.sort_by(rank);
    pool.truncate(width);
    Ok(pool)
}

/// Argmax decoding; ties go to the lowest token id.
pub fn greedy<M: StepModel>(model: &M, init: M::State, cfg: &BeamConfig) -> Result<Scored, Seq2SeqError> {
    let (mut next, mut state) = advance(model, &init, cfg.bos, &cfg.banned)?;
    let mut out = Scored { tokens: Vec::new(), score: 0.0 };
    for len in 1..=cfg.max_len {
        let (tok, lp) = next
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |best, (i, &lp)| if lp > best.1 { (i, lp) } else { best });
        out.tokens.push(tok as u32);
        out.score += lp;
        if tok as u32 == cfg.eos || len == cfg.max_len {
            break;
        }
        (next, state) = advance(model, &state, tok as u32, &cfg.banned)?;
    }
    Ok(out)
}
