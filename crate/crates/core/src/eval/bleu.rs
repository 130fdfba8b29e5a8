use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::atlas::node_key;

/// Which zero-count precisions receive the additive epsilon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothingScope {
    /// Every order with a zero numerator, unigrams included. A candidate that
    /// shares nothing with the references then scores a small positive floor.
    AllOrders,
    /// Only orders above one; no unigram overlap gives 0.
    HigherOrders,
}

impl SmoothingScope {
    pub fn as_str(self) -> &'static str {
        match self {
            SmoothingScope::AllOrders => "all-orders",
            SmoothingScope::HigherOrders => "higher-orders",
        }
    }
}

impl fmt::Display for SmoothingScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SmoothingScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all-orders" => Ok(SmoothingScope::AllOrders),
            "higher-orders" => Ok(SmoothingScope::HigherOrders),
            _ => Err(format!("unknown smoothing scope {s:?} (all-orders, higher-orders)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BleuConfig {
    pub epsilon: f64,
    pub smoothing: SmoothingScope,
}

impl Default for BleuConfig {
    fn default() -> Self {
        Self { epsilon: 0.1, smoothing: SmoothingScope::AllOrders }
    }
}

/// Lowercased whitespace tokens.
pub fn bleu_tokens(text: &str) -> Vec<String> {
    node_key(text).split_whitespace().map(str::to_string).collect()
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut m = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *m.entry(w.iter().map(AsRef::as_ref).collect()).or_insert(0) += 1;
        }
    }
    m
}

/// Sentence BLEU with orders 1 and 2, uniform weights, closest-reference
/// brevity penalty (ties to the shorter reference) and additive smoothing of
/// zero numerators. Denominators are at least 1. An empty candidate or an
/// empty reference list scores 0.
pub fn bleu2<S: AsRef<str>, R: AsRef<[S]>>(candidate: &[S], references: &[R], cfg: &BleuConfig) -> f64 {
    if candidate.is_empty() || references.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=2 {
        let cand = ngram_counts(candidate, n);
        let mut max_ref: HashMap<Vec<&str>, usize> = HashMap::new();
        for r in references {
            for (g, c) in ngram_counts(r.as_ref(), n) {
                let e = max_ref.entry(g).or_insert(0);
                *e = (*e).max(c);
            }
        }
        let matched: usize = cand.iter().map(|(g, c)| (*c).min(max_ref.get(g).copied().unwrap_or(0))).sum();
        let total = candidate.len().saturating_sub(n - 1).max(1);
        let smooth = matched == 0 && (n > 1 || cfg.smoothing == SmoothingScope::AllOrders);
        let numer = if smooth { cfg.epsilon } else { matched as f64 };
        if numer <= 0.0 {
            return 0.0;
        }
        log_sum += 0.5 * (numer / total as f64).ln();
    }
    let c = candidate.len();
    let r = references
        .iter()
        .map(|r| r.as_ref().len())
        .min_by_key(|&len| (len.abs_diff(c), len))
        .expect("non-empty");
    let bp = if c > r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    bp * log_sum.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        bleu_tokens(s)
    }

    #[test]
    fn identical_is_one() {
        let c = toks("to go home");
        assert!((bleu2(&c, &[c.clone()], &BleuConfig::default()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_brevity() {
        let v = bleu2(&toks("a b"), &[toks("a b c d")], &BleuConfig::default());
        assert!((v - (-1f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn unigram_only_overlap() {
        // p1 = 2/2, p2 = 0.1/1, BP = 1
        let v = bleu2(&toks("b a"), &[toks("a b")], &BleuConfig::default());
        assert!((v - 0.1f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn no_overlap_floor() {
        let cfg = BleuConfig::default();
        let v = bleu2(&toks("x y"), &[toks("a b")], &cfg);
        // p1 = 0.1/2, p2 = 0.1/1
        assert!((v - (0.05f64 * 0.1).sqrt()).abs() < 1e-12);
        let hi = BleuConfig { smoothing: SmoothingScope::HigherOrders, ..cfg };
        assert_eq!(bleu2(&toks("x y"), &[toks("a b")], &hi), 0.0);
        assert_eq!(bleu2::<String, Vec<String>>(&[], &[toks("a")], &cfg), 0.0);
    }

    #[test]
    fn brevity_tie_prefers_shorter() {
        // c = 3, refs of length 2 and 4 are equally close; shorter wins so BP = 1
        let v = bleu2(&toks("a b c"), &[toks("a b c d"), toks("a b")], &BleuConfig::default());
        assert!((v - 1.0).abs() < 1e-12);
    }
}
