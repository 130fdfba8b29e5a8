use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::bleu::{bleu2, bleu_tokens, BleuConfig};
use crate::atlas::{node_key, AtlasGraph, Dimension, InferenceTarget, Split};
use crate::generate::GenerationList;

/// False iff at least a third of the annotations are the empty sentinel.
/// Compared in integers, so the one-third boundary is exact.
pub fn is_instance_evaluable(annotations: &[InferenceTarget]) -> bool {
    let empty = annotations.iter().filter(|a| a.is_empty()).count();
    counts_evaluable(empty, annotations.len())
}

fn counts_evaluable(empty: usize, total: usize) -> bool {
    total > 0 && 3 * empty < total
}

/// Gold annotations for one (event, dimension): every worker's annotation
/// counts once.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GoldSet {
    pub empty_annotations: usize,
    pub total_annotations: usize,
    /// Distinct non-empty targets as BLEU tokens.
    pub references: Vec<Vec<String>>,
}

impl GoldSet {
    pub fn is_evaluable(&self) -> bool {
        counts_evaluable(self.empty_annotations, self.total_annotations)
    }
}

/// Gold sets keyed by (event key, dimension).
#[derive(Debug, Clone, Default)]
pub struct GoldIndex {
    sets: BTreeMap<(String, Dimension), GoldSet>,
}

impl GoldIndex {
    /// Indexes `gold`, restricted to `split` when given.
    pub fn new(gold: &AtlasGraph, split: Option<Split>) -> Self {
        let mut sets: BTreeMap<(String, Dimension), GoldSet> = BTreeMap::new();
        let mut seen_refs: BTreeSet<(String, Dimension, String)> = BTreeSet::new();
        for t in gold.triples() {
            if split.is_some_and(|s| s != t.split) {
                continue;
            }
            let key = (t.event.key(), t.dimension);
            let set = sets.entry(key.clone()).or_default();
            let n = t.annotation_count();
            set.total_annotations += n;
            if t.target.is_empty() {
                set.empty_annotations += n;
            } else if seen_refs.insert((key.0, key.1, t.target.key())) {
                set.references.push(bleu_tokens(t.target.text()));
            }
        }
        Self { sets }
    }

    pub fn get(&self, event: &str, dimension: Dimension) -> Option<&GoldSet> {
        self.sets.get(&(node_key(event), dimension))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InstanceOutcome {
    /// Mean BLEU-2 of the top-k predictions, in [0, 1].
    Scored(f64),
    /// A third or more of the gold annotations are empty.
    Omitted,
    /// No gold annotations for the pair.
    NoGold,
}

/// Scores one generation list against its gold set. The mean is over the
/// first `min(k, entries)` predictions; a list with no predictions scores 0.
pub fn score_instance(list: &GenerationList, gold: &GoldIndex, k: usize, cfg: &BleuConfig) -> InstanceOutcome {
    let Some(set) = gold.get(&list.event, list.dimension) else {
        return InstanceOutcome::NoGold;
    };
    if !set.is_evaluable() {
        return InstanceOutcome::Omitted;
    }
    let preds: Vec<_> = list.entries.iter().take(k).collect();
    if preds.is_empty() {
        return InstanceOutcome::Scored(0.0);
    }
    let sum: f64 = preds.iter().map(|g| bleu2(&bleu_tokens(&g.text), &set.references, cfg)).sum();
    InstanceOutcome::Scored(sum / preds.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionScore {
    /// Mean instance BLEU-2 as a percentage.
    pub bleu: f64,
    /// Instances with gold annotations: evaluated plus omitted.
    pub instances: usize,
    pub evaluated: usize,
    pub omitted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalMeta {
    pub split: Option<Split>,
    pub k: usize,
    pub epsilon: f64,
    pub smoothing: super::SmoothingScope,
    pub instances: usize,
    pub evaluated: usize,
    pub omitted: usize,
    /// Generation lists with no gold annotations, excluded from every count
    /// above.
    pub skipped_no_gold: usize,
    /// Mean of the per-dimension percentages over dimensions with at least
    /// one evaluated instance.
    pub average: f64,
}

/// Per-dimension averages keyed by dimension name, plus a `meta` block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub meta: EvalMeta,
    #[serde(flatten)]
    pub dimensions: BTreeMap<Dimension, DimensionScore>,
}

/// Folds outcomes (in generation order) into a report. Dimensions whose
/// instances were all omitted report a BLEU of 0.
pub fn aggregate(
    lists: &[GenerationList],
    outcomes: &[InstanceOutcome],
    split: Option<Split>,
    k: usize,
    cfg: &BleuConfig,
) -> EvalReport {
    let mut meta = EvalMeta {
        split,
        k,
        epsilon: cfg.epsilon,
        smoothing: cfg.smoothing,
        instances: 0,
        evaluated: 0,
        omitted: 0,
        skipped_no_gold: 0,
        average: 0.0,
    };
    let mut sums: BTreeMap<Dimension, (f64, DimensionScore)> = BTreeMap::new();
    for (list, outcome) in lists.iter().zip(outcomes) {
        if *outcome == InstanceOutcome::NoGold {
            meta.skipped_no_gold += 1;
            continue;
        }
        let entry = sums
            .entry(list.dimension)
            .or_insert((0.0, DimensionScore { bleu: 0.0, instances: 0, evaluated: 0, omitted: 0 }));
        entry.1.instances += 1;
        meta.instances += 1;
        match outcome {
            InstanceOutcome::Scored(s) => {
                entry.0 += s;
                entry.1.evaluated += 1;
                meta.evaluated += 1;
            }
            _ => {
                entry.1.omitted += 1;
                meta.omitted += 1;
            }
        }
    }
    let dimensions: BTreeMap<Dimension, DimensionScore> = sums
        .into_iter()
        .map(|(d, (sum, mut s))| {
            if s.evaluated > 0 {
                s.bleu = 100.0 * sum / s.evaluated as f64;
            }
            (d, s)
        })
        .collect();
    let scored: Vec<f64> = dimensions.values().filter(|s| s.evaluated > 0).map(|s| s.bleu).collect();
    if !scored.is_empty() {
        meta.average = scored.iter().sum::<f64>() / scored.len() as f64;
    }
    EvalReport { meta, dimensions }
}

/// Average top-k BLEU-2 of `lists` against `gold`.
pub fn avg_topk_bleu(
    lists: &[GenerationList],
    gold: &AtlasGraph,
    split: Option<Split>,
    k: usize,
    cfg: &BleuConfig,
) -> EvalReport {
    let index = GoldIndex::new(gold, split);
    let outcomes: Vec<_> = lists.iter().map(|l| score_instance(l, &index, k, cfg)).collect();
    aggregate(lists, &outcomes, split, k, cfg)
}
