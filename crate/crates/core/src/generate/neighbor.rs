use std::collections::{BTreeMap, BTreeSet};

use super::{Generation, GenerationList};
use crate::atlas::{AtlasGraph, Dimension};
use crate::seq2seq::StaticEmbeddings;

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / (na * nb)
}

struct Candidate {
    event: String,
    vector: Option<Vec<f64>>,
    /// Distinct non-empty targets, most annotated first, then by text.
    targets: Vec<String>,
}

/// Training events per dimension with precomputed mean token vectors.
pub struct NearestNeighborIndex<'a> {
    embeddings: &'a StaticEmbeddings,
    by_dim: BTreeMap<Dimension, Vec<Candidate>>,
}

impl<'a> NearestNeighborIndex<'a> {
    /// Indexes every triple of `graph`; pass a graph holding only training
    /// data.
    pub fn new(graph: &AtlasGraph, embeddings: &'a StaticEmbeddings) -> Self {
        let mut grouped: BTreeMap<(Dimension, String), Vec<(usize, String)>> = BTreeMap::new();
        let mut display: BTreeMap<String, String> = BTreeMap::new();
        for t in graph.triples() {
            if t.target.is_empty() {
                continue;
            }
            display.entry(t.event.key()).or_insert_with(|| t.event.text().to_string());
            grouped
                .entry((t.dimension, t.event.key()))
                .or_default()
                .push((t.annotation_count(), t.target.text().to_string()));
        }
        let mut by_dim: BTreeMap<Dimension, Vec<Candidate>> = BTreeMap::new();
        for ((dim, key), mut targets) in grouped {
            targets.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
            let event = display[&key].clone();
            by_dim.entry(dim).or_default().push(Candidate {
                vector: embeddings.mean_vector(&event),
                event,
                targets: targets.into_iter().map(|(_, t)| t).collect(),
            });
        }
        Self { embeddings, by_dim }
    }

    /// Targets of the most similar training events, up to `k` distinct ones.
    /// Each entry is scored with its source event's similarity. Events are
    /// ranked by similarity, ties broken by event text.
    pub fn predict(&self, event: &str, dimension: Dimension, k: usize) -> GenerationList {
        let mut list = GenerationList { event: event.to_string(), dimension, beam_width: k, entries: Vec::new() };
        let Some(cands) = self.by_dim.get(&dimension) else {
            return list;
        };
        let query = self.embeddings.mean_vector(event);
        let mut ranked: Vec<(f64, &Candidate)> = cands
            .iter()
            .map(|c| {
                let sim = match (&query, &c.vector) {
                    (Some(q), Some(v)) => cosine(q, v),
                    _ => 0.0,
                };
                (sim, c)
            })
            .collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.event.cmp(&b.1.event)));
        let mut seen = BTreeSet::new();
        'outer: for (sim, c) in ranked {
            for t in &c.targets {
                if list.entries.len() >= k {
                    break 'outer;
                }
                if seen.insert(crate::atlas::node_key(t)) {
                    list.entries.push(Generation { text: t.clone(), score: sim });
                }
            }
        }
        list
    }
}

pub fn nearest_neighbor_predict(
    train_graph: &AtlasGraph,
    embeddings: &StaticEmbeddings,
    event: &str,
    dimension: Dimension,
    k: usize,
) -> GenerationList {
    NearestNeighborIndex::new(train_graph, embeddings).predict(event, dimension, k)
}
