use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::graph::AtlasGraph;
use super::phrase::word_count;
use super::taxonomy::ContentType;

/// Mean of token counts kept as an exact ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WordAverage {
    pub words: u64,
    pub nodes: u64,
}

impl WordAverage {
    pub fn mean(&self) -> f64 {
        if self.nodes == 0 {
            0.0
        } else {
            self.words as f64 / self.nodes as f64
        }
    }
}

/// Table-of-statistics view of a graph. Empty annotations are excluded from
/// every count except `empty_annotations`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StatsReport {
    pub triples_total: u64,
    pub triples_by_content_type: BTreeMap<ContentType, u64>,
    pub nodes_total: u64,
    pub nodes_by_content_type: BTreeMap<ContentType, u64>,
    pub avg_words_per_node: BTreeMap<ContentType, WordAverage>,
    pub avg_words_all_nodes: WordAverage,
    pub avg_words_base_events: WordAverage,
    pub base_event_count: u64,
    pub nodes_appearing_multiple: u64,
    pub empty_annotations: u64,
}

pub fn graph_stats(graph: &AtlasGraph) -> StatsReport {
    let mut report = StatsReport::default();
    for ct in ContentType::ALL {
        report.triples_by_content_type.insert(ct, 0);
        report.nodes_by_content_type.insert(ct, 0);
        report.avg_words_per_node.insert(ct, WordAverage::default());
    }

    let mut typed_nodes: BTreeMap<ContentType, BTreeSet<String>> = BTreeMap::new();
    let mut node_text: BTreeMap<String, usize> = BTreeMap::new();
    let mut occurrences: BTreeMap<String, u64> = BTreeMap::new();

    for t in graph.triples() {
        if t.target.is_empty() {
            report.empty_annotations += 1;
            continue;
        }
        let ct = t.dimension.coords().content_type;
        report.triples_total += 1;
        *report.triples_by_content_type.entry(ct).or_default() += 1;

        let event_key = t.event.key();
        let target_key = t.target.key();
        node_text.entry(event_key.clone()).or_insert_with(|| word_count(t.event.text()));
        node_text.entry(target_key.clone()).or_insert_with(|| word_count(t.target.text()));
        typed_nodes.entry(ct).or_default().insert(target_key.clone());

        *occurrences.entry(event_key.clone()).or_default() += 1;
        if target_key != event_key {
            *occurrences.entry(target_key).or_default() += 1;
        }
    }

    for (ct, keys) in &typed_nodes {
        report.nodes_by_content_type.insert(*ct, keys.len() as u64);
        let words = keys.iter().map(|k| node_text[k] as u64).sum();
        report.avg_words_per_node.insert(*ct, WordAverage { words, nodes: keys.len() as u64 });
    }

    // Events that only carry empty annotations are still nodes.
    for (key, event) in graph.events() {
        node_text.entry(key.clone()).or_insert_with(|| word_count(event.text()));
    }
    report.nodes_total = node_text.len() as u64;
    report.avg_words_all_nodes = WordAverage {
        words: node_text.values().map(|&w| w as u64).sum(),
        nodes: node_text.len() as u64,
    };

    report.base_event_count = graph.events().len() as u64;
    report.avg_words_base_events = WordAverage {
        words: graph.events().values().map(|e| word_count(e.text()) as u64).sum(),
        nodes: graph.events().len() as u64,
    };
    report.nodes_appearing_multiple = occurrences.values().filter(|&&c| c > 1).count() as u64;
    report
}
