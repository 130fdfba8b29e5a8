use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::phrase::{node_key, EventPhrase, InferenceTarget, PersonVar};
use super::taxonomy::Dimension;
use super::AtlasError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = AtlasError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            other => Err(AtlasError::UnknownSplit(other.to_string())),
        }
    }
}

/// One worker's `<event, dimension, inference>` annotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub event: EventPhrase,
    pub dimension: Dimension,
    pub target: InferenceTarget,
    pub worker_id: String,
    pub split: Split,
}

impl Triple {
    pub fn new(
        event: &str,
        dimension: Dimension,
        target: &str,
        split: Split,
        worker_id: &str,
    ) -> Result<Self, AtlasError> {
        Ok(Self {
            event: EventPhrase::new(event)?,
            dimension,
            target: InferenceTarget::new(target)?,
            worker_id: worker_id.to_string(),
            split,
        })
    }

    fn sort_key(&self) -> (String, Dimension, String, &str) {
        (self.event.key(), self.dimension, self.target.key(), self.worker_id.as_str())
    }
}

/// Canonical order: event key, dimension name, target key, worker id.
pub fn sort_triples(triples: &mut [Triple]) {
    triples.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

/// A distinct triple with every worker that contributed it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphTriple {
    pub event: EventPhrase,
    pub dimension: Dimension,
    pub target: InferenceTarget,
    pub split: Split,
    pub workers: BTreeSet<String>,
}

impl GraphTriple {
    /// Number of individual annotations collapsed into this triple.
    pub fn annotation_count(&self) -> usize {
        self.workers.len().max(1)
    }
}

/// A non-fatal observation made while building the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    /// An o-dimension target mentions PersonY but the event has no PersonY.
    ImpliedParticipant { event: String, dimension: Dimension, target: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::ImpliedParticipant { event, dimension, target } => write!(
                f,
                "{dimension} target {target:?} refers to PersonY, which {event:?} only implies"
            ),
        }
    }
}

/// Immutable, deduplicated view over a set of triples.
#[derive(Debug, Clone, Default)]
pub struct AtlasGraph {
    triples: Vec<GraphTriple>,
    events: BTreeMap<String, EventPhrase>,
    nodes: BTreeSet<String>,
    adjacency: BTreeMap<(String, Dimension), Vec<usize>>,
    diagnostics: Vec<Diagnostic>,
}

/// Collapses duplicate triples and indexes them by `(event, dimension)`.
///
/// Two triples are the same when their event keys, dimensions and target keys
/// agree. The displayed text kept for a collapsed group is the
/// lexicographically smallest variant, so the result does not depend on the
/// input order.
pub fn build_graph(triples: impl IntoIterator<Item = Triple>) -> Result<AtlasGraph, AtlasError> {
    let mut groups: BTreeMap<(String, Dimension, String), GraphTriple> = BTreeMap::new();
    let mut event_splits: BTreeMap<String, Split> = BTreeMap::new();

    for t in triples {
        let event_key = t.event.key();
        match event_splits.get(&event_key) {
            Some(&s) if s != t.split => {
                return Err(AtlasError::SplitConflict {
                    event: t.event.text().to_string(),
                    first: s,
                    second: t.split,
                });
            }
            Some(_) => {}
            None => {
                event_splits.insert(event_key.clone(), t.split);
            }
        }

        let key = (event_key, t.dimension, t.target.key());
        match groups.get_mut(&key) {
            Some(existing) => {
                existing.workers.insert(t.worker_id);
                if t.event.text() < existing.event.text() {
                    existing.event = t.event;
                }
                if t.target.text() < existing.target.text() {
                    existing.target = t.target;
                }
            }
            None => {
                let mut workers = BTreeSet::new();
                workers.insert(t.worker_id);
                groups.insert(
                    key,
                    GraphTriple {
                        event: t.event,
                        dimension: t.dimension,
                        target: t.target,
                        split: t.split,
                        workers,
                    },
                );
            }
        }
    }

    let mut graph = AtlasGraph::default();
    for ((event_key, dim, target_key), gt) in groups {
        let event = graph.events.entry(event_key.clone()).or_insert_with(|| gt.event.clone());
        if gt.event.text() < event.text() {
            *event = gt.event.clone();
        }
        graph.nodes.insert(event_key.clone());
        if !gt.target.is_empty() {
            graph.nodes.insert(target_key);
            if dim.is_other()
                && !gt.event.person_slots().contains(&PersonVar::PersonY)
                && gt.target.text().split(' ').any(|tok| PersonVar::from_token(tok) == Some(PersonVar::PersonY))
            {
                let d = Diagnostic::ImpliedParticipant {
                    event: gt.event.text().to_string(),
                    dimension: dim,
                    target: gt.target.text().to_string(),
                };
                log::warn!("{d}");
                graph.diagnostics.push(d);
            }
        }
        graph.adjacency.entry((event_key, dim)).or_default().push(graph.triples.len());
        graph.triples.push(gt);
    }
    Ok(graph)
}

impl AtlasGraph {
    /// Distinct triples in canonical order, including empty annotations.
    pub fn triples(&self) -> &[GraphTriple] {
        &self.triples
    }

    /// Base events keyed by node key.
    pub fn events(&self) -> &BTreeMap<String, EventPhrase> {
        &self.events
    }

    /// Node keys of events and non-empty targets.
    pub fn nodes(&self) -> &BTreeSet<String> {
        &self.nodes
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Triples stored under `(event, dimension)`, empties included.
    pub fn triples_for(&self, event_text: &str, dim: Dimension) -> impl Iterator<Item = &GraphTriple> {
        self.adjacency
            .get(&(node_key(event_text), dim))
            .into_iter()
            .flatten()
            .map(|&i| &self.triples[i])
    }

    /// The `(event key, dimension)` pairs present in the graph, in order.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, Dimension)> {
        self.adjacency.keys().map(|(e, d)| (e.as_str(), *d))
    }

    /// Split label of an event, if the event is in the graph.
    pub fn split_of(&self, event_text: &str) -> Option<Split> {
        let key = node_key(event_text);
        let (_, idxs) = self.adjacency.range((key.clone(), Dimension::ALL[0])..).next()?;
        let t = &self.triples[idxs[0]];
        (t.event.key() == key).then_some(t.split)
    }

    pub fn query_inferences(&self, event_text: &str, dim: Dimension) -> Vec<&InferenceTarget> {
        self.query_inferences_with(event_text, dim, false)
    }

    pub fn query_inferences_with(
        &self,
        event_text: &str,
        dim: Dimension,
        include_empty: bool,
    ) -> Vec<&InferenceTarget> {
        self.triples_for(event_text, dim)
            .filter(|t| include_empty || !t.target.is_empty())
            .map(|t| &t.target)
            .collect()
    }

    /// Expands the graph back into one triple per contributing worker.
    pub fn to_triples(&self) -> Vec<Triple> {
        let mut out = Vec::new();
        for gt in &self.triples {
            for w in &gt.workers {
                out.push(Triple {
                    event: gt.event.clone(),
                    dimension: gt.dimension,
                    target: gt.target.clone(),
                    worker_id: w.clone(),
                    split: gt.split,
                });
            }
        }
        sort_triples(&mut out);
        out
    }

    /// Restricts the graph to the events of one split.
    pub fn filter_split(&self, split: Split) -> Result<AtlasGraph, AtlasError> {
        build_graph(self.to_triples().into_iter().filter(|t| t.split == split))
    }
}
