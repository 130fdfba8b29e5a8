//! Alignment with an external concept graph: which atlas triples also appear
//! as edges under a comparable relation, and how many base events appear as
//! concepts at all.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::atlas::{node_key, AtlasGraph, Dimension, PersonVar};

#[derive(Debug, thiserror::Error)]
pub enum OverlapError {
    #[error("edge file line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationGroup {
    Wants,
    Effects,
    Needs,
    Intents,
    Reactions,
    Attributes,
}

impl RelationGroup {
    pub const ALL: [RelationGroup; 6] = [
        RelationGroup::Wants,
        RelationGroup::Effects,
        RelationGroup::Needs,
        RelationGroup::Intents,
        RelationGroup::Reactions,
        RelationGroup::Attributes,
    ];

    pub fn dimensions(self) -> &'static [Dimension] {
        use Dimension::*;
        match self {
            RelationGroup::Wants => &[XWant, OWant],
            RelationGroup::Effects => &[XEffect, OEffect],
            RelationGroup::Needs => &[XNeed],
            RelationGroup::Intents => &[XIntent],
            RelationGroup::Reactions => &[XReact, OReact],
            RelationGroup::Attributes => &[XAttr],
        }
    }

    pub fn relations(self) -> &'static [&'static str] {
        match self {
            RelationGroup::Wants => &["MotivatedByGoal", "HasSubevent", "HasFirstSubevent", "CausesDesire"],
            RelationGroup::Effects => &["Causes", "HasSubevent", "HasFirstSubevent", "HasLastSubevent"],
            RelationGroup::Needs => &["MotivatedByGoal", "Entails", "HasPrerequisite"],
            RelationGroup::Intents => &["MotivatedByGoal", "CausesDesire", "HasSubevent", "HasFirstSubevent"],
            RelationGroup::Reactions => &["Causes", "HasLastSubevent", "HasSubevent"],
            RelationGroup::Attributes => &["HasProperty"],
        }
    }

    pub fn of(dim: Dimension) -> RelationGroup {
        RelationGroup::ALL.into_iter().find(|g| g.dimensions().contains(&dim)).expect("every dimension has a group")
    }
}

impl fmt::Display for RelationGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupMapping {
    pub dimensions: BTreeSet<Dimension>,
    pub relations: BTreeSet<String>,
}

/// The fixed dimension-group to relation table.
pub fn dimension_relation_map() -> BTreeMap<RelationGroup, GroupMapping> {
    RelationGroup::ALL
        .into_iter()
        .map(|g| {
            let m = GroupMapping {
                dimensions: g.dimensions().iter().copied().collect(),
                relations: g.relations().iter().map(|s| s.to_string()).collect(),
            };
            (g, m)
        })
        .collect()
}

/// An edge with lowercased, whitespace-collapsed concepts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExternalEdge {
    relation: String,
    start: String,
    end: String,
}

impl ExternalEdge {
    /// `None` if any field is empty after normalization.
    pub fn new(relation: &str, start: &str, end: &str) -> Option<Self> {
        let relation = relation.trim().to_string();
        let (start, end) = (node_key(start), node_key(end));
        (!relation.is_empty() && !start.is_empty() && !end.is_empty()).then_some(Self { relation, start, end })
    }

    pub fn relation(&self) -> &str {
        &self.relation
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn end(&self) -> &str {
        &self.end
    }
}

/// Parses `relation<TAB>start<TAB>end` lines; `#` starts a comment line.
pub fn parse_edges(input: &str) -> Result<Vec<ExternalEdge>, OverlapError> {
    let mut out = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        let text = raw.strip_suffix('\r').unwrap_or(raw);
        if text.trim().is_empty() || text.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = text.split('\t').collect();
        if cols.len() != 3 {
            return Err(OverlapError::Parse { line, message: format!("expected 3 columns, found {}", cols.len()) });
        }
        let edge = ExternalEdge::new(cols[0], cols[1], cols[2])
            .ok_or_else(|| OverlapError::Parse { line, message: "empty relation or concept".into() })?;
        out.push(edge);
    }
    Ok(out)
}

/// Default text-to-concept normalizer: person variables (with any attached
/// suffix such as `'s`) are removed, text is lowercased and whitespace
/// collapsed, then a leading "to " and a leading "the " are dropped.
pub fn normalize_concept(text: &str) -> String {
    let kept: Vec<&str> = text.split_whitespace().filter(|t| PersonVar::from_token(t).is_none()).collect();
    let mut s = kept.join(" ").to_lowercase();
    for prefix in ["to ", "the "] {
        if let Some(rest) = s.strip_prefix(prefix) {
            s = rest.to_string();
        }
    }
    s
}

/// Edge lookup tables.
#[derive(Debug, Clone, Default)]
pub struct EdgeIndex {
    pairs: HashMap<String, HashSet<(String, String)>>,
    concepts: HashSet<String>,
}

impl EdgeIndex {
    pub fn new<'a>(edges: impl IntoIterator<Item = &'a ExternalEdge>) -> Self {
        let mut idx = Self::default();
        for e in edges {
            idx.pairs.entry(e.relation.clone()).or_default().insert((e.start.clone(), e.end.clone()));
            idx.concepts.insert(e.start.clone());
            idx.concepts.insert(e.end.clone());
        }
        idx
    }

    pub fn has_edge(&self, relation: &str, start: &str, end: &str) -> bool {
        self.pairs.get(relation).is_some_and(|s| s.contains(&(start.to_string(), end.to_string())))
    }

    pub fn has_concept(&self, concept: &str) -> bool {
        self.concepts.contains(concept)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapCount {
    pub overlapping: usize,
    pub total: usize,
    /// 0 when `total` is 0.
    pub percent: f64,
}

impl OverlapCount {
    fn new(overlapping: usize, total: usize) -> Self {
        let percent = if total == 0 { 0.0 } else { 100.0 * overlapping as f64 / total as f64 };
        Self { overlapping, total, percent }
    }
}

/// Overlap for one group. Triples with empty targets are not counted.
pub fn group_overlap(
    graph: &AtlasGraph,
    index: &EdgeIndex,
    group: RelationGroup,
    normalizer: &dyn Fn(&str) -> String,
) -> OverlapCount {
    let (mut hit, mut total) = (0, 0);
    for t in graph.triples() {
        if t.target.is_empty() || !group.dimensions().contains(&t.dimension) {
            continue;
        }
        total += 1;
        let (s, e) = (normalizer(t.event.text()), normalizer(t.target.text()));
        if group.relations().iter().any(|r| index.has_edge(r, &s, &e)) {
            hit += 1;
        }
    }
    OverlapCount::new(hit, total)
}

/// Percentage of non-empty triples per group that match an edge of one of
/// the group's relations after normalization.
pub fn triple_overlap(
    graph: &AtlasGraph,
    edges: &[ExternalEdge],
    normalizer: &dyn Fn(&str) -> String,
) -> BTreeMap<RelationGroup, OverlapCount> {
    let index = EdgeIndex::new(edges);
    RelationGroup::ALL.into_iter().map(|g| (g, group_overlap(graph, &index, g, normalizer))).collect()
}

/// Share of base events whose normalized text is some edge's start or end.
pub fn event_coverage(graph: &AtlasGraph, edges: &[ExternalEdge], normalizer: &dyn Fn(&str) -> String) -> OverlapCount {
    let index = EdgeIndex::new(edges);
    let covered = graph.events().values().filter(|e| index.has_concept(&normalizer(e.text()))).count();
    OverlapCount::new(covered, graph.events().len())
}
