//! Leakage-free train/dev/test assignment.
//!
//! Events whose first two content words agree form one group, and whole groups
//! are assigned to a split. Groups are shuffled with the seed, stably sorted
//! largest first, and each group goes to the split with the largest remaining
//! deficit against its target size (ties: train, dev, test). With this rule
//! every split ends within one maximum group size of its target.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{IngestError, WordSet};
use crate::atlas::{node_key, EventPhrase, PersonVar, Split, Triple, BLANK};

/// First two content words of an event, lowercased; missing words are "".
pub fn content_key(event: &EventPhrase, stopwords: &WordSet) -> (String, String) {
    let mut words = event
        .tokens()
        .filter(|t| PersonVar::from_token(t).is_none() && *t != BLANK && !stopwords.contains(t))
        .map(str::to_lowercase);
    let first = words.next().unwrap_or_default();
    let second = words.next().unwrap_or_default();
    (first, second)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self { train: 0.8, dev: 0.1, test: 0.1 }
    }
}

impl SplitRatios {
    pub fn new(train: f64, dev: f64, test: f64) -> Result<Self, IngestError> {
        let r = Self { train, dev, test };
        r.validate()?;
        Ok(r)
    }

    fn as_array(&self) -> [f64; 3] {
        [self.train, self.dev, self.test]
    }

    fn validate(&self) -> Result<(), IngestError> {
        let a = self.as_array();
        if a.iter().any(|r| !r.is_finite() || *r < 0.0) || (a.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(IngestError::BadRatios(a));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitAssignment {
    /// Node key of each event to its split.
    pub assignments: BTreeMap<String, Split>,
    pub ratios: SplitRatios,
    pub seed: u64,
}

impl SplitAssignment {
    pub fn split_of(&self, event_text: &str) -> Option<Split> {
        self.assignments.get(&node_key(event_text)).copied()
    }

    /// Number of events per split, in train, dev, test order.
    pub fn counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for s in self.assignments.values() {
            c[*s as usize] += 1;
        }
        c
    }

    /// Relabels triples with their event's split. Triples whose event was not
    /// assigned are returned unchanged.
    pub fn apply(&self, triples: &mut [Triple]) {
        for t in triples {
            if let Some(s) = self.split_of(t.event.text()) {
                t.split = s;
            }
        }
    }
}

pub fn split_events(
    events: &[EventPhrase],
    ratios: SplitRatios,
    seed: u64,
    stopwords: &WordSet,
) -> Result<SplitAssignment, IngestError> {
    ratios.validate()?;

    let mut groups: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    let mut seen = std::collections::BTreeSet::new();
    for e in events {
        let key = e.key();
        if seen.insert(key.clone()) {
            groups.entry(content_key(e, stopwords)).or_default().push(key);
        }
    }
    let targets_arr = ratios.as_array();
    let positive = targets_arr.iter().filter(|r| **r > 0.0).count();
    if positive == 3 && groups.len() < 3 {
        return Err(IngestError::TooFewGroups { groups: groups.len() });
    }

    let mut ordered: Vec<Vec<String>> = groups.into_values().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ordered.shuffle(&mut rng);
    ordered.sort_by(|a, b| b.len().cmp(&a.len()));

    let total = seen.len() as f64;
    let targets = targets_arr.map(|r| r * total);
    let mut sizes = [0usize; 3];
    let mut assignments = BTreeMap::new();
    for group in ordered {
        let mut best = 0;
        for s in 1..3 {
            let deficit = targets[s] - sizes[s] as f64;
            let best_deficit = targets[best] - sizes[best] as f64;
            if deficit > best_deficit + 1e-9 {
                best = s;
            }
        }
        sizes[best] += group.len();
        for key in group {
            assignments.insert(key, Split::ALL[best]);
        }
    }
    Ok(SplitAssignment { assignments, ratios, seed })
}
