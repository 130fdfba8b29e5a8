use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::atlas::{EventPhrase, PersonVar, BLANK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusSource {
    Stories,
    Blogs,
    Ngrams,
}

impl CorpusSource {
    /// Minimum co-occurrence count for stories and blogs.
    pub const STORIES_MIN_COUNT: u64 = 5;
    pub const BLOGS_MIN_COUNT: u64 = 100;
    /// N-gram events are limited to the most frequent entries.
    pub const NGRAMS_TOP_RANK: usize = 10_000;

    pub fn as_str(self) -> &'static str {
        match self {
            CorpusSource::Stories => "stories",
            CorpusSource::Blogs => "blogs",
            CorpusSource::Ngrams => "ngrams",
        }
    }
}

impl fmt::Display for CorpusSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorpusSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stories" => Ok(CorpusSource::Stories),
            "blogs" => Ok(CorpusSource::Blogs),
            "ngrams" => Ok(CorpusSource::Ngrams),
            other => Err(format!("unknown corpus source {other:?}")),
        }
    }
}

/// Co-occurrence counts of (verb, argument span) pairs from one corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    source: CorpusSource,
    counts: BTreeMap<String, BTreeMap<String, u64>>,
}

fn lower_tokens(s: &str) -> String {
    s.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>().join(" ")
}

impl FrequencyTable {
    pub fn new(source: CorpusSource) -> Self {
        Self { source, counts: BTreeMap::new() }
    }

    pub fn source(&self) -> CorpusSource {
        self.source
    }

    /// Adds `count` to the entry. Zero counts are ignored so every stored
    /// count is at least 1.
    pub fn add(&mut self, verb: &str, args: &str, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(lower_tokens(verb)).or_default().entry(lower_tokens(args)).or_default() += count;
    }

    pub fn count(&self, verb: &str, args: &str) -> u64 {
        self.counts
            .get(&lower_tokens(verb))
            .and_then(|m| m.get(&lower_tokens(args)))
            .copied()
            .unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn args_for(&self, verb: &str) -> impl Iterator<Item = (&str, u64)> {
        self.counts.get(verb).into_iter().flatten().map(|(a, c)| (a.as_str(), *c))
    }

    /// Count threshold equivalent to keeping only the `top_n` most frequent
    /// entries (ties at the cutoff are kept).
    pub fn rank_threshold(&self, top_n: usize) -> u64 {
        let mut all: Vec<u64> = self.counts.values().flat_map(|m| m.values().copied()).collect();
        if top_n == 0 || all.len() <= top_n {
            return 1;
        }
        all.sort_unstable_by(|a, b| b.cmp(a));
        all[top_n - 1]
    }

    /// Per-source default threshold.
    pub fn default_threshold(&self) -> u64 {
        match self.source {
            CorpusSource::Stories => CorpusSource::STORIES_MIN_COUNT,
            CorpusSource::Blogs => CorpusSource::BLOGS_MIN_COUNT,
            CorpusSource::Ngrams => self.rank_threshold(CorpusSource::NGRAMS_TOP_RANK),
        }
    }
}

/// Parses `verb<TAB>args<TAB>count<TAB>source` rows into one table per source.
pub fn parse_frequency_tables(input: &str) -> Result<BTreeMap<CorpusSource, FrequencyTable>, IngestError> {
    let mut tables: BTreeMap<CorpusSource, FrequencyTable> = BTreeMap::new();
    for (i, raw) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| IngestError::Parse { line: line_no, message };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(err(format!("expected 4 columns, found {}", cols.len())));
        }
        if cols[0].trim().is_empty() || cols[1].trim().is_empty() {
            return Err(err("empty verb or argument".into()));
        }
        let count: u64 = cols[2].trim().parse().map_err(|_| err(format!("bad count {:?}", cols[2])))?;
        if count == 0 {
            return Err(err("counts must be at least 1".into()));
        }
        let source: CorpusSource = cols[3].trim().parse().map_err(err)?;
        tables.entry(source).or_insert_with(|| FrequencyTable::new(source)).add(cols[0], cols[1], count);
    }
    Ok(tables)
}

/// Replaces argument spans that co-occur with the event's verb fewer than
/// `threshold` times by a single blank.
///
/// The verb is the first token that is neither a person variable nor a blank.
/// Only spans listed in `freq` for that verb are considered; longer spans win
/// over shorter overlapping ones, then leftmost.
pub fn blank_infrequent_args(
    event: &EventPhrase,
    freq: &FrequencyTable,
    threshold: u64,
) -> Result<EventPhrase, IngestError> {
    if threshold == 0 {
        return Err(IngestError::BadThreshold);
    }
    let tokens: Vec<&str> = event.tokens().collect();
    let lowered: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
    let verb_idx = tokens
        .iter()
        .position(|t| PersonVar::from_token(t).is_none() && *t != BLANK)
        .ok_or_else(|| IngestError::NoVerb(event.text().to_string()))?;

    // (start, len) of every rare span occurrence after the verb.
    let mut spans: Vec<(usize, usize)> = Vec::new();
    for (args, count) in freq.args_for(&lowered[verb_idx]) {
        if count >= threshold {
            continue;
        }
        let arg_tokens: Vec<&str> = args.split(' ').collect();
        if arg_tokens.contains(&BLANK) {
            continue;
        }
        let n = arg_tokens.len();
        for start in verb_idx + 1..=tokens.len().saturating_sub(n) {
            if lowered[start..start + n].iter().zip(&arg_tokens).all(|(a, b)| a == b) {
                spans.push((start, n));
            }
        }
    }
    if spans.is_empty() {
        return Ok(event.clone());
    }
    spans.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut taken = vec![false; tokens.len()];
    let mut chosen: BTreeMap<usize, usize> = BTreeMap::new();
    for (start, len) in spans {
        if taken[start..start + len].iter().any(|&t| t) {
            continue;
        }
        taken[start..start + len].iter_mut().for_each(|t| *t = true);
        chosen.insert(start, len);
    }

    let mut out: Vec<&str> = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        match chosen.get(&i) {
            Some(&len) => {
                out.push(BLANK);
                i += len;
            }
            None => {
                out.push(tokens[i]);
                i += 1;
            }
        }
    }
    Ok(EventPhrase::new(&out.join(" "))?)
}
