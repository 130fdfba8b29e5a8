//! Atlas construction and inspection: `ingest`, `stats`, `query`, `split`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use clap::Args;
use ifthen_core::atlas::{build_graph, graph_stats, ContentType, EventPhrase, WordAverage};
use ifthen_core::ingest::{
    blank_infrequent_args, filter_coref_combinations, normalize_event, parse_coref_votes, parse_frequency_tables,
    split_events, CorpusSource, NameLexicon, SplitRatios, WordSet,
};
use ifthen_core::{Dimension, Split, Triple};
use serde::{Deserialize, Serialize};

use crate::config::write_resolved;
use crate::error::{required, CliError, CliResult};
use crate::io::{load_graph, read_text, read_triples, write_json, write_triples};

fn ratios(values: &[f64]) -> CliResult<SplitRatios> {
    let [train, dev, test] = values else {
        return Err(CliError::usage(format!("--ratios takes three values, got {}", values.len())));
    };
    SplitRatios::new(*train, *dev, *test).map_err(|e| CliError::usage(e.to_string()))
}

fn stopwords(path: &Option<PathBuf>) -> CliResult<WordSet> {
    Ok(match path {
        Some(p) => WordSet::parse(&read_text(p)?),
        None => WordSet::default_stopwords(),
    })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestArgs {
    /// Raw annotations, `raw_event<TAB>dimension<TAB>target<TAB>worker_id` per line [required]
    #[arg(long)]
    pub raw: Option<PathBuf>,
    /// Name lexicon, one name per line; names become PersonX/Y/Z
    #[arg(long)]
    pub names: Option<PathBuf>,
    /// Frequency table `verb<TAB>args<TAB>count<TAB>source`; enables argument blanking
    #[arg(long)]
    pub freq: Option<PathBuf>,
    /// Which source's counts decide blanking
    #[arg(long, default_value_t = CorpusSource::Stories)]
    pub source: CorpusSource,
    /// Blanking threshold; unset uses the source default (stories 5, blogs 100, ngrams top-10000 rank)
    #[arg(long)]
    pub threshold: Option<u64>,
    /// Coreference votes `event<TAB>votes_valid`; listed events with fewer than two valid votes are dropped
    #[arg(long)]
    pub coref: Option<PathBuf>,
    /// Stopword list for split bucketing, one word per line; unset uses the built-in list
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Seed of the split assignment
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Train, dev and test ratios
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [0.8, 0.1, 0.1])]
    pub ratios: Vec<f64>,
    /// Output atlas; `.jsonl` selects JSON lines, anything else TSV [required]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn ingest(args: &IngestArgs) -> CliResult<()> {
    let raw_path = required(&args.raw, "raw")?;
    let out = required(&args.out, "out")?;
    let ratios = ratios(&args.ratios)?;
    let names = match &args.names {
        Some(p) => NameLexicon::parse(&read_text(p)?),
        None => NameLexicon::default(),
    };
    let blanking = match &args.freq {
        Some(p) => {
            let tables = parse_frequency_tables(&read_text(p)?).map_err(|e| CliError::data(p, e))?;
            let table = tables
                .get(&args.source)
                .cloned()
                .ok_or_else(|| CliError::data(p, format!("no rows for source {}", args.source)))?;
            let threshold = args.threshold.unwrap_or_else(|| table.default_threshold());
            Some((table, threshold))
        }
        None => None,
    };
    let rejected: BTreeSet<String> = match &args.coref {
        Some(p) => {
            let records = parse_coref_votes(&read_text(p)?).map_err(|e| CliError::data(p, e))?;
            let kept: BTreeSet<String> = filter_coref_combinations(&records).iter().map(EventPhrase::key).collect();
            records.iter().map(|r| r.event_candidate.key()).filter(|k| !kept.contains(k)).collect()
        }
        None => BTreeSet::new(),
    };

    let text = read_text(&raw_path)?;
    let mut triples = Vec::new();
    let mut dropped = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |e: &dyn std::fmt::Display| CliError::data(&raw_path, format!("line {}: {e}", i + 1));
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(at(&format!("expected 4 tab-separated columns, found {}", cols.len())));
        }
        let mut event = normalize_event(cols[0], &names).map_err(|e| at(&e))?;
        if let Some((table, threshold)) = &blanking {
            event = blank_infrequent_args(&event, table, *threshold).map_err(|e| at(&e))?;
        }
        if rejected.contains(&event.key()) {
            dropped += 1;
            continue;
        }
        let dimension: Dimension = cols[1].parse().map_err(|e| at(&e))?;
        let t = Triple::new(event.text(), dimension, cols[2], Split::Train, cols[3]).map_err(|e| at(&e))?;
        triples.push(t);
    }

    let events: Vec<EventPhrase> = triples.iter().map(|t| t.event.clone()).collect();
    let assignment =
        split_events(&events, ratios, args.seed, &stopwords(&args.stopwords)?).map_err(|e| CliError::data(&raw_path, e))?;
    assignment.apply(&mut triples);
    let graph = build_graph(triples).map_err(|e| CliError::data(&raw_path, e))?;
    let triples = graph.to_triples();
    write_triples(&out, &triples)?;
    write_resolved(&out, "ingest", args)?;

    let [tr, dv, te] = assignment.counts();
    println!("{} triples over {} events (train {tr}, dev {dv}, test {te})", triples.len(), graph.events().len());
    if dropped > 0 {
        println!("{dropped} annotations dropped by coreference votes");
    }
    println!("wrote {}", out.display());
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsArgs {
    /// Atlas file (TSV or JSON lines) [required]
    #[arg(long)]
    pub atlas: Option<PathBuf>,
    /// Write the full report as JSON
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn words(avg: &WordAverage) -> String {
    format!("{:.2}", avg.mean())
}

pub fn stats(args: &StatsArgs) -> CliResult<()> {
    let atlas = required(&args.atlas, "atlas")?;
    let graph = load_graph(&atlas)?;
    let r = graph_stats(&graph);
    println!("{:<24}{:>12}{:>12}{:>10}", "", "triples", "nodes", "words");
    for ct in ContentType::ALL {
        println!(
            "{:<24}{:>12}{:>12}{:>10}",
            ct.name(),
            r.triples_by_content_type[&ct],
            r.nodes_by_content_type[&ct],
            words(&r.avg_words_per_node[&ct])
        );
    }
    println!("{:<24}{:>12}{:>12}{:>10}", "total", r.triples_total, r.nodes_total, words(&r.avg_words_all_nodes));
    println!("{:<24}{:>12}{:>22}", "base events", r.base_event_count, words(&r.avg_words_base_events));
    println!("{:<24}{:>12}", "nodes in 2+ triples", r.nodes_appearing_multiple);
    println!("{:<24}{:>12}", "empty annotations", r.empty_annotations);
    if let Some(out) = &args.out {
        write_json(out, &r)?;
        write_resolved(out, "stats", args)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryArgs {
    /// Atlas file (TSV or JSON lines) [required]
    #[arg(long)]
    pub atlas: Option<PathBuf>,
    /// Base event, e.g. "PersonX pays PersonY a compliment" [required]
    #[arg(long)]
    pub event: Option<String>,
    /// Dimension to look up; unset lists every dimension
    #[arg(long)]
    pub dimension: Option<Dimension>,
    /// Also list `none` annotations [default: off]
    #[arg(long, default_value_t = false)]
    pub include_empty: bool,
    /// Write the result as JSON
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn query(args: &QueryArgs) -> CliResult<()> {
    let atlas = required(&args.atlas, "atlas")?;
    let event = required(&args.event, "event")?;
    let graph = load_graph(&atlas)?;
    let dims: Vec<Dimension> = match args.dimension {
        Some(d) => vec![d],
        None => Dimension::ALL.to_vec(),
    };
    let mut result: BTreeMap<Dimension, Vec<String>> = BTreeMap::new();
    for d in dims {
        let targets: Vec<String> =
            graph.query_inferences_with(&event, d, args.include_empty).iter().map(|t| t.text().to_string()).collect();
        for t in &targets {
            println!("{d}\t{t}");
        }
        result.insert(d, targets);
    }
    if result.values().all(Vec::is_empty) {
        println!("no inferences for {event:?}");
    }
    if let Some(out) = &args.out {
        write_json(out, &result)?;
        write_resolved(out, "query", args)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitArgs {
    /// Atlas file whose split labels are reassigned [required]
    #[arg(long)]
    pub atlas: Option<PathBuf>,
    /// Stopword list, one word per line; unset uses the built-in list
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Seed of the group shuffle
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Train, dev and test ratios
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [0.8, 0.1, 0.1])]
    pub ratios: Vec<f64>,
    /// Output atlas; `.jsonl` selects JSON lines, anything else TSV [required]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn split(args: &SplitArgs) -> CliResult<()> {
    let atlas = required(&args.atlas, "atlas")?;
    let out = required(&args.out, "out")?;
    let ratios = ratios(&args.ratios)?;
    let mut triples = read_triples(&atlas)?;
    let events: Vec<EventPhrase> = triples.iter().map(|t| t.event.clone()).collect();
    let assignment =
        split_events(&events, ratios, args.seed, &stopwords(&args.stopwords)?).map_err(|e| CliError::data(&atlas, e))?;
    assignment.apply(&mut triples);
    let graph = build_graph(triples).map_err(|e| CliError::data(&atlas, e))?;
    write_triples(&out, &graph.to_triples())?;
    write_resolved(&out, "split", args)?;
    let [tr, dv, te] = assignment.counts();
    println!("events: train {tr}, dev {dv}, test {te}");
    println!("wrote {}", out.display());
    Ok(())
}
