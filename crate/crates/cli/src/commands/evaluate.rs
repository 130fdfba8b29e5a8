//! Scoring: `eval-bleu`, `export-human-eval`, `precision`, `overlap`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use ifthen_core::eval::{
    aggregate, export_human_eval_sheet, parse_judgment_sheet, precision_at_10, score_instance, write_judgment_sheet,
    BleuConfig, GoldIndex, PrecisionReport, SmoothingScope, ValidThreshold,
};
use ifthen_core::generate::{parse_generation_dump, GenerationList};
use ifthen_core::overlap::{event_coverage, group_overlap, normalize_concept, parse_edges, EdgeIndex, RelationGroup};
use ifthen_core::Split;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::write_resolved;
use crate::error::{required, CliError, CliResult};
use crate::io::{load_graph, read_text, thread_pool, write_json};

fn load_generations(path: &Path) -> CliResult<Vec<GenerationList>> {
    parse_generation_dump(&read_text(path)?).map_err(|e| CliError::data(path, e))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalBleuArgs {
    /// Generation dump (JSON lines) [required]
    #[arg(long)]
    pub gen: Option<PathBuf>,
    /// Atlas holding the gold annotations [required]
    #[arg(long)]
    pub atlas: Option<PathBuf>,
    /// Restrict gold annotations to one split; unset uses all of them
    #[arg(long)]
    pub split: Option<Split>,
    /// Predictions scored per list
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Additive smoothing constant for zero n-gram matches
    #[arg(long, default_value_t = BleuConfig::default().epsilon)]
    pub epsilon: f64,
    /// Which n-gram orders are smoothed: all-orders or higher-orders
    #[arg(long, default_value_t = BleuConfig::default().smoothing)]
    pub smoothing: SmoothingScope,
    /// Worker threads; the report does not depend on it
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Write the report as JSON
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn eval_bleu(args: &EvalBleuArgs) -> CliResult<()> {
    let gen = required(&args.gen, "gen")?;
    let atlas = required(&args.atlas, "atlas")?;
    if args.k == 0 {
        return Err(CliError::usage("--k must be positive"));
    }
    if !(args.epsilon.is_finite() && args.epsilon > 0.0) {
        return Err(CliError::usage("--epsilon must be positive"));
    }
    let cfg = BleuConfig { epsilon: args.epsilon, smoothing: args.smoothing };
    let lists = load_generations(&gen)?;
    let graph = load_graph(&atlas)?;
    let index = GoldIndex::new(&graph, args.split);
    let outcomes: Vec<_> =
        thread_pool(args.threads)?.install(|| lists.par_iter().map(|l| score_instance(l, &index, args.k, &cfg)).collect());
    let report = aggregate(&lists, &outcomes, args.split, args.k, &cfg);

    println!("{:<10}{:>10}{:>11}{:>9}", "dimension", "BLEU", "evaluated", "omitted");
    for (d, s) in &report.dimensions {
        println!("{:<10}{:>10.2}{:>11}{:>9}", d.name(), s.bleu, s.evaluated, s.omitted);
    }
    println!("{:<10}{:>10.2}{:>11}{:>9}", "average", report.meta.average, report.meta.evaluated, report.meta.omitted);
    if report.meta.skipped_no_gold > 0 {
        println!("{} lists had no gold annotations and were skipped", report.meta.skipped_no_gold);
    }
    if let Some(out) = &args.out {
        write_json(out, &report)?;
        write_resolved(out, "eval-bleu", args)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportHumanEvalArgs {
    /// Generation dump (JSON lines) [required]
    #[arg(long)]
    pub gen: Option<PathBuf>,
    /// Number of events drawn
    #[arg(long, default_value_t = 100)]
    pub sample_size: usize,
    /// Seed of the event draw
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Judgment sheet (TSV) [required]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn export_human_eval(args: &ExportHumanEvalArgs) -> CliResult<()> {
    let gen = required(&args.gen, "gen")?;
    let out = required(&args.out, "out")?;
    let lists = load_generations(&gen)?;
    let sheet = export_human_eval_sheet(&lists, args.sample_size, args.seed).map_err(|e| CliError::data(&gen, e))?;
    let text = write_judgment_sheet(&sheet).map_err(|e| CliError::data(&gen, e))?;
    std::fs::write(&out, text).map_err(|e| CliError::data(&out, e))?;
    write_resolved(&out, "export-human-eval", args)?;
    println!("{} rows for {} events", sheet.rows.len(), args.sample_size);
    println!("wrote {}", out.display());
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecisionArgs {
    /// Judgment sheet with the vote columns filled in [required]
    #[arg(long)]
    pub sheet: Option<PathBuf>,
    /// When a generation counts as valid: any (one judge) or majority (more than half)
    #[arg(long, default_value_t = ValidThreshold::Majority)]
    pub threshold: ValidThreshold,
    /// Write the report as JSON
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn precision(args: &PrecisionArgs) -> CliResult<()> {
    let path = required(&args.sheet, "sheet")?;
    let sheet = parse_judgment_sheet(&read_text(&path)?).map_err(|e| CliError::data(&path, e))?;
    let report = precision_at_10(&sheet, args.threshold).map_err(|e| CliError::data(&path, e))?;
    match &report {
        PrecisionReport::NoJudgments => println!("the sheet holds no judgments yet"),
        PrecisionReport::Scored(s) => {
            for (d, p) in &s.dimensions {
                println!("{:<10}{:>8.2}", d.name(), p);
            }
            println!("{:<10}{:>8.2}", "average", s.average);
        }
    }
    if let Some(out) = &args.out {
        write_json(out, &report)?;
        write_resolved(out, "precision", args)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapArgs {
    /// Atlas file [required]
    #[arg(long)]
    pub atlas: Option<PathBuf>,
    /// External edges, `relation<TAB>start<TAB>end` per line [required]
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Worker threads; the report does not depend on it
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Write the report as JSON
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn overlap(args: &OverlapArgs) -> CliResult<()> {
    let atlas = required(&args.atlas, "atlas")?;
    let edges_path = required(&args.edges, "edges")?;
    let graph = load_graph(&atlas)?;
    let edges = parse_edges(&read_text(&edges_path)?).map_err(|e| CliError::data(&edges_path, e))?;
    let index = EdgeIndex::new(&edges);
    let groups: BTreeMap<RelationGroup, _> = thread_pool(args.threads)?.install(|| {
        RelationGroup::ALL.par_iter().map(|g| (*g, group_overlap(&graph, &index, *g, &normalize_concept))).collect()
    });
    let coverage = event_coverage(&graph, &edges, &normalize_concept);
    for (g, c) in &groups {
        println!("{:<12}{:>8.2}%  ({} of {})", g.to_string(), c.percent, c.overlapping, c.total);
    }
    println!("{:<12}{:>8.2}%  ({} of {} base events)", "coverage", coverage.percent, coverage.overlapping, coverage.total);
    if let Some(out) = &args.out {
        write_json(out, &serde_json::json!({ "groups": groups, "event_coverage": coverage }))?;
        write_resolved(out, "overlap", args)?;
    }
    Ok(())
}
