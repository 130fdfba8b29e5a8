use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ifthen_core::atlas::{build_graph, parse_atlas, write_atlas_jsonl, write_atlas_tsv};
use ifthen_core::{AtlasGraph, Triple};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::data(path, e))
}

/// Reads an atlas in either TSV or JSON-lines form.
pub fn read_triples(path: &Path) -> CliResult<Vec<Triple>> {
    parse_atlas(&read_text(path)?).map_err(|e| CliError::data(path, e))
}

pub fn load_graph(path: &Path) -> CliResult<AtlasGraph> {
    let graph = build_graph(read_triples(path)?).map_err(|e| CliError::data(path, e))?;
    for d in graph.diagnostics() {
        log::warn!("{}: {d}", path.display());
    }
    Ok(graph)
}

fn is_jsonl(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "jsonl" || e == "json")
}

/// Writes triples as JSON lines when the file name ends in `.jsonl`, TSV
/// otherwise.
pub fn write_triples(path: &Path, triples: &[Triple]) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::data(path, e))?;
    let mut w = BufWriter::new(file);
    let res = if is_jsonl(path) { write_atlas_jsonl(triples, &mut w) } else { write_atlas_tsv(triples, &mut w) };
    res.map_err(|e| CliError::data(path, e))?;
    w.flush().map_err(|e| CliError::data(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    std::fs::write(path, text + "\n").map_err(|e| CliError::data(path, e))
}

pub fn thread_pool(threads: usize) -> CliResult<rayon::ThreadPool> {
    if threads == 0 {
        return Err(CliError::usage("--threads must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {threads} threads: {e}")))
}
