//! Reading and writing atlas files.
//!
//! The canonical form is UTF-8 TSV with one triple per line:
//!
//! ```text
//! event<TAB>dimension<TAB>target<TAB>split<TAB>worker_id
//! ```
//!
//! Lines starting with `#` are comments and blank lines are ignored. A JSON
//! lines form carrying the same five keys is accepted as an alternative.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::graph::{sort_triples, Split, Triple};
use super::phrase::{EventPhrase, InferenceTarget};
use super::taxonomy::Dimension;
use super::AtlasError;

fn parse_fields(
    line_no: usize,
    event: &str,
    dimension: &str,
    target: &str,
    split: &str,
    worker_id: &str,
) -> Result<Triple, AtlasError> {
    let dimension = dimension
        .parse::<Dimension>()
        .map_err(|_| AtlasError::BadDimension { line: line_no, name: dimension.to_string() })?;
    let split = split
        .parse::<Split>()
        .map_err(|_| AtlasError::BadSplit { line: line_no, label: split.to_string() })?;
    let at_line = |e| AtlasError::BadField { line: line_no, source: Box::new(e) };
    Ok(Triple {
        event: EventPhrase::new(event).map_err(at_line)?,
        dimension,
        target: InferenceTarget::new(target).map_err(at_line)?,
        worker_id: worker_id.to_string(),
        split,
    })
}

fn content_lines(input: &str) -> impl Iterator<Item = (usize, &str)> {
    input.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

/// Parses TSV atlas text. Errors carry the 1-based line number.
pub fn parse_atlas_tsv(input: &str) -> Result<Vec<Triple>, AtlasError> {
    content_lines(input)
        .map(|(line_no, line)| {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 5 {
                return Err(AtlasError::ColumnCount { line: line_no, found: cols.len() });
            }
            parse_fields(line_no, cols[0], cols[1], cols[2], cols[3], cols[4])
        })
        .collect()
}

pub fn read_atlas_tsv<R: BufRead>(mut reader: R) -> Result<Vec<Triple>, AtlasError> {
    let mut buf = String::new();
    reader.read_to_string(&mut buf)?;
    parse_atlas_tsv(&buf)
}

fn check_field(name: &str, value: &str) -> Result<(), AtlasError> {
    if value.contains(['\t', '\n', '\r']) {
        return Err(AtlasError::Unwritable { field: name.to_string(), value: value.to_string() });
    }
    Ok(())
}

/// Writes triples in canonical order.
pub fn write_atlas_tsv<W: Write>(triples: &[Triple], mut out: W) -> Result<(), AtlasError> {
    let mut sorted = triples.to_vec();
    sort_triples(&mut sorted);
    for t in &sorted {
        check_field("worker_id", &t.worker_id)?;
        if t.event.text().starts_with('#') {
            return Err(AtlasError::Unwritable { field: "event".into(), value: t.event.text().to_string() });
        }
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            t.event.text(),
            t.dimension,
            t.target.text(),
            t.split,
            t.worker_id
        )?;
    }
    Ok(())
}

pub fn atlas_tsv_string(triples: &[Triple]) -> Result<String, AtlasError> {
    let mut buf = Vec::new();
    write_atlas_tsv(triples, &mut buf)?;
    Ok(String::from_utf8(buf).expect("atlas fields are UTF-8"))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonTriple<'a> {
    event: &'a str,
    dimension: &'a str,
    target: &'a str,
    split: &'a str,
    worker_id: &'a str,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OwnedJsonTriple {
    event: String,
    dimension: String,
    target: String,
    split: String,
    worker_id: String,
}

pub fn parse_atlas_jsonl(input: &str) -> Result<Vec<Triple>, AtlasError> {
    content_lines(input)
        .map(|(line_no, line)| {
            let r: OwnedJsonTriple = serde_json::from_str(line)
                .map_err(|e| AtlasError::Json { line: line_no, message: e.to_string() })?;
            parse_fields(line_no, &r.event, &r.dimension, &r.target, &r.split, &r.worker_id)
        })
        .collect()
}

pub fn write_atlas_jsonl<W: Write>(triples: &[Triple], mut out: W) -> Result<(), AtlasError> {
    let mut sorted = triples.to_vec();
    sort_triples(&mut sorted);
    for t in &sorted {
        let rec = JsonTriple {
            event: t.event.text(),
            dimension: t.dimension.name(),
            target: t.target.text(),
            split: t.split.as_str(),
            worker_id: &t.worker_id,
        };
        serde_json::to_writer(&mut out, &rec).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses either format, choosing JSON lines when the first content line
/// starts with `{`.
pub fn parse_atlas(input: &str) -> Result<Vec<Triple>, AtlasError> {
    match content_lines(input).next() {
        Some((_, line)) if line.trim_start().starts_with('{') => parse_atlas_jsonl(input),
        _ => parse_atlas_tsv(input),
    }
}
