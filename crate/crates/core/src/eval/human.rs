//! Human-judgment sheets: export ten ranked generations per sampled event and
//! dimension, then read the judges' vote counts back as precision at 10.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::atlas::Dimension;
use crate::generate::GenerationList;

pub const SHEET_HEADER: &str = "event\tdimension\trank\tgeneration\tvotes_valid\tjudges_total";
pub const ROWS_PER_LIST: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgmentRow {
    pub event: String,
    pub dimension: Dimension,
    /// 1 to 10.
    pub rank: usize,
    /// Empty when the model produced fewer than ten candidates; such rows
    /// always count as incorrect.
    pub generation: String,
    pub votes_valid: Option<u32>,
    pub judges_total: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct JudgmentSheet {
    pub rows: Vec<JudgmentRow>,
}

/// Draws `sample_size` distinct events with a seeded shuffle and lays out ten
/// rows for each of their generation lists. Vote columns are left blank.
pub fn export_human_eval_sheet(
    lists: &[GenerationList],
    sample_size: usize,
    seed: u64,
) -> Result<JudgmentSheet, EvalError> {
    let mut by_event: BTreeMap<&str, Vec<&GenerationList>> = BTreeMap::new();
    for l in lists {
        by_event.entry(l.event.as_str()).or_default().push(l);
    }
    if by_event.len() < sample_size {
        return Err(EvalError::InsufficientEvents { available: by_event.len(), requested: sample_size });
    }
    let mut events: Vec<&str> = by_event.keys().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    events.shuffle(&mut rng);
    let chosen: BTreeSet<&str> = events.into_iter().take(sample_size).collect();

    let mut rows = Vec::new();
    for event in chosen {
        let mut ls = by_event[event].clone();
        ls.sort_by_key(|l| l.dimension);
        for l in ls {
            for rank in 1..=ROWS_PER_LIST {
                let generation = l.entries.get(rank - 1).map(|g| g.text.clone()).unwrap_or_default();
                rows.push(JudgmentRow {
                    event: event.to_string(),
                    dimension: l.dimension,
                    rank,
                    generation,
                    votes_valid: None,
                    judges_total: None,
                });
            }
        }
    }
    Ok(JudgmentSheet { rows })
}

fn opt(v: Option<u32>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_judgment_sheet(sheet: &JudgmentSheet) -> Result<String, EvalError> {
    let mut out = String::from(SHEET_HEADER);
    out.push('\n');
    for r in &sheet.rows {
        for field in [&r.event, &r.generation] {
            if field.contains(['\t', '\n', '\r']) {
                return Err(EvalError::Sheet { line: 0, message: format!("field {field:?} contains a tab or newline") });
            }
        }
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.event,
            r.dimension,
            r.rank,
            r.generation,
            opt(r.votes_valid),
            opt(r.judges_total)
        )
        .expect("writing to a String");
    }
    Ok(out)
}

pub fn parse_judgment_sheet(input: &str) -> Result<JudgmentSheet, EvalError> {
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.strip_suffix('\r').unwrap_or(h) == SHEET_HEADER => {}
        _ => return Err(EvalError::Sheet { line: 1, message: format!("expected header {SHEET_HEADER:?}") }),
    }
    let mut rows = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        let text = raw.strip_suffix('\r').unwrap_or(raw);
        if text.trim().is_empty() {
            continue;
        }
        let err = |message: String| EvalError::Sheet { line, message };
        let cols: Vec<&str> = text.split('\t').collect();
        if cols.len() != 6 {
            return Err(err(format!("expected 6 columns, found {}", cols.len())));
        }
        let dimension: Dimension = cols[1].parse().map_err(|e: crate::atlas::AtlasError| err(e.to_string()))?;
        let rank: usize = cols[2].parse().map_err(|_| err(format!("bad rank {:?}", cols[2])))?;
        if !(1..=ROWS_PER_LIST).contains(&rank) {
            return Err(err(format!("rank {rank} outside 1..={ROWS_PER_LIST}")));
        }
        let num = |s: &str, what: &str| -> Result<Option<u32>, EvalError> {
            let s = s.trim();
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| err(format!("bad {what} {s:?}")))
        };
        let votes_valid = num(cols[4], "votes_valid")?;
        let judges_total = num(cols[5], "judges_total")?;
        match (votes_valid, judges_total) {
            (None, None) => {}
            (Some(v), Some(j)) if j > 0 && v <= j => {}
            _ => return Err(err("votes_valid and judges_total must both be blank, or 0 <= votes <= judges with judges > 0".into())),
        }
        if cols[0].is_empty() {
            return Err(err("empty event".into()));
        }
        rows.push(JudgmentRow {
            event: cols[0].to_string(),
            dimension,
            rank,
            generation: cols[3].to_string(),
            votes_valid,
            judges_total,
        });
    }
    Ok(JudgmentSheet { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValidThreshold {
    /// At least one judge marked it valid.
    Any,
    /// More than half of the judges marked it valid.
    Majority,
}

impl std::fmt::Display for ValidThreshold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ValidThreshold::Any => "any",
            ValidThreshold::Majority => "majority",
        })
    }
}

impl std::str::FromStr for ValidThreshold {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "any" => Ok(Self::Any),
            "majority" => Ok(Self::Majority),
            _ => Err(format!("unknown threshold {s:?} (any, majority)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionScores {
    pub threshold: ValidThreshold,
    /// Percent per dimension, averaged over events.
    pub dimensions: BTreeMap<Dimension, f64>,
    /// Mean of the per-dimension values.
    pub average: f64,
    pub lists: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum PrecisionReport {
    /// The sheet holds no votes at all.
    NoJudgments,
    Scored(PrecisionScores),
}

/// Precision at 10 per dimension. A sheet without any votes yields
/// [`PrecisionReport::NoJudgments`]; a partially filled sheet is an error
/// listing the rows that still need votes.
pub fn precision_at_10(sheet: &JudgmentSheet, threshold: ValidThreshold) -> Result<PrecisionReport, EvalError> {
    let needs_vote = |r: &JudgmentRow| !r.generation.is_empty();
    if sheet.rows.iter().all(|r| r.votes_valid.is_none()) {
        return Ok(PrecisionReport::NoJudgments);
    }
    let missing: Vec<usize> = sheet
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| needs_vote(r) && r.votes_valid.is_none())
        .map(|(i, _)| i + 2)
        .collect();
    if !missing.is_empty() {
        return Err(EvalError::MissingVotes { lines: missing });
    }

    let mut groups: BTreeMap<(&str, Dimension), Vec<&JudgmentRow>> = BTreeMap::new();
    for r in &sheet.rows {
        groups.entry((r.event.as_str(), r.dimension)).or_default().push(r);
    }
    let mut per_dim: BTreeMap<Dimension, (f64, usize)> = BTreeMap::new();
    for ((event, dim), rows) in &groups {
        let ranks: BTreeSet<usize> = rows.iter().map(|r| r.rank).collect();
        if rows.len() != ROWS_PER_LIST || ranks.len() != ROWS_PER_LIST {
            return Err(EvalError::Sheet {
                line: 0,
                message: format!("{event} / {dim}: expected ranks 1..=10 once each, found {} rows", rows.len()),
            });
        }
        let correct = rows
            .iter()
            .filter(|r| match (r.votes_valid, r.judges_total) {
                (Some(v), Some(j)) if needs_vote(r) => match threshold {
                    ValidThreshold::Any => v >= 1,
                    ValidThreshold::Majority => 2 * v > j,
                },
                _ => false,
            })
            .count();
        let e = per_dim.entry(*dim).or_insert((0.0, 0));
        e.0 += correct as f64 / ROWS_PER_LIST as f64;
        e.1 += 1;
    }
    let dimensions: BTreeMap<Dimension, f64> = per_dim.into_iter().map(|(d, (s, n))| (d, 100.0 * s / n as f64)).collect();
    let average = dimensions.values().sum::<f64>() / dimensions.len() as f64;
    Ok(PrecisionReport::Scored(PrecisionScores { threshold, dimensions, average, lists: groups.len() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::Generation;

    fn lists(n_events: usize) -> Vec<GenerationList> {
        let mut out = Vec::new();
        for e in 0..n_events {
            for d in Dimension::ALL {
                out.push(GenerationList {
                    event: format!("PersonX does thing{e}"),
                    dimension: d,
                    beam_width: 10,
                    entries: (0..10).map(|i| Generation { text: format!("gen {i}"), score: -(i as f64) }).collect(),
                });
            }
        }
        out
    }

    #[test]
    fn export_shape_and_determinism() {
        let l = lists(5);
        let a = export_human_eval_sheet(&l, 2, 42).unwrap();
        let b = export_human_eval_sheet(&l, 2, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 2 * 90);
        let events: BTreeSet<_> = a.rows.iter().map(|r| &r.event).collect();
        assert_eq!(events.len(), 2);
        assert!(matches!(
            export_human_eval_sheet(&l, 6, 0),
            Err(EvalError::InsufficientEvents { available: 5, requested: 6 })
        ));
    }

    #[test]
    fn untouched_sheet_has_no_judgments() {
        let sheet = export_human_eval_sheet(&lists(3), 1, 1).unwrap();
        let text = write_judgment_sheet(&sheet).unwrap();
        let back = parse_judgment_sheet(&text).unwrap();
        assert_eq!(back, sheet);
        assert_eq!(precision_at_10(&back, ValidThreshold::Majority).unwrap(), PrecisionReport::NoJudgments);
    }

    #[test]
    fn precision_arithmetic() {
        let mut sheet = export_human_eval_sheet(&lists(1), 1, 1).unwrap();
        for r in &mut sheet.rows {
            let valid = r.dimension != Dimension::XWant || r.rank <= 5;
            r.votes_valid = Some(if valid { 5 } else { 0 });
            r.judges_total = Some(5);
        }
        let PrecisionReport::Scored(s) = precision_at_10(&sheet, ValidThreshold::Majority).unwrap() else {
            panic!("expected scores");
        };
        assert_eq!(s.dimensions[&Dimension::XWant], 50.0);
        assert_eq!(s.dimensions[&Dimension::OReact], 100.0);

        // 2 of 5 judges: valid for "any", not for "majority"
        for r in &mut sheet.rows {
            r.votes_valid = Some(2);
        }
        let any = precision_at_10(&sheet, ValidThreshold::Any).unwrap();
        let maj = precision_at_10(&sheet, ValidThreshold::Majority).unwrap();
        assert!(matches!(any, PrecisionReport::Scored(ref s) if s.average == 100.0));
        assert!(matches!(maj, PrecisionReport::Scored(ref s) if s.average == 0.0));

        sheet.rows[3].votes_valid = None;
        sheet.rows[3].judges_total = None;
        assert!(matches!(precision_at_10(&sheet, ValidThreshold::Any), Err(EvalError::MissingVotes { ref lines }) if lines == &vec![5]));
    }

    #[test]
    fn parse_errors() {
        assert!(parse_judgment_sheet("bad header\n").is_err());
        let row = |s: &str| format!("{SHEET_HEADER}\n{s}\n");
        assert!(parse_judgment_sheet(&row("PersonX eats\txWant\t11\tx\t\t")).is_err());
        assert!(parse_judgment_sheet(&row("PersonX eats\txWant\t1\tx\t6\t5")).is_err());
        assert!(parse_judgment_sheet(&row("PersonX eats\txWant\t1\tx\t3\t")).is_err());
        assert!(parse_judgment_sheet(&row("PersonX eats\tyWant\t1\tx\t\t")).is_err());
        assert_eq!(parse_judgment_sheet(&row("PersonX eats\txWant\t1\tx\t3\t5")).unwrap().rows.len(), 1);
    }
}
