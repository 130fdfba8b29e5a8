use std::collections::BTreeMap;

use super::{IngestError, WordSet};
use crate::atlas::{EventPhrase, PersonVar};

/// Names that should be replaced by person variables, matched
/// case-insensitively.
pub type NameLexicon = WordSet;

/// Splits `Alex's,` into (`Alex`, `'s,`).
fn split_name(token: &str) -> (&str, &str) {
    let end = token
        .char_indices()
        .find(|&(_, c)| !(c.is_alphanumeric() || c == '-'))
        .map_or(token.len(), |(i, _)| i);
    token.split_at(end)
}

/// Replaces personal names with `PersonX`, `PersonY`, `PersonZ` in order of
/// first mention. Repeated mentions of one name get the same variable, and
/// variables already present in `raw` are not reused.
pub fn normalize_event(raw: &str, names: &NameLexicon) -> Result<EventPhrase, IngestError> {
    let tokens: Vec<&str> = raw.split_whitespace().collect();
    let mut free: Vec<PersonVar> = PersonVar::ALL
        .into_iter()
        .filter(|v| !tokens.iter().any(|t| PersonVar::from_token(t) == Some(*v)))
        .collect();
    free.reverse();
    let preexisting = PersonVar::ALL.len() - free.len();

    let mut assigned: BTreeMap<String, PersonVar> = BTreeMap::new();
    let mut distinct = 0;
    let mut out = Vec::with_capacity(tokens.len());
    for token in tokens {
        if PersonVar::from_token(token).is_some() {
            out.push(token.to_string());
            continue;
        }
        let (core, suffix) = split_name(token);
        if core.is_empty() || !names.contains(core) {
            out.push(token.to_string());
            continue;
        }
        let key = core.to_lowercase();
        let var = match assigned.get(&key) {
            Some(v) => *v,
            None => {
                distinct += 1;
                let v = free.pop().ok_or_else(|| IngestError::TooManyPeople {
                    raw: raw.to_string(),
                    found: preexisting + distinct,
                })?;
                assigned.insert(key, v);
                v
            }
        };
        out.push(format!("{var}{suffix}"));
    }
    Ok(EventPhrase::new(&out.join(" "))?)
}
