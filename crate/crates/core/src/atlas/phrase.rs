//! Event phrases, inference targets and the text normalization rules shared by
//! every module that compares node texts.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::AtlasError;

/// The blank placeholder that stands in for an infrequent argument span.
pub const BLANK: &str = "___";

/// Sentinel annotation meaning "this dimension does not apply".
pub const EMPTY_SENTINEL: &str = "none";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PersonVar {
    PersonX,
    PersonY,
    PersonZ,
}

impl PersonVar {
    pub const ALL: [PersonVar; 3] = [PersonVar::PersonX, PersonVar::PersonY, PersonVar::PersonZ];

    pub fn as_str(self) -> &'static str {
        match self {
            PersonVar::PersonX => "PersonX",
            PersonVar::PersonY => "PersonY",
            PersonVar::PersonZ => "PersonZ",
        }
    }

    /// Recognizes `PersonX`, `PersonX's`, `PersonX,` and similar tokens.
    /// The match is case-sensitive.
    pub fn from_token(token: &str) -> Option<PersonVar> {
        PersonVar::ALL.into_iter().find(|v| {
            token
                .strip_prefix(v.as_str())
                .is_some_and(|rest| rest.chars().next().is_none_or(|c| !c.is_alphanumeric()))
        })
    }
}

impl fmt::Display for PersonVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Collapses runs of whitespace to single spaces and trims the ends.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Identity key of a node: whitespace-normalized, lowercased text.
pub fn node_key(text: &str) -> String {
    normalize_whitespace(text).to_lowercase()
}

/// Whitespace token count, used for the words-per-node statistics.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// A normalized base event: a verb phrase with person variables and blanks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventPhrase {
    text: String,
    person_slots: BTreeSet<PersonVar>,
    blank_count: usize,
}

impl EventPhrase {
    /// Builds an event from already-normalized text, deriving the person slots
    /// and blank count and checking the invariants.
    pub fn new(text: &str) -> Result<Self, AtlasError> {
        let text = normalize_whitespace(text);
        if text.is_empty() {
            return Err(AtlasError::InvalidEvent { text, reason: "empty event".into() });
        }
        let mut person_slots = BTreeSet::new();
        let mut blank_count = 0;
        for token in text.split(' ') {
            if let Some(v) = PersonVar::from_token(token) {
                person_slots.insert(v);
            }
            if token == BLANK {
                blank_count += 1;
            }
        }
        if !person_slots.is_empty() && !person_slots.contains(&PersonVar::PersonX) {
            return Err(AtlasError::InvalidEvent {
                text,
                reason: "person variables present without PersonX".into(),
            });
        }
        Ok(Self { text, person_slots, blank_count })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.text.split(' ')
    }

    pub fn person_slots(&self) -> &BTreeSet<PersonVar> {
        &self.person_slots
    }

    pub fn blank_count(&self) -> usize {
        self.blank_count
    }

    pub fn key(&self) -> String {
        node_key(&self.text)
    }
}

impl fmt::Display for EventPhrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// An annotated inference, or the empty sentinel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InferenceTarget {
    text: String,
}

impl InferenceTarget {
    pub fn new(text: &str) -> Result<Self, AtlasError> {
        let text = normalize_whitespace(text);
        if text.is_empty() {
            return Err(AtlasError::EmptyTarget);
        }
        Ok(Self { text })
    }

    pub fn empty() -> Self {
        Self { text: EMPTY_SENTINEL.to_string() }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn is_empty(&self) -> bool {
        self.text == EMPTY_SENTINEL
    }

    pub fn key(&self) -> String {
        node_key(&self.text)
    }
}

impl fmt::Display for InferenceTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn person_tokens() {
        assert_eq!(PersonVar::from_token("PersonX"), Some(PersonVar::PersonX));
        assert_eq!(PersonVar::from_token("PersonY's"), Some(PersonVar::PersonY));
        assert_eq!(PersonVar::from_token("PersonZ,"), Some(PersonVar::PersonZ));
        assert_eq!(PersonVar::from_token("PersonXY"), None);
        assert_eq!(PersonVar::from_token("personx"), None);
        assert_eq!(PersonVar::from_token("Person"), None);
    }

    #[test]
    fn event_slots_and_blanks() {
        let e = EventPhrase::new("  PersonX  breaks PersonY's ___ ").unwrap();
        assert_eq!(e.text(), "PersonX breaks PersonY's ___");
        assert_eq!(e.person_slots().len(), 2);
        assert_eq!(e.blank_count(), 1);

        let e = EventPhrase::new("drinks ___ in the ___").unwrap();
        assert!(e.person_slots().is_empty());
        assert_eq!(e.blank_count(), 2);
    }

    #[test]
    fn event_rejections() {
        assert!(EventPhrase::new("   ").is_err());
        assert!(EventPhrase::new("PersonY sleeps").is_err());
    }

    #[test]
    fn empty_sentinel() {
        assert!(InferenceTarget::empty().is_empty());
        assert!(InferenceTarget::new("none").unwrap().is_empty());
        assert!(!InferenceTarget::new("None at all").unwrap().is_empty());
        assert!(InferenceTarget::new(" \t").is_err());
    }

    #[test]
    fn keys_fold_case_and_space() {
        assert_eq!(node_key(" PersonX  Is\tNice "), "personx is nice");
        assert_eq!(word_count("to be  nice"), 3);
    }
}
