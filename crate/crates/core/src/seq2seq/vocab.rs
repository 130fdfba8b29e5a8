use std::collections::{BTreeMap, HashMap};

use super::Seq2SeqError;
use crate::atlas::{PersonVar, Split, Triple, BLANK};

pub const PAD: u32 = 0;
pub const UNK: u32 = 1;
pub const BOS: u32 = 2;
pub const EOS: u32 = 3;

/// Reserved tokens, in id order.
pub const RESERVED: [&str; 8] = ["<pad>", "<unk>", "<bos>", "<eos>", "PersonX", "PersonY", "PersonZ", BLANK];

/// Splits a phrase into model tokens. Words are lowercased except person
/// variables, and a possessive or punctuation tail on a person variable
/// becomes its own token: `PersonX's` gives `PersonX`, `'s`.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        match PersonVar::from_token(word) {
            Some(var) => {
                let name = var.as_str();
                out.push(name.to_string());
                let rest = &word[name.len()..];
                if !rest.is_empty() {
                    out.push(rest.to_lowercase());
                }
            }
            None => out.push(word.to_lowercase()),
        }
    }
    out
}

/// Inverse of [`tokenize`] up to case: tails are glued back onto the person
/// variable before them.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    let mut prev_var = false;
    for t in tokens {
        let t = t.as_ref();
        let glue = prev_var && t.chars().next().is_some_and(|c| !c.is_alphanumeric());
        if !out.is_empty() && !glue {
            out.push(' ');
        }
        out.push_str(t);
        prev_var = !glue && PersonVar::from_token(t).is_some_and(|v| v.as_str() == t);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabularyMap {
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
}

impl VocabularyMap {
    /// A vocabulary holding only the reserved tokens.
    pub fn reserved_only() -> Self {
        Self::from_tokens(RESERVED.iter().map(|s| s.to_string()).collect()).expect("reserved tokens are valid")
    }

    /// Rebuilds a vocabulary from its id-ordered token list.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self, Seq2SeqError> {
        if tokens.len() < RESERVED.len() || tokens.iter().zip(RESERVED).any(|(a, b)| a != b) {
            return Err(Seq2SeqError::BadVocabulary("reserved tokens missing or out of order".into()));
        }
        let mut ids = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if ids.insert(t.clone(), i as u32).is_some() {
                return Err(Seq2SeqError::BadVocabulary(format!("duplicate token {t:?}")));
            }
        }
        Ok(Self { tokens, ids })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    /// Token ids of a phrase; unknown words map to `<unk>`.
    pub fn encode(&self, text: &str) -> Vec<u32> {
        tokenize(text).iter().map(|t| self.id(t).unwrap_or(UNK)).collect()
    }

    /// `<bos>`, the phrase ids, `<eos>`.
    pub fn encode_target(&self, text: &str) -> Vec<u32> {
        let mut ids = vec![BOS];
        ids.extend(self.encode(text));
        ids.push(EOS);
        ids
    }

    /// Text of a generated id sequence; `<bos>`, `<eos>` and `<pad>` are dropped.
    pub fn decode(&self, ids: &[u32]) -> String {
        let toks: Vec<&str> = ids
            .iter()
            .filter(|&&i| i != BOS && i != EOS && i != PAD)
            .map(|&i| self.token(i).unwrap_or("<unk>"))
            .collect();
        detokenize(&toks)
    }
}

/// Builds the vocabulary from Train-split triples (other splits are ignored).
/// Empty-sentinel targets contribute nothing. A `min_count` of 0 acts as 1.
pub fn build_vocab<'a, I>(triples: I, min_count: usize) -> VocabularyMap
where
    I: IntoIterator<Item = &'a Triple>,
{
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for t in triples.into_iter().filter(|t| t.split == Split::Train) {
        let mut add = |text: &str| {
            for tok in tokenize(text) {
                *counts.entry(tok).or_default() += 1;
            }
        };
        add(t.event.text());
        if !t.target.is_empty() {
            add(t.target.text());
        }
    }
    let min_count = min_count.max(1);
    let mut ranked: Vec<(String, usize)> = counts
        .into_iter()
        .filter(|(tok, c)| *c >= min_count && !RESERVED.contains(&tok.as_str()))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let mut tokens: Vec<String> = RESERVED.iter().map(|s| s.to_string()).collect();
    tokens.extend(ranked.into_iter().map(|(t, _)| t));
    VocabularyMap::from_tokens(tokens).expect("unique by construction")
}
