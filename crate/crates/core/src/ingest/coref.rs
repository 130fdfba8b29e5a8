use super::IngestError;
use crate::atlas::EventPhrase;

/// Number of workers who judged each coreference combination.
pub const MAX_COREF_WORKERS: u8 = 3;

/// Votes needed to keep a combination.
const MIN_VALID_VOTES: u8 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorefVoteRecord {
    pub event_candidate: EventPhrase,
    votes_valid: u8,
}

impl CorefVoteRecord {
    pub fn new(event_candidate: EventPhrase, votes_valid: u8) -> Result<Self, IngestError> {
        if votes_valid > MAX_COREF_WORKERS {
            return Err(IngestError::TooManyVotes(votes_valid));
        }
        Ok(Self { event_candidate, votes_valid })
    }

    pub fn votes_valid(&self) -> u8 {
        self.votes_valid
    }
}

/// Keeps the candidates that at least two workers marked valid, in order.
pub fn filter_coref_combinations(records: &[CorefVoteRecord]) -> Vec<EventPhrase> {
    records
        .iter()
        .filter(|r| r.votes_valid >= MIN_VALID_VOTES)
        .map(|r| r.event_candidate.clone())
        .collect()
}

/// Parses `event<TAB>votes_valid` rows.
pub fn parse_coref_votes(input: &str) -> Result<Vec<CorefVoteRecord>, IngestError> {
    let mut out = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        let text = raw.strip_suffix('\r').unwrap_or(raw);
        if text.trim().is_empty() || text.starts_with('#') {
            continue;
        }
        let err = |message: String| IngestError::Parse { line, message };
        let (event, votes) = text.split_once('\t').ok_or_else(|| err("expected event<TAB>votes".into()))?;
        let votes: u8 = votes.trim().parse().map_err(|_| err(format!("bad vote count {votes:?}")))?;
        let event = EventPhrase::new(event).map_err(|e| err(e.to_string()))?;
        out.push(CorefVoteRecord::new(event, votes).map_err(|e| err(e.to_string()))?);
    }
    Ok(out)
}
