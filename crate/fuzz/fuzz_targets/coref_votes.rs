#![no_main]

use ifthen_core::ingest::{filter_coref_combinations, parse_coref_votes, MAX_COREF_WORKERS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(input) = std::str::from_utf8(data) else { return };
    let Ok(records) = parse_coref_votes(input) else { return };
    assert!(records.iter().all(|r| r.votes_valid() <= MAX_COREF_WORKERS));
    let kept = filter_coref_combinations(&records);
    assert!(kept.len() <= records.len());
});
