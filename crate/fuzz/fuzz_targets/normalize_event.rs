#![no_main]

use ifthen_core::ingest::{content_key, normalize_event, NameLexicon, WordSet};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(input) = std::str::from_utf8(data) else { return };
    let names: NameLexicon = ["Alex", "Taylor", "Sam", "Jordan"].into_iter().collect();
    let Ok(once) = normalize_event(input, &names) else { return };
    let twice = normalize_event(once.text(), &names).expect("normalized text normalizes again");
    assert_eq!(once, twice);
    let _ = content_key(&once, &WordSet::default_stopwords());
});
