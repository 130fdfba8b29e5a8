#![no_main]

use ifthen_core::atlas::{atlas_tsv_string, parse_atlas_tsv, sort_triples};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(input) = std::str::from_utf8(data) else { return };
    let Ok(mut triples) = parse_atlas_tsv(input) else { return };
    // anything that parses must survive a write and a second parse
    let text = atlas_tsv_string(&triples).expect("parsed triples are writable");
    sort_triples(&mut triples);
    assert_eq!(parse_atlas_tsv(&text).unwrap(), triples);
});
