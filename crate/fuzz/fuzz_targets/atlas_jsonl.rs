#![no_main]

use ifthen_core::atlas::{parse_atlas, parse_atlas_jsonl, sort_triples, write_atlas_jsonl};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(input) = std::str::from_utf8(data) else { return };
    let _ = parse_atlas(input);
    let Ok(mut triples) = parse_atlas_jsonl(input) else { return };
    let mut out = Vec::new();
    write_atlas_jsonl(&triples, &mut out).unwrap();
    sort_triples(&mut triples);
    assert_eq!(parse_atlas_jsonl(std::str::from_utf8(&out).unwrap()).unwrap(), triples);
});
