#![no_main]

use ifthen_core::overlap::{normalize_concept, parse_edges, EdgeIndex};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(input) = std::str::from_utf8(data) else { return };
    if let Ok(edges) = parse_edges(input) {
        let index = EdgeIndex::new(&edges);
        for e in &edges {
            assert!(index.has_edge(e.relation(), e.start(), e.end()));
        }
    }
    let _ = normalize_concept(input);
});
