#![no_main]

use ifthen_core::seq2seq::parse_embeddings;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(input) = std::str::from_utf8(data) else { return };
    let Ok(e) = parse_embeddings(input) else { return };
    for (_, v) in e.iter() {
        assert_eq!(v.len(), e.dim());
        assert!(v.iter().all(|x| x.is_finite()));
    }
    let _ = e.mean_vector(input);
});
