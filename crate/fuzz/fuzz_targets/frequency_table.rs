#![no_main]

use ifthen_core::atlas::EventPhrase;
use ifthen_core::ingest::{blank_infrequent_args, parse_frequency_tables};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(input) = std::str::from_utf8(data) else { return };
    let Ok(tables) = parse_frequency_tables(input) else { return };
    let event = EventPhrase::new("PersonX takes the dog for a walk").unwrap();
    for table in tables.values() {
        let threshold = table.default_threshold().max(1);
        let once = blank_infrequent_args(&event, table, threshold).unwrap();
        let twice = blank_infrequent_args(&once, table, threshold).unwrap();
        assert_eq!(once, twice);
    }
});
