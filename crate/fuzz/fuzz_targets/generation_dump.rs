#![no_main]

use ifthen_core::generate::{parse_generation_dump, write_generation_dump};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(input) = std::str::from_utf8(data) else { return };
    let Ok(lists) = parse_generation_dump(input) else { return };
    let mut out = Vec::new();
    write_generation_dump(&mut out, &lists).unwrap();
    assert_eq!(parse_generation_dump(std::str::from_utf8(&out).unwrap()).unwrap(), lists);
});
