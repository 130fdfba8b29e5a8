#![no_main]

use ifthen_core::eval::{parse_judgment_sheet, precision_at_10, write_judgment_sheet, ValidThreshold};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(input) = std::str::from_utf8(data) else { return };
    let Ok(sheet) = parse_judgment_sheet(input) else { return };
    let text = write_judgment_sheet(&sheet).unwrap();
    assert_eq!(parse_judgment_sheet(&text).unwrap(), sheet);
    let _ = precision_at_10(&sheet, ValidThreshold::Majority);
    let _ = precision_at_10(&sheet, ValidThreshold::Any);
});
