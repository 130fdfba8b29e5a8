#![no_main]

use ifthen_core::seq2seq::{checkpoint_bytes, read_checkpoint};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(ck) = read_checkpoint(data) else { return };
    let bytes = checkpoint_bytes(&ck.config, &ck.vocab, &ck.params).expect("a loaded checkpoint is writable");
    let again = read_checkpoint(&bytes).expect("written checkpoint reads back");
    assert_eq!(checkpoint_bytes(&again.config, &again.vocab, &again.params).unwrap(), bytes);
});
