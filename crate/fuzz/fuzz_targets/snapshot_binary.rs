//! Fuzz the binary snapshot decoder: arbitrary bytes must decode or
//! error, never panic, and decoded fields must re-encode bit-identically.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(field) = lbstab::formats::parse_snapshot_binary(data) {
        let bytes = lbstab::formats::write_snapshot_binary(&field);
        assert_eq!(bytes, data, "decode/encode must round-trip");
    }
});
