//! Fuzz the operator and certificate text parsers: arbitrary text must
//! parse or error, never panic or over-allocate.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = lbstab::formats::parse_operator(text);
        let _ = lbstab::formats::parse_certificate(text);
    }
});
