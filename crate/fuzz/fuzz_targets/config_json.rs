//! Fuzz the run-configuration JSON parser: arbitrary bytes must either
//! parse into a validated config or return an error — never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = lbstab::config::RunConfig::from_json_str(text);
    }
});
