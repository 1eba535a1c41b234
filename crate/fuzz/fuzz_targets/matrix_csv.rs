//! Fuzz the matrix CSV parsers (integer and real): arbitrary text must
//! parse or error, never panic, and parsed output must re-serialize.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(rows) = lbstab::formats::parse_integer_matrix_csv(text) {
            // Round trip must stay parseable and equal.
            let again = lbstab::formats::write_integer_matrix_csv(&rows);
            let back = lbstab::formats::parse_integer_matrix_csv(&again).expect("round trip");
            assert_eq!(rows, back);
        }
        let _ = lbstab::formats::parse_matrix_csv(text);
    }
});
