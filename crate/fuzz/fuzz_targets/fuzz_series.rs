#![no_main]
//! The series decoder must never panic on arbitrary bytes.

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = segre_ode::schema::parse_series(text);
    }
});
