#![no_main]
//! Combined equation + graph-sample payload for the residual check.

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok((ode, samples)) = segre_ode::schema::parse_segre_check(text) {
            let _ = segre_ode::numint::segre_residual(&ode, &samples);
        }
    }
});
