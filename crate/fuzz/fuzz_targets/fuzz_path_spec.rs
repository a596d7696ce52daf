#![no_main]
//! Path-spec JSON must parse or fail cleanly.

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(kind) = segre_ode::schema::parse_path_spec(text) {
            let spec = segre_ode::numint::PathSpec { kind, control: Default::default() };
            let _ = spec.clearance();
            let _ = spec.start();
        }
    }
});
