#![no_main]
//! Hypersurface JSON: parse, then drive validation on whatever survives.

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(h) = segre_ode::schema::parse_hypersurface(text) {
            let _ = segre_ode::hypersurface::validate_hypersurface(&h);
            let _ = segre_ode::ode::fuchsian_test_hypersurface(&h);
        }
    }
});
