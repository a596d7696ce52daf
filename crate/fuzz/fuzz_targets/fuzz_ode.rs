#![no_main]
//! Equation JSON: parse, then classify and check relations.

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(ode) = segre_ode::schema::parse_ode(text) {
            let _ = segre_ode::ode::fuchsian_test_ode(&ode);
            let _ = segre_ode::ode::check_relations(&ode, segre_ode::hypersurface::Sign::Positive);
            let _ = segre_ode::ode::reduce(&ode);
        }
    }
});
