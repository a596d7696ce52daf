#![no_main]
//! 3x3 matrix JSON feeding the centralizer computation.

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(m) = segre_ode::schema::parse_matrix3(text) {
            if let Ok(sigma) = segre_ode::linalg3::MonodromyOperator::new(m) {
                let _ = segre_ode::linalg3::hol_dim_bound(&sigma);
            }
        }
    }
});
