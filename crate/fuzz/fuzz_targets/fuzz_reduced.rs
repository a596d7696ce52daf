#![no_main]
//! Reduced-equation JSON: parse and run a short formal solve.

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(red) = segre_ode::schema::parse_reduced(text) {
            let q0 = [
                red.q[0].coeff_or_zero(0),
                red.q[1].coeff_or_zero(0),
                red.q[2].coeff_or_zero(0),
                red.q[3].coeff_or_zero(0),
            ];
            if let Ok(z0) = segre_ode::bbsolver::choose_base_root(&q0) {
                if let Ok(sys) = segre_ode::bbsolver::linearize(&red, z0) {
                    let tol = segre_ode::bbsolver::ResonanceTol::default();
                    let _ = segre_ode::bbsolver::formal_solve(&sys, 8, &tol);
                }
            }
        }
    }
});
