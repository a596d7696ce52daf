//! Built-in named example datasets, exposed through the CLI as
//! `--example m-gamma:<gamma>`, `--example mm0:<m>` and `--example ex68`.

use num_complex::Complex64 as C64;

use crate::hypersurface::{P0Hypersurface, Sign};
use crate::ode::{NonminimalOde, OdeError};
use crate::series::TruncatedSeries;

/// `m-gamma:<gamma>`: the rotationally symmetric one-level family. In
/// prenormal form `m = 1`, `phi_33 = gamma^2/6` and the other coefficients
/// vanish; its equation is `z'' = -z'/w + gamma^2 z/w^2` with solution
/// basis `w^{+-gamma}`.
pub fn rotational_hypersurface(gamma: f64, order: i64) -> P0Hypersurface {
    P0Hypersurface::new(
        1,
        Sign::Positive,
        TruncatedSeries::zero(order),
        TruncatedSeries::zero(order),
        TruncatedSeries::zero(order),
        TruncatedSeries::constant(C64::new(gamma * gamma / 6.0, 0.0), order),
    )
}

/// The equation `(0, -1, 0, 0, gamma^2, 0)` with `m = 1` directly.
pub fn rotational_family_ode(gamma: f64, order: i64) -> NonminimalOde {
    let zero = TruncatedSeries::zero(order);
    NonminimalOde::new(
        1,
        zero.clone(),
        TruncatedSeries::constant(C64::new(-1.0, 0.0), order),
        zero.clone(),
        zero.clone(),
        TruncatedSeries::constant(C64::new(gamma * gamma, 0.0), order),
        zero,
    )
    .expect("pole-free by construction")
}

/// `mm0:<m>`: the higher-level family `z'' = (2i/w^m - m/w) z'`, i.e.
/// `B = 2i - m w^{m-1}` with every other coefficient zero. Its nonconstant
/// solutions involve `exp(2i w^{1-m}/(1-m))`, single-valued but with an
/// essential singularity at the origin. Requires `m >= 2`.
pub fn higher_level_family(m: u32, order: i64) -> Result<NonminimalOde, OdeError> {
    assert!(m >= 2, "the higher-level family needs m >= 2");
    let zero = TruncatedSeries::zero(order);
    let b = TruncatedSeries::polynomial(
        &[(0, C64::new(0.0, 2.0)), (m as i64 - 1, C64::new(-(m as f64), 0.0))],
        order,
    );
    NonminimalOde::new(m, zero.clone(), b, zero.clone(), zero.clone(), zero.clone(), zero)
}

/// `ex68`: the quadratic-blowup example `z'' = -2 z'/w` with `m = 2`
/// (`B = -2w`), whose solutions `c0 + c1/w` are single-valued and
/// meromorphic at the origin.
pub fn quadratic_blowup(order: i64) -> NonminimalOde {
    let zero = TruncatedSeries::zero(order);
    NonminimalOde::new(
        2,
        zero.clone(),
        TruncatedSeries::monomial(1, C64::new(-2.0, 0.0), order),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero,
    )
    .expect("pole-free by construction")
}

/// The all-zero-coefficient one-level equation `z'' = -z'/w` (`B = -1`),
/// whose solution basis is `{1, log w}`.
pub fn pure_log_ode(order: i64) -> NonminimalOde {
    let zero = TruncatedSeries::zero(order);
    NonminimalOde::new(
        1,
        zero.clone(),
        TruncatedSeries::constant(C64::new(-1.0, 0.0), order),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero,
    )
    .expect("pole-free by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypersurface::associate_ode;

    #[test]
    fn rotational_hypersurface_matches_direct_ode() {
        for gamma in [0.5, 1.0, 2.0, 3.0] {
            let via_h = associate_ode(&rotational_hypersurface(gamma, 24)).unwrap();
            let direct = rotational_family_ode(gamma, 24);
            for ((_, x), (_, y)) in via_h.coefficients().iter().zip(direct.coefficients()) {
                assert!(x.max_diff(y) < 1e-12);
            }
        }
    }

    #[test]
    fn higher_level_family_b_coefficient() {
        let ode = higher_level_family(2, 16).unwrap();
        assert_eq!(ode.m, 2);
        assert!((ode.b.coeff_or_zero(0) - C64::new(0.0, 2.0)).norm() < 1e-15);
        assert!((ode.b.coeff_or_zero(1) - C64::new(-2.0, 0.0)).norm() < 1e-15);
    }
}
