//! Prenormalized nonminimal hypersurface data and the closed-form passage
//! to the associated singular ODE.
//!
//! A hypersurface of the class handled here is given by an exponential
//! defining equation whose angular part, after prenormalization, reads
//! `+-|z|^2 + sum_{k,l>=2} phi_kl(wbar) z^k zbar^l`. Only the coefficient
//! functions `phi_22, phi_23, phi_32, phi_33` enter the associated ODE, so
//! only those four are stored. Reality of the hypersurface forces
//! `phi_32 = conj(phi_23)` (coefficientwise conjugation).

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::ode::{check_relations, NonminimalOde, OdeError};
use crate::series::{fnv, TruncatedSeries, DEFAULT_ORD_TOL};

/// Tolerance for the reality condition `phi_32 = conj(phi_23)`.
pub const REALITY_TOL: f64 = 1e-10;

/// The sign of the Levi part of the prenormal defining function. It selects
/// the upper (`Positive`) or lower (`Negative`) signs throughout the
/// association formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    /// `+1.0` or `-1.0`.
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::Positive => write!(f, "+"),
            Sign::Negative => write!(f, "-"),
        }
    }
}

#[derive(Debug, Error)]
pub enum HypersurfaceError {
    #[error("hypersurface fails validation: {0}")]
    InvalidHypersurface(String),
    #[error("ODE does not satisfy the structural relations for sign {sign}: {detail}")]
    RelationsViolated { sign: Sign, detail: String },
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// Prenormalized defining data of a nonminimal hypersurface: the
/// nonminimality order `m`, the sign, and the four coefficient functions
/// that determine the associated ODE.
#[derive(Debug, Clone)]
pub struct P0Hypersurface {
    pub m: u32,
    pub sign: Sign,
    pub phi22: TruncatedSeries,
    pub phi23: TruncatedSeries,
    pub phi32: TruncatedSeries,
    pub phi33: TruncatedSeries,
}

impl P0Hypersurface {
    pub fn new(
        m: u32,
        sign: Sign,
        phi22: TruncatedSeries,
        phi23: TruncatedSeries,
        phi32: TruncatedSeries,
        phi33: TruncatedSeries,
    ) -> Self {
        P0Hypersurface { m, sign, phi22, phi23, phi32, phi33 }
    }

    pub fn phi(&self, k: u32, l: u32) -> Option<&TruncatedSeries> {
        match (k, l) {
            (2, 2) => Some(&self.phi22),
            (2, 3) => Some(&self.phi23),
            (3, 2) => Some(&self.phi32),
            (3, 3) => Some(&self.phi33),
            _ => None,
        }
    }

    pub fn fingerprint(&self) -> u64 {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        fnv(&mut h, self.m as u64);
        fnv(&mut h, if self.sign == Sign::Positive { 1 } else { 2 });
        for s in [&self.phi22, &self.phi23, &self.phi32, &self.phi33] {
            s.fingerprint_into(&mut h);
        }
        h
    }
}

/// One pass/fail entry of a validation report.
#[derive(Debug, Clone)]
pub struct ValidationCheck {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

/// Report-style output of [`validate_hypersurface`].
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
    /// Order-of-vanishing judgments that rest on very short coefficient
    /// windows; informational, not a failure.
    pub low_confidence: Vec<String>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

/// Checks `m >= 1`, pole-freeness of the coefficient functions, and the
/// reality condition `phi_32 = conj(phi_23)` within [`REALITY_TOL`].
pub fn validate_hypersurface(h: &P0Hypersurface) -> ValidationReport {
    let mut checks = Vec::new();
    let mut low_confidence = Vec::new();

    checks.push(ValidationCheck {
        name: "m-positivity",
        ok: h.m >= 1,
        detail: format!("m = {}", h.m),
    });

    let mut poles_ok = true;
    let mut pole_detail = String::from("all phi holomorphic at 0");
    for (tag, s) in [("22", &h.phi22), ("23", &h.phi23), ("32", &h.phi32), ("33", &h.phi33)] {
        if let Some(ord) = s.ord0(DEFAULT_ORD_TOL) {
            if ord < 0 {
                poles_ok = false;
                pole_detail = format!("phi_{tag} has a pole: leading exponent {ord}");
            }
        } else if s.len() < 4 {
            low_confidence.push(format!(
                "phi_{tag} is numerically zero but stores only {} coefficients",
                s.len()
            ));
        }
    }
    checks.push(ValidationCheck { name: "pole-free", ok: poles_ok, detail: pole_detail });

    let resid = h.phi32.max_diff(&h.phi23.conjugate_bar());
    let scale = 1.0 + h.phi32.sup_norm().max(h.phi23.sup_norm());
    checks.push(ValidationCheck {
        name: "reality",
        ok: resid <= REALITY_TOL * scale,
        detail: format!("max |phi_32 - conj(phi_23)| = {:.3e} (scale {:.3e})", resid, scale),
    });

    ValidationReport { checks, low_confidence }
}

/// Computes the associated ODE from prenormal data. With the upper signs for
/// a positive hypersurface (lower for negative):
///
/// ```text
/// F = 2 phi_23                    A = +-6i phi_32
/// B = +-2i phi_22 - w^{m-1}       C = -A^2/9
/// E = 6 phi_33 +- 2i(m-1) phi_22 w^{m-1} - 8 phi_22^2 -+ 2i phi_22' w^m
/// D = (1/3) w^{2m} (A/w^m)' - (1/3) A B
/// ```
pub fn associate_ode(h: &P0Hypersurface) -> Result<NonminimalOde, HypersurfaceError> {
    let report = validate_hypersurface(h);
    if !report.pass() {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.ok).map(|c| c.name).collect();
        return Err(HypersurfaceError::InvalidHypersurface(failed.join(", ")));
    }
    let s = h.sign.as_f64();
    let m = h.m as i64;
    let i2s = C64::new(0.0, 2.0 * s); // +-2i
    let i6s = C64::new(0.0, 6.0 * s); // +-6i
    let order = h
        .phi22
        .truncation_order()
        .min(h.phi23.truncation_order())
        .min(h.phi32.truncation_order())
        .min(h.phi33.truncation_order());

    let f = h.phi23.scalar_mul(C64::new(2.0, 0.0));
    let a = h.phi32.scalar_mul(i6s);
    let w_m1 = TruncatedSeries::monomial(m - 1, C64::new(1.0, 0.0), order + m - 1);
    let b = &h.phi22.scalar_mul(i2s) - &w_m1;
    let c = a.mul(&a).scalar_mul(C64::new(-1.0 / 9.0, 0.0));

    // E, term by term
    let e1 = h.phi33.scalar_mul(C64::new(6.0, 0.0));
    let e2 = h.phi22.mul(&w_m1).scalar_mul(C64::new(0.0, 2.0 * s * (m - 1) as f64));
    let e3 = h.phi22.mul(&h.phi22).scalar_mul(C64::new(-8.0, 0.0));
    let w_m = TruncatedSeries::monomial(m, C64::new(1.0, 0.0), order + m);
    let e4 = h.phi22.differentiate().mul(&w_m).scalar_mul(C64::new(0.0, -2.0 * s));
    let e = &(&e1 + &e2) + &(&e3 + &e4);

    // D = (1/3)(A' w^m - m A w^{m-1}) - (1/3) A B
    let d1 = a.differentiate().mul(&w_m);
    let d2 = a.mul(&w_m1).scalar_mul(C64::new(m as f64, 0.0));
    let d3 = a.mul(&b);
    let d = (&(&d1 - &d2) - &d3).scalar_mul(C64::new(1.0 / 3.0, 0.0));

    NonminimalOde::new(h.m, a, b, c, d, e, f).map_err(HypersurfaceError::from)
}

/// Inverts [`associate_ode`] for the given sign. The input must satisfy the
/// structural relations for that sign; the round trip through
/// `associate_ode` reproduces the ODE coefficientwise.
pub fn recover_hypersurface(ode: &NonminimalOde, sign: Sign) -> Result<P0Hypersurface, HypersurfaceError> {
    let rel = check_relations(ode, sign);
    if !rel.pass() {
        return Err(HypersurfaceError::RelationsViolated { sign, detail: rel.summary() });
    }
    let s = sign.as_f64();
    let m = ode.m as i64;
    let half = C64::new(0.5, 0.0);
    let inv_2is = C64::new(1.0, 0.0) / C64::new(0.0, 2.0 * s);
    let inv_6is = C64::new(1.0, 0.0) / C64::new(0.0, 6.0 * s);

    let phi23 = ode.f.scalar_mul(half);
    let phi32 = ode.a.scalar_mul(inv_6is);
    let order = ode.b.truncation_order();
    let w_m1 = TruncatedSeries::monomial(m - 1, C64::new(1.0, 0.0), order + m - 1);
    let phi22 = (&ode.b + &w_m1).scalar_mul(inv_2is);

    // phi_33 = (E -+ 2i(m-1) phi_22 w^{m-1} + 8 phi_22^2 +- 2i phi_22' w^m)/6
    let w_m = TruncatedSeries::monomial(m, C64::new(1.0, 0.0), order + m);
    let t2 = phi22.mul(&w_m1).scalar_mul(C64::new(0.0, -2.0 * s * (m - 1) as f64));
    let t3 = phi22.mul(&phi22).scalar_mul(C64::new(8.0, 0.0));
    let t4 = phi22.differentiate().mul(&w_m).scalar_mul(C64::new(0.0, 2.0 * s));
    let phi33 = (&(&ode.e + &t2) + &(&t3 + &t4)).scalar_mul(C64::new(1.0 / 6.0, 0.0));

    Ok(P0Hypersurface::new(ode.m, sign, phi22, phi23, phi32, phi33))
}
