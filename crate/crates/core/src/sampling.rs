//! Deterministic sample generators for the property and acceptance suites.
//!
//! Everything here is seeded and reproducible; no external randomness.

use num_complex::Complex64 as C64;

use crate::hypersurface::{P0Hypersurface, Sign};
use crate::linalg3::Mat3;
use crate::ode::MapTuple;
use crate::series::TruncatedSeries;

/// SplitMix64: tiny, seedable, good enough for test data.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[-1, 1]`.
    pub fn sym(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    /// Uniform in `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n.max(1)
    }

    /// Complex with both components uniform in `[-1, 1]`.
    pub fn complex(&mut self) -> C64 {
        C64::new(self.sym(), self.sym())
    }
}

/// Series with `len` coefficients starting at `valuation`, entries in the
/// unit square scaled by `amp`.
pub fn random_series(rng: &mut SplitMix64, valuation: i64, len: usize, amp: f64) -> TruncatedSeries {
    let coeffs = (0..len).map(|_| rng.complex() * amp).collect();
    TruncatedSeries::new(valuation, coeffs)
}

/// Series vanishing to exactly `lead` at the origin (the leading
/// coefficient is kept away from zero), known through `order`.
pub fn random_series_with_lead(rng: &mut SplitMix64, lead: i64, order: i64, amp: f64) -> TruncatedSeries {
    let len = (order - lead).max(1) as usize;
    let mut coeffs: Vec<C64> = (0..len).map(|_| rng.complex() * amp).collect();
    let mut c0 = rng.complex();
    while c0.norm() < 0.3 {
        c0 = rng.complex();
    }
    coeffs[0] = c0 * amp;
    TruncatedSeries::new(lead, coeffs)
}

/// Valid defining data with the reality condition built in and leading
/// orders drawn so that both Fuchsian and non-Fuchsian cases occur.
pub fn random_hypersurface(rng: &mut SplitMix64, m: u32, order: i64) -> P0Hypersurface {
    let sign = if rng.below(2) == 0 { Sign::Positive } else { Sign::Negative };
    let mi = m as i64;
    let o22 = rng.below(mi as u64 + 1) as i64;
    let o23 = rng.below((3 * (mi - 1) / 2 + 2) as u64) as i64;
    let o33 = rng.below((2 * mi - 1).max(1) as u64 + 1) as i64;
    let phi22 = random_series_with_lead(rng, o22, order, 0.8);
    let phi23 = random_series_with_lead(rng, o23, order, 0.8);
    let phi32 = phi23.conjugate_bar();
    let phi33 = random_series_with_lead(rng, o33, order, 0.8);
    P0Hypersurface::new(m, sign, phi22, phi23, phi32, phi33)
}

/// Map tuple from the class whose line-preimage equation is linear:
/// random invertible `(alpha, a)`, constant `beta`, `b`, zero `delta`.
pub fn random_linear_map(rng: &mut SplitMix64, order: i64) -> MapTuple {
    loop {
        let mut alpha = random_series(rng, 0, order as usize, 0.7);
        let mut a = random_series(rng, 0, order as usize, 0.7);
        // keep the constant terms away from zero and the pair independent
        alpha = alpha.add(&TruncatedSeries::constant(C64::new(1.0, 0.0), order));
        a = a.add(&TruncatedSeries::monomial(1, C64::new(1.0, 0.0), order));
        let jac = &a.differentiate().mul(&alpha) - &alpha.differentiate().mul(&a);
        if jac.ord0(1e-6) == Some(0) {
            let zero = TruncatedSeries::zero(order);
            return MapTuple {
                alpha,
                a,
                beta: TruncatedSeries::constant(rng.complex(), order),
                b: TruncatedSeries::constant(rng.complex(), order),
                delta: zero,
            };
        }
    }
}

/// Antiderivative with zero constant term; the integrand must have no
/// significant coefficient at exponent `-1`.
pub fn antiderivative(s: &TruncatedSeries) -> TruncatedSeries {
    let v = s.valuation();
    let terms: Vec<(i64, C64)> = (v..s.truncation_order())
        .filter(|&e| e != -1)
        .map(|e| (e + 1, s.coeff_or_zero(e) / C64::new((e + 1) as f64, 0.0)))
        .collect();
    TruncatedSeries::polynomial(&terms, s.truncation_order() + 1)
}

/// Map tuple from the wider class with `b' = (a/alpha) beta'` and a
/// nonconstant `delta`; its line-preimage equation is genuinely cubic.
pub fn random_special_map(rng: &mut SplitMix64, order: i64) -> MapTuple {
    let one = TruncatedSeries::constant(C64::new(1.0, 0.0), order);
    let alpha = random_series(rng, 0, order as usize, 0.3).add(&one);
    // k nonconstant so the Jacobian k' alpha^2 stays away from zero
    let k = random_series(rng, 0, order as usize, 0.3)
        .add(&TruncatedSeries::monomial(1, C64::new(1.0, 0.0), order));
    let beta = random_series(rng, 0, order as usize, 0.5);
    let delta = random_series(rng, 0, order as usize, 0.5);
    let a = k.mul(&alpha);
    let b = antiderivative(&k.mul(&beta.differentiate()));
    MapTuple { alpha, a, beta, b, delta }
}

/// Random 3x3 complex matrix with determinant bounded away from zero.
pub fn random_matrix3(rng: &mut SplitMix64) -> Mat3 {
    loop {
        let mut m = [[C64::new(0.0, 0.0); 3]; 3];
        for row in m.iter_mut() {
            for entry in row.iter_mut() {
                *entry = rng.complex();
            }
        }
        if crate::linalg3::det3(&m).norm() > 0.05 {
            return m;
        }
    }
}
