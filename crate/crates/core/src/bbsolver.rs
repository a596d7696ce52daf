//! Formal holomorphic solutions of the reduced singular equation.
//!
//! The scalar equation `Z'' = (1/W) P(Z,W) Z' + (1/W^2) Q(Z,W)` becomes,
//! with `U = W Z'`, the first-order system
//!
//! ```text
//! W Z' = U
//! W U' = (1 + P(Z,W)) U + Q(Z,W)
//! ```
//!
//! Seeking `Z = sum a_r W^r`, `U = sum b_r W^r` and matching the `W^r`
//! coefficient yields `(rI - L) h_r = (0, K_r)^T` with
//! `L = [[0, 1], [q10, p00]]`, `h_r = (a_r, b_r)`, and `K_r` a polynomial in
//! the earlier coefficients. A positive integer eigenvalue of `L` is a
//! *resonance*: there the equation is solvable only when `K_r` vanishes, in
//! which case `h_r = 0` is taken; a nonvanishing `K_r` is an *obstruction*
//! and certifies the existence of multiple-valued solutions in an annulus.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::ode::ReducedOde;
use crate::series::TruncatedSeries;

/// Acceptance tolerance for `|Q(z0, 0)|` when linearizing around a base root.
pub const BASE_ROOT_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum BbError {
    #[error("Q(., 0) is a nonzero constant ({value:.3e}); no base root exists")]
    NoRoot { value: f64 },
    #[error("z0 is not a root of Q(., 0): |Q(z0, 0)| = {magnitude:.3e}")]
    BaseNotRoot { magnitude: f64 },
    #[error("solution is obstructed; no residual order is defined")]
    ObstructedSolution,
}

/// Tolerances of the coefficient recursion.
#[derive(Debug, Clone, Copy)]
pub struct ResonanceTol {
    /// `r` counts as resonant when `|r - lambda| < eigen` for an eigenvalue.
    pub eigen: f64,
    /// Relative threshold under which a resonant `K_r` counts as vanishing.
    pub k_vanish: f64,
}

impl Default for ResonanceTol {
    fn default() -> Self {
        ResonanceTol { eigen: 1e-8, k_vanish: 1e-9 }
    }
}

/// The recentered system data: `P`, `Q` with the base root shifted to the
/// origin, the linearization scalars, and the eigenvalues of `L`.
#[derive(Debug, Clone)]
pub struct BbSystem {
    /// `P` coefficients by ascending z-degree (up to cubic), recentered.
    pub p: Vec<TruncatedSeries>,
    /// `Q` coefficients by ascending z-degree (up to cubic), recentered.
    pub q: Vec<TruncatedSeries>,
    pub z0: C64,
    pub p00: C64,
    pub q10: C64,
    pub q01: C64,
    /// Roots of `lambda^2 - p00 lambda - q10`.
    pub eigenvalues: (C64, C64),
    /// Fingerprint of the originating equation.
    pub source: u64,
}

/// Status of a formal solve.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveStatus {
    /// No positive-integer resonance was hit; the solution is unique.
    Unique,
    /// Resonances were hit but every resonant `K_r` vanished; `h_r = 0` was
    /// taken there. Each listed `r` carries one parameter of unexplored
    /// freedom.
    ResonantSolvable(Vec<usize>),
    /// `K_r` failed to vanish at the resonance `r`; no formal solution
    /// through this base root exists.
    Obstructed { r: usize, k_abs: f64 },
}

/// Coefficients `a_1..a_n` (and `b_1..b_n`) of a formal solution, with the
/// recursion outcome.
#[derive(Debug, Clone)]
pub struct FormalSolution {
    pub coeffs: Vec<C64>,
    pub u_coeffs: Vec<C64>,
    pub status: SolveStatus,
    /// First exponent at which the equation residual of the partial sum is
    /// significant; `None` for an obstructed solve.
    pub residual_order: Option<i64>,
    pub source: u64,
}

impl FormalSolution {
    pub fn is_obstructed(&self) -> bool {
        matches!(self.status, SolveStatus::Obstructed { .. })
    }
}

/// Roots of a polynomial of degree <= 3 given by ascending coefficients,
/// via the Durand–Kerner iteration on the tolerance-trimmed degree.
pub fn poly_roots(coeffs: &[C64], tol: f64) -> Vec<C64> {
    let scale = 1.0 + coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let degree = match coeffs.iter().rposition(|c| c.norm() > tol * scale) {
        Some(d) => d,
        None => return Vec::new(),
    };
    if degree == 0 {
        return Vec::new();
    }
    let lead = coeffs[degree];
    let monic: Vec<C64> = coeffs[..=degree].iter().map(|c| c / lead).collect();
    let eval = |z: C64| -> C64 {
        let mut acc = C64::new(1.0, 0.0);
        for c in monic[..degree].iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    let seed = C64::new(0.4, 0.9);
    let mut roots: Vec<C64> = (0..degree).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..500 {
        let mut shift = 0.0f64;
        for i in 0..degree {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..degree {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm_sqr() == 0.0 {
                denom = C64::new(1e-30, 0.0);
            }
            let w = eval(roots[i]) / denom;
            roots[i] -= w;
            shift = shift.max(w.norm());
        }
        let span = 1.0 + roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
        if shift < 1e-14 * span {
            break;
        }
    }
    roots
}

/// Root of smallest modulus of `Q(z, 0)`, ties broken by smallest argument
/// in `[0, 2pi)`; zero for the identically vanishing polynomial.
pub fn choose_base_root(q_at_zero: &[C64; 4]) -> Result<C64, BbError> {
    choose_base_root_with(q_at_zero, 1e-12)
}

pub fn choose_base_root_with(q_at_zero: &[C64; 4], tol: f64) -> Result<C64, BbError> {
    let scale = 1.0 + q_at_zero.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let degree = q_at_zero.iter().rposition(|c| c.norm() > tol * scale);
    match degree {
        None => Ok(C64::new(0.0, 0.0)),
        Some(0) => Err(BbError::NoRoot { value: q_at_zero[0].norm() }),
        Some(_) => {
            let mut roots = poly_roots(q_at_zero, tol);
            let key = |z: &C64| {
                let mut arg = z.arg();
                if arg < 0.0 {
                    arg += 2.0 * std::f64::consts::PI;
                }
                (z.norm(), arg)
            };
            roots.sort_by(|x, y| {
                let (rx, ax) = key(x);
                let (ry, ay) = key(y);
                let near = (rx - ry).abs() <= 1e-12 * (1.0 + rx.max(ry));
                if near {
                    ax.partial_cmp(&ay).unwrap_or(std::cmp::Ordering::Equal)
                } else {
                    rx.partial_cmp(&ry).unwrap_or(std::cmp::Ordering::Equal)
                }
            });
            Ok(roots[0])
        }
    }
}

/// Recenter a z-polynomial with series coefficients at `z -> z + z0`.
fn recenter(coeffs: &[TruncatedSeries], z0: C64) -> Vec<TruncatedSeries> {
    let n = coeffs.len();
    let binom = [[1i64, 0, 0, 0], [1, 1, 0, 0], [1, 2, 1, 0], [1, 3, 3, 1]];
    (0..n)
        .map(|j| {
            let mut acc: Option<TruncatedSeries> = None;
            for k in j..n {
                let factor = C64::new(binom[k][j] as f64, 0.0) * z0.powu((k - j) as u32);
                let term = coeffs[k].scalar_mul(factor);
                acc = Some(match acc {
                    None => term,
                    Some(prev) => prev.add(&term),
                });
            }
            acc.expect("nonempty coefficient list")
        })
        .collect()
}

/// Builds the recentered system around the base root `z0`, which must
/// satisfy `Q(z0, 0) ~ 0` within [`BASE_ROOT_TOL`].
pub fn linearize(reduced: &ReducedOde, z0: C64) -> Result<BbSystem, BbError> {
    let p = recenter(&reduced.p, z0);
    let q = recenter(&reduced.q, z0);

    let q_at_base = q[0].coeff_or_zero(0);
    let scale = 1.0 + reduced.q.iter().map(|s| s.coeff_or_zero(0).norm()).fold(0.0, f64::max);
    if q_at_base.norm() > BASE_ROOT_TOL * scale {
        return Err(BbError::BaseNotRoot { magnitude: q_at_base.norm() });
    }

    let p00 = C64::new(1.0, 0.0) + p[0].coeff_or_zero(0);
    let q10 = q[1].coeff_or_zero(0);
    let q01 = q[0].coeff_or_zero(1);
    // lambda^2 - p00 lambda - q10 = 0
    let disc = (p00 * p00 + q10.scale(4.0)).sqrt();
    let eigenvalues = ((p00 + disc) / 2.0, (p00 - disc) / 2.0);

    Ok(BbSystem { p, q, z0, p00, q10, q01, eigenvalues, source: reduced.source })
}

/// Evaluates the z-polynomial with series coefficients at the series `z`.
fn compose(coeffs: &[TruncatedSeries], z: &TruncatedSeries) -> TruncatedSeries {
    let mut acc = coeffs[0].clone();
    let mut zpow = z.clone();
    for c in &coeffs[1..] {
        acc = acc.add(&c.mul(&zpow));
        zpow = zpow.mul(z);
    }
    acc
}

fn partial_sum(values: &[C64], len: usize, order: i64) -> TruncatedSeries {
    let mut c = vec![C64::new(0.0, 0.0); (order - 1).max(0) as usize];
    for (i, v) in values.iter().take(len).enumerate() {
        c[i] = *v;
    }
    TruncatedSeries::new(1, c)
}

/// Runs the coefficient recursion to order `n`. Resonances with vanishing
/// `K_r` take `h_r = 0` and are recorded; a nonvanishing resonant `K_r`
/// stops the solve with [`SolveStatus::Obstructed`] and no coefficients
/// beyond `r - 1` are reported.
pub fn formal_solve(sys: &BbSystem, n: usize, tol: &ResonanceTol) -> FormalSolution {
    let min_t = sys
        .p
        .iter()
        .chain(sys.q.iter())
        .map(|s| s.truncation_order())
        .min()
        .unwrap_or(0);
    let n_eff = n.min((min_t - 1).max(0) as usize);
    let part_order = n_eff as i64 + 2;

    let mut a: Vec<C64> = Vec::with_capacity(n_eff);
    let mut b: Vec<C64> = Vec::with_capacity(n_eff);
    let mut resonances: Vec<usize> = Vec::new();

    for r in 1..=n_eff {
        let z_part = partial_sum(&a, r - 1, part_order);
        let u_part = partial_sum(&b, r - 1, part_order);
        let one = TruncatedSeries::constant(C64::new(1.0, 0.0), part_order);
        let g = one
            .add(&compose(&sys.p, &z_part))
            .mul(&u_part)
            .add(&compose(&sys.q, &z_part));
        let k_r = match g.known(r as i64) {
            Some(k) => k,
            None => break, // coefficient window exhausted
        };

        let rr = C64::new(r as f64, 0.0);
        let dist = (rr - sys.eigenvalues.0).norm().min((rr - sys.eigenvalues.1).norm());
        if dist < tol.eigen {
            let scale = 1.0
                + a.iter().chain(b.iter()).map(|c| c.norm()).fold(0.0, f64::max);
            if k_r.norm() <= tol.k_vanish * scale {
                a.push(C64::new(0.0, 0.0));
                b.push(C64::new(0.0, 0.0));
                resonances.push(r);
            } else {
                return FormalSolution {
                    coeffs: a,
                    u_coeffs: b,
                    status: SolveStatus::Obstructed { r, k_abs: k_r.norm() },
                    residual_order: None,
                    source: sys.source,
                };
            }
        } else {
            let chi = rr * rr - sys.p00 * rr - sys.q10;
            let a_r = k_r / chi;
            a.push(a_r);
            b.push(rr * a_r);
        }
    }

    let status = if resonances.is_empty() { SolveStatus::Unique } else { SolveStatus::ResonantSolvable(resonances) };
    let mut sol = FormalSolution { coeffs: a, u_coeffs: b, status, residual_order: None, source: sys.source };
    sol.residual_order = residual_order(sys, &sol).ok();
    sol
}

/// Lowest exponent at which the partial sum fails the scalar equation
/// `W^2 Z'' = W P(Z,W) Z' + Q(Z,W)` beyond `1e-9 * scale`; returns the
/// residual's truncation order when it is clean throughout. For a correct
/// solve to order `n` this is at least `n - 1`.
pub fn residual_order(sys: &BbSystem, sol: &FormalSolution) -> Result<i64, BbError> {
    if sol.is_obstructed() {
        return Err(BbError::ObstructedSolution);
    }
    let n = sol.coeffs.len() as i64;
    let z = partial_sum(&sol.coeffs, sol.coeffs.len(), n + 2);
    let w2_zpp = z.differentiate().differentiate().mul_pow(2);
    let w_zp = z.differentiate().mul_pow(1);
    let r = w2_zpp
        .sub(&compose(&sys.p, &z).mul(&w_zp))
        .sub(&compose(&sys.q, &z));
    Ok(match r.ord0(1e-9) {
        Some(k) => k,
        None => r.truncation_order(),
    })
}
