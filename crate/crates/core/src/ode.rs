//! The associated singular ODE and its structure theory: relation checks,
//! Fuchsian classification, reduction to Briot–Bouquet form, extension
//! verdicts, and reconstruction from a linear-fractional map.
//!
//! A [`NonminimalOde`] encodes
//!
//! ```text
//! z'' = (1/w^m) (A z + B) z' + (1/w^{2m}) (C z^3 + D z^2 + E z + F)
//! ```
//!
//! with `A..F` holomorphic at the origin. A [`ReducedOde`] is the same shape
//! with `m = 1`, obtained by the substitution `Z = z w^l`, `W = w`.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::bbsolver::{FormalSolution, SolveStatus};
use crate::hypersurface::{P0Hypersurface, Sign};
use crate::numint::{GrowthReport, GrowthVerdict, MonodromyReport};
use crate::series::{fnv, SeriesError, TruncatedSeries, DEFAULT_ORD_TOL};

/// Tolerance for the structural relation residuals.
pub const RELATION_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("coefficient {name} carries a pole (exponent {exponent}, magnitude {magnitude:.3e})")]
    PoleBearingCoefficient { name: &'static str, exponent: i64, magnitude: f64 },
    #[error("ODE is not of Fuchsian type: {0}")]
    NotFuchsian(String),
    #[error("reduction produced a pole in {name}: {source}")]
    PoleAfterReduction { name: &'static str, source: SeriesError },
    #[error("map is degenerate: the Jacobian numerator a'*alpha - alpha'*a is numerically zero")]
    DegenerateMap,
    #[error("reports reference different ODEs ({expected:#x} vs {found:#x})")]
    InconsistentInputs { expected: u64, found: u64 },
}

/// The sextuple `(A, B, C, D, E, F)` together with the pole order `m`.
#[derive(Debug, Clone)]
pub struct NonminimalOde {
    pub m: u32,
    pub a: TruncatedSeries,
    pub b: TruncatedSeries,
    pub c: TruncatedSeries,
    pub d: TruncatedSeries,
    pub e: TruncatedSeries,
    pub f: TruncatedSeries,
}

impl NonminimalOde {
    /// Builds the ODE, verifying that every coefficient is pole-free.
    /// Stored leading coefficients at negative exponents are admitted only
    /// when numerically zero, and are dropped.
    pub fn new(
        m: u32,
        a: TruncatedSeries,
        b: TruncatedSeries,
        c: TruncatedSeries,
        d: TruncatedSeries,
        e: TruncatedSeries,
        f: TruncatedSeries,
    ) -> Result<Self, OdeError> {
        let chop = |s: TruncatedSeries, name: &'static str| -> Result<TruncatedSeries, OdeError> {
            s.div_pow(0, DEFAULT_ORD_TOL).map_err(|err| match err {
                SeriesError::PoleRemainder { exponent, magnitude, .. } => {
                    OdeError::PoleBearingCoefficient { name, exponent, magnitude }
                }
                _ => unreachable!("div_pow(0, _) only fails with PoleRemainder"),
            })
        };
        Ok(NonminimalOde {
            m,
            a: chop(a, "A")?,
            b: chop(b, "B")?,
            c: chop(c, "C")?,
            d: chop(d, "D")?,
            e: chop(e, "E")?,
            f: chop(f, "F")?,
        })
    }

    pub fn coefficients(&self) -> [(&'static str, &TruncatedSeries); 6] {
        [("A", &self.a), ("B", &self.b), ("C", &self.c), ("D", &self.d), ("E", &self.e), ("F", &self.f)]
    }

    /// True when `A, C, D, F` are all numerically zero, so the equation is
    /// linear in `z`.
    pub fn is_linear(&self, tol: f64) -> bool {
        self.a.is_numerically_zero(tol)
            && self.c.is_numerically_zero(tol)
            && self.d.is_numerically_zero(tol)
            && self.f.is_numerically_zero(tol)
    }

    /// Deterministic hash tying derived reports back to this equation.
    pub fn fingerprint(&self) -> u64 {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        fnv(&mut h, self.m as u64);
        for (_, s) in self.coefficients() {
            s.fingerprint_into(&mut h);
        }
        h
    }
}

/// The reduced equation `Z'' = (1/W) P(Z,W) Z' + (1/W^2) Q(Z,W)` with
/// `P` of z-degree <= 1 and `Q` of z-degree <= 3, plus the reduction
/// exponent `l` that produced it.
#[derive(Debug, Clone)]
pub struct ReducedOde {
    /// Coefficients of `P` by ascending z-degree: `[B_hat, A_hat]`.
    pub p: [TruncatedSeries; 2],
    /// Coefficients of `Q` by ascending z-degree: `[F_hat, E_hat, D_hat, C_hat]`.
    pub q: [TruncatedSeries; 4],
    pub l: u32,
    /// Fingerprint of the equation this reduction came from.
    pub source: u64,
}

impl ReducedOde {
    /// View the reduced equation as a pole-order-1 equation of the same shape.
    pub fn as_ode(&self) -> Result<NonminimalOde, OdeError> {
        NonminimalOde::new(
            1,
            self.p[1].clone(),
            self.p[0].clone(),
            self.q[3].clone(),
            self.q[2].clone(),
            self.q[1].clone(),
            self.q[0].clone(),
        )
    }
}

/// Residuals of the three structural relations an associated equation must
/// satisfy: `A = +-3i conj(F)`, `C = -A^2/9`, and
/// `D = (1/3) w^{2m} (A/w^m)' - (1/3) A B`.
#[derive(Debug, Clone)]
pub struct RelationsReport {
    pub sign: Sign,
    /// Normalized residuals (max coefficient deviation over scale).
    pub residual_a: f64,
    pub residual_c: f64,
    pub residual_d: f64,
    pub tol: f64,
}

impl RelationsReport {
    pub fn pass(&self) -> bool {
        self.residual_a <= self.tol && self.residual_c <= self.tol && self.residual_d <= self.tol
    }

    pub fn summary(&self) -> String {
        format!(
            "|A -+ 3i conj(F)| = {:.3e}, |C + A^2/9| = {:.3e}, |D - D(A,B)| = {:.3e} (tol {:.1e})",
            self.residual_a, self.residual_c, self.residual_d, self.tol
        )
    }
}

fn normalized_diff(lhs: &TruncatedSeries, rhs: &TruncatedSeries) -> f64 {
    let scale = 1.0 + lhs.sup_norm().max(rhs.sup_norm());
    lhs.max_diff(rhs) / scale
}

/// Checks the three structural relations for the given sign choice.
pub fn check_relations(ode: &NonminimalOde, sign: Sign) -> RelationsReport {
    let s = sign.as_f64();
    let m = ode.m as i64;

    let a_expect = ode.f.conjugate_bar().scalar_mul(C64::new(0.0, 3.0 * s));
    let residual_a = normalized_diff(&ode.a, &a_expect);

    let c_expect = ode.a.mul(&ode.a).scalar_mul(C64::new(-1.0 / 9.0, 0.0));
    let residual_c = normalized_diff(&ode.c, &c_expect);

    // (1/3) w^{2m} (A/w^m)' = (1/3)(A' w^m - m A w^{m-1})
    let order = ode.a.truncation_order();
    let w_m = TruncatedSeries::monomial(m, C64::new(1.0, 0.0), order + m);
    let w_m1 = TruncatedSeries::monomial(m - 1, C64::new(1.0, 0.0), order + m - 1);
    let d1 = ode.a.differentiate().mul(&w_m);
    let d2 = ode.a.mul(&w_m1).scalar_mul(C64::new(m as f64, 0.0));
    let d3 = ode.a.mul(&ode.b);
    let d_expect = (&(&d1 - &d2) - &d3).scalar_mul(C64::new(1.0 / 3.0, 0.0));
    let residual_d = normalized_diff(&ode.d, &d_expect);

    RelationsReport { sign, residual_a, residual_c, residual_d, tol: RELATION_TOL }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuchsianClass {
    Fuchsian,
    NonFuchsian,
}

/// One order condition of the Fuchsian test.
#[derive(Debug, Clone)]
pub struct OrderCondition {
    pub name: String,
    /// Observed order of vanishing; `None` is the infinity sentinel.
    pub observed: Option<i64>,
    pub required: String,
    pub ok: bool,
    /// Set when the judgment rests on a window too short to certify the bound.
    pub low_confidence: bool,
}

#[derive(Debug, Clone)]
pub struct FuchsianReport {
    pub class: FuchsianClass,
    pub conditions: Vec<OrderCondition>,
    /// `ord0 A != ord0 F` is impossible for an equation coming from a real
    /// hypersurface; a mismatch is surfaced here as a reality red flag.
    pub ord_a_f_mismatch: bool,
    pub low_confidence: bool,
    pub tol: f64,
}

impl FuchsianReport {
    pub fn failed(&self) -> Vec<&OrderCondition> {
        self.conditions.iter().filter(|c| !c.ok).collect()
    }

    pub fn summary(&self) -> String {
        self.failed()
            .iter()
            .map(|c| format!("{} (observed {:?})", c.name, c.observed))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// `ord0 s >= bound`, with the sentinel counting as infinity. A sentinel on
/// a window shorter than the bound passes but is flagged low-confidence.
fn order_at_least(name: &str, s: &TruncatedSeries, bound: i64, tol: f64, doubled: bool) -> OrderCondition {
    let observed = s.ord0(tol);
    let (ok, low_confidence) = match observed {
        Some(o) => {
            let lhs = if doubled { 2 * o } else { o };
            (lhs >= bound, false)
        }
        None => {
            let seen = if doubled { 2 * s.truncation_order() } else { s.truncation_order() };
            (true, seen < bound)
        }
    };
    OrderCondition {
        name: name.to_string(),
        observed,
        required: if doubled { format!("2*ord >= {bound}") } else { format!("ord >= {bound}") },
        ok,
        low_confidence,
    }
}

/// Fuchsian classification on the equation side:
/// `ord0 B >= m-1`, `ord0 E >= 2m-2`, `ord0 A = ord0 F`, `2 ord0 F >= 3(m-1)`.
/// For `m = 1` every condition holds automatically.
pub fn fuchsian_test_ode(ode: &NonminimalOde) -> FuchsianReport {
    fuchsian_test_ode_with(ode, DEFAULT_ORD_TOL)
}

pub fn fuchsian_test_ode_with(ode: &NonminimalOde, tol: f64) -> FuchsianReport {
    let m = ode.m as i64;
    let mut conditions = vec![
        order_at_least("ord0 B", &ode.b, m - 1, tol, false),
        order_at_least("ord0 E", &ode.e, 2 * m - 2, tol, false),
        order_at_least("2 ord0 F", &ode.f, 3 * (m - 1), tol, true),
        order_at_least("2 ord0 A", &ode.a, 3 * (m - 1), tol, true),
    ];

    let ord_a = ode.a.ord0(tol);
    let ord_f = ode.f.ord0(tol);
    let (eq_ok, eq_low) = match (ord_a, ord_f) {
        (Some(x), Some(y)) => (x == y, false),
        (None, None) => (true, false),
        (Some(x), None) => (x >= ode.f.truncation_order(), x >= ode.f.truncation_order()),
        (None, Some(y)) => (y >= ode.a.truncation_order(), y >= ode.a.truncation_order()),
    };
    let ord_a_f_mismatch = !eq_ok;
    let shown = match ord_f {
        Some(o) => o.to_string(),
        None => "inf".to_string(),
    };
    conditions.push(OrderCondition {
        name: "ord0 A = ord0 F".to_string(),
        observed: ord_a,
        required: format!("equal to ord0 F = {shown}"),
        ok: eq_ok,
        low_confidence: eq_low,
    });

    let class = if conditions.iter().all(|c| c.ok) { FuchsianClass::Fuchsian } else { FuchsianClass::NonFuchsian };
    let low_confidence = conditions.iter().any(|c| c.low_confidence);
    FuchsianReport { class, conditions, ord_a_f_mismatch, low_confidence, tol }
}

/// Fuchsian classification on the defining-data side:
/// `ord0 phi_22 >= m-1`, `ord0 phi_33 >= 2m-2`, `2 ord0 phi_23 >= 3(m-1)`.
pub fn fuchsian_test_hypersurface(h: &P0Hypersurface) -> FuchsianReport {
    fuchsian_test_hypersurface_with(h, DEFAULT_ORD_TOL)
}

pub fn fuchsian_test_hypersurface_with(h: &P0Hypersurface, tol: f64) -> FuchsianReport {
    let m = h.m as i64;
    let conditions = vec![
        order_at_least("ord0 phi_22", &h.phi22, m - 1, tol, false),
        order_at_least("ord0 phi_33", &h.phi33, 2 * m - 2, tol, false),
        order_at_least("2 ord0 phi_23", &h.phi23, 3 * (m - 1), tol, true),
    ];
    let class = if conditions.iter().all(|c| c.ok) { FuchsianClass::Fuchsian } else { FuchsianClass::NonFuchsian };
    let low_confidence = conditions.iter().any(|c| c.low_confidence);
    FuchsianReport { class, conditions, ord_a_f_mismatch: false, low_confidence, tol }
}

/// Reduces a Fuchsian equation by `Z = z w^l`, `W = w`, with
/// `l = ord0 F - m + 1` (and `l = 0` in the linear case `F == 0`).
///
/// Writing `[s]_k` for `s / w^k` (which must leave no pole), the reduced
/// coefficients are
///
/// ```text
/// A_hat = [A]_{m+l-1}                  B_hat = [B]_{m-1} + 2l
/// C_hat = [C]_{2m+2l-2}                D_hat = [D]_{2m+l-2} - l [A]_{m+l-1}
/// E_hat = [E]_{2m-2} - l [B]_{m-1} - l(l+1)
/// F_hat = F w^{l-2m+2}
/// ```
///
/// and `C_hat(0) != 0` whenever `F` is not identically zero.
pub fn reduce(ode: &NonminimalOde) -> Result<ReducedOde, OdeError> {
    reduce_with(ode, DEFAULT_ORD_TOL)
}

pub fn reduce_with(ode: &NonminimalOde, tol: f64) -> Result<ReducedOde, OdeError> {
    let report = fuchsian_test_ode_with(ode, tol);
    if report.class != FuchsianClass::Fuchsian {
        return Err(OdeError::NotFuchsian(report.summary()));
    }
    let m = ode.m as i64;
    let l = match ode.f.ord0(tol) {
        None => 0,
        Some(of) => (of - m + 1).max(0),
    };

    let cut = |s: &TruncatedSeries, k: i64, name: &'static str| -> Result<TruncatedSeries, OdeError> {
        if k <= 0 {
            Ok(s.mul_pow(-k))
        } else {
            s.div_pow(k, tol).map_err(|source| OdeError::PoleAfterReduction { name, source })
        }
    };

    let a_hat = cut(&ode.a, m + l - 1, "A_hat")?;
    let b_base = cut(&ode.b, m - 1, "B_hat")?;
    let b_hat = b_base.add(&TruncatedSeries::constant(C64::new(2.0 * l as f64, 0.0), b_base.truncation_order()));
    let c_hat = cut(&ode.c, 2 * m + 2 * l - 2, "C_hat")?;
    let d_hat = {
        let d0 = cut(&ode.d, 2 * m + l - 2, "D_hat")?;
        d0.sub(&a_hat.scalar_mul(C64::new(l as f64, 0.0)))
    };
    let e_hat = {
        let e0 = cut(&ode.e, 2 * m - 2, "E_hat")?;
        let e1 = e0.sub(&b_base.scalar_mul(C64::new(l as f64, 0.0)));
        e1.sub(&TruncatedSeries::constant(C64::new((l * (l + 1)) as f64, 0.0), e1.truncation_order()))
    };
    let f_hat = cut(&ode.f, 2 * m - 2 - l, "F_hat")?;

    if ode.f.ord0(tol).is_some() {
        let c0 = c_hat.coeff_or_zero(0);
        if c0.norm() <= tol * c_hat.scale() {
            return Err(OdeError::PoleAfterReduction {
                name: "C_hat",
                source: SeriesError::PoleRemainder { exponent: 0, power: 2 * m + 2 * l - 2, magnitude: c0.norm() },
            });
        }
    }

    Ok(ReducedOde {
        p: [b_hat, a_hat],
        q: [f_hat, e_hat, d_hat, c_hat],
        l: l as u32,
        source: ode.fingerprint(),
    })
}

/// Outcome of combining classification, monodromy, formal-solution and
/// growth evidence for one equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Trivial monodromy and Fuchsian type: the associated map extends
    /// holomorphically across the singular locus.
    Extends,
    /// Nontrivial monodromy (or an obstructed formal solution, which
    /// certifies multiple-valued solutions): the map branches.
    Branches,
    /// Non-Fuchsian with single-valued evidence but super-polynomial
    /// sectorial growth: no meromorphic extension.
    NoExtensionIrregular,
    /// Non-Fuchsian, no branching detected, no conclusive growth evidence.
    Undetermined,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Extends => "Extends",
            Verdict::Branches => "Branches",
            Verdict::NoExtensionIrregular => "NoExtensionIrregular",
            Verdict::Undetermined => "Undetermined",
        };
        write!(f, "{s}")
    }
}

/// Combines the available evidence into a [`Verdict`]. Never claims more
/// than the inputs support: the non-Fuchsian single-valued case stays
/// [`Verdict::Undetermined`] without growth evidence. An obstructed formal
/// solution outweighs probe-level triviality, since finitely many probes
/// cannot certify single-valuedness.
pub fn extension_verdict(
    ode: &NonminimalOde,
    monodromy: &MonodromyReport,
    formal: Option<&FormalSolution>,
    growth: Option<&GrowthReport>,
) -> Result<Verdict, OdeError> {
    let expected = ode.fingerprint();
    if monodromy.ode_fingerprint != expected {
        return Err(OdeError::InconsistentInputs { expected, found: monodromy.ode_fingerprint });
    }
    if let Some(g) = growth {
        if g.ode_fingerprint != expected {
            return Err(OdeError::InconsistentInputs { expected, found: g.ode_fingerprint });
        }
    }
    if let Some(sol) = formal {
        if sol.source != expected {
            return Err(OdeError::InconsistentInputs { expected, found: sol.source });
        }
    }

    if !monodromy.trivial {
        return Ok(Verdict::Branches);
    }
    if let Some(sol) = formal {
        if matches!(sol.status, SolveStatus::Obstructed { .. }) {
            return Ok(Verdict::Branches);
        }
    }
    if fuchsian_test_ode(ode).class == FuchsianClass::Fuchsian {
        return Ok(Verdict::Extends);
    }
    match growth {
        Some(g) if g.verdict == GrowthVerdict::Irregular => Ok(Verdict::NoExtensionIrregular),
        _ => Ok(Verdict::Undetermined),
    }
}

/// The five coefficient functions of a map in the normal form
/// `f = alpha/(z + delta) + beta`, `g = a/(z + delta) + b`.
#[derive(Debug, Clone)]
pub struct MapTuple {
    pub alpha: TruncatedSeries,
    pub a: TruncatedSeries,
    pub beta: TruncatedSeries,
    pub b: TruncatedSeries,
    pub delta: TruncatedSeries,
}

/// Rebuilds the singular equation whose solution graphs are sent to lines
/// by the map. The quadratic and cubic line-preimage coefficients are
///
/// ```text
/// I2 = (a alpha'' - alpha a'')/J + 3 (b' alpha' - beta' a')/J * (z + delta)
/// I3 = [delta'' + delta' (a alpha'' - alpha a'')/J]
///    + [(a'' alpha' - alpha'' a')/J + 3 delta' (b' alpha' - beta' a')/J] (z + delta)
///    + [(beta' a'' - b' alpha'' + alpha' b'' - a' beta'')/J] (z + delta)^2
///    + [(beta' b'' - b' beta'')/J] (z + delta)^3
/// ```
///
/// with `J = a' alpha - alpha' a`, read off against
/// `I2 = -(A z + B)/w^m` and `I3 = -(C z^3 + D z^2 + E z + F)/w^{2m}`.
pub fn ode_from_map(map: &MapTuple, m: u32) -> Result<NonminimalOde, OdeError> {
    let alpha = &map.alpha;
    let a = &map.a;
    let beta = &map.beta;
    let b = &map.b;
    let delta = &map.delta;

    let d = |s: &TruncatedSeries| s.differentiate();
    let (alpha1, alpha2) = (d(alpha), d(alpha).differentiate());
    let (a1, a2) = (d(a), d(a).differentiate());
    let (beta1, beta2) = (d(beta), d(beta).differentiate());
    let (b1, b2) = (d(b), d(b).differentiate());
    let (delta1, delta2) = (d(delta), d(delta).differentiate());

    let jac = &a1.mul(alpha) - &alpha1.mul(a);
    if jac.is_numerically_zero(DEFAULT_ORD_TOL) {
        return Err(OdeError::DegenerateMap);
    }
    let over_j = |s: &TruncatedSeries| s.div(&jac).expect("jacobian checked nonzero");

    let q0 = over_j(&(&a.mul(&alpha2) - &alpha.mul(&a2))); // (a a'' term)/J
    let q1 = over_j(&(&b1.mul(&alpha1) - &beta1.mul(&a1))).scalar_mul(C64::new(3.0, 0.0));

    // I2 in powers of z
    let i2_z1 = q1.clone();
    let i2_z0 = q0.add(&q1.mul(delta));

    let t3 = over_j(&(&beta1.mul(&b2) - &b1.mul(&beta2)));
    let t2 = {
        let n = &(&beta1.mul(&a2) - &b1.mul(&alpha2)) + &(&alpha1.mul(&b2) - &a1.mul(&beta2));
        over_j(&n)
    };
    let t1 = over_j(&(&a2.mul(&alpha1) - &alpha2.mul(&a1))).add(&delta1.mul(&q1));
    let t0 = delta2.add(&delta1.mul(&q0));

    // I3 in powers of z, expanding (z + delta)^k
    let delta2p = delta.mul(delta);
    let delta3p = delta2p.mul(delta);
    let i3_z3 = t3.clone();
    let i3_z2 = t2.add(&t3.mul(delta).scalar_mul(C64::new(3.0, 0.0)));
    let i3_z1 = {
        let u = t1.add(&t2.mul(delta).scalar_mul(C64::new(2.0, 0.0)));
        u.add(&t3.mul(&delta2p).scalar_mul(C64::new(3.0, 0.0)))
    };
    let i3_z0 = {
        let u = t0.add(&t1.mul(delta));
        let v = t2.mul(&delta2p).add(&t3.mul(&delta3p));
        u.add(&v)
    };

    let mi = m as i64;
    let neg = C64::new(-1.0, 0.0);
    NonminimalOde::new(
        m,
        i2_z1.mul_pow(mi).scalar_mul(neg),
        i2_z0.mul_pow(mi).scalar_mul(neg),
        i3_z3.mul_pow(2 * mi).scalar_mul(neg),
        i3_z2.mul_pow(2 * mi).scalar_mul(neg),
        i3_z1.mul_pow(2 * mi).scalar_mul(neg),
        i3_z0.mul_pow(2 * mi).scalar_mul(neg),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn zero(order: i64) -> TruncatedSeries {
        TruncatedSeries::zero(order)
    }

    fn linear_ode(m: u32, b: TruncatedSeries, e: TruncatedSeries) -> NonminimalOde {
        let order = b.truncation_order().min(e.truncation_order());
        NonminimalOde::new(m, zero(order), b, zero(order), zero(order), e, zero(order)).unwrap()
    }

    #[test]
    fn relations_zero_a_f() {
        // (0, -1, 0, 0, gamma^2, 0): all relations are 0 = 0
        let ode = linear_ode(
            1,
            TruncatedSeries::constant(re(-1.0), 16),
            TruncatedSeries::constant(re(9.0), 16),
        );
        assert!(check_relations(&ode, Sign::Positive).pass());
        assert!(check_relations(&ode, Sign::Negative).pass());
    }

    #[test]
    fn relations_fail_on_a_without_f() {
        let ode = NonminimalOde::new(
            1,
            TruncatedSeries::constant(re(1.0), 16),
            zero(16),
            zero(16),
            zero(16),
            zero(16),
            zero(16),
        )
        .unwrap();
        let rep = check_relations(&ode, Sign::Positive);
        assert!(!rep.pass());
        assert!(rep.residual_a > 1e-2);
    }

    #[test]
    fn relations_derived_sextuple() {
        // m = 1, sign +, F = w: A = 3i w, C = w^2, D = i w, B = -1
        let order = 16;
        let f = TruncatedSeries::monomial(1, re(1.0), order);
        let a = TruncatedSeries::monomial(1, C64::new(0.0, 3.0), order);
        let c = TruncatedSeries::monomial(2, re(1.0), order);
        let d = TruncatedSeries::monomial(1, C64::new(0.0, 1.0), order);
        let b = TruncatedSeries::constant(re(-1.0), order);
        let e = TruncatedSeries::constant(re(0.7), order); // E is unconstrained
        let ode = NonminimalOde::new(1, a, b, c, d, e, f).unwrap();
        let rep = check_relations(&ode, Sign::Positive);
        assert!(rep.pass(), "{}", rep.summary());
    }

    #[test]
    fn fuchsian_m1_automatic() {
        let ode = linear_ode(1, TruncatedSeries::constant(re(-1.0), 8), TruncatedSeries::constant(re(4.0), 8));
        assert_eq!(fuchsian_test_ode(&ode).class, FuchsianClass::Fuchsian);
    }

    #[test]
    fn fuchsian_higher_family_fails() {
        // B = 2i - 2w with m = 2: ord0 B = 0 < 1
        let ode = fixtures::higher_level_family(2, 16).unwrap();
        let rep = fuchsian_test_ode(&ode);
        assert_eq!(rep.class, FuchsianClass::NonFuchsian);
        assert!(rep.failed().iter().any(|c| c.name == "ord0 B"));
    }

    #[test]
    fn fuchsian_quadratic_blowup_passes() {
        // B = -2w with m = 2: ord0 B = 1 >= 1
        let ode = fixtures::quadratic_blowup(16);
        assert_eq!(fuchsian_test_ode(&ode).class, FuchsianClass::Fuchsian);
    }

    #[test]
    fn reduce_quadratic_blowup() {
        let ode = fixtures::quadratic_blowup(16);
        let red = reduce(&ode).unwrap();
        assert_eq!(red.l, 0);
        assert!((red.p[0].coeff_or_zero(0) - re(-2.0)).norm() < 1e-12);
        assert!(red.p[1].is_numerically_zero(1e-12));
        for qk in &red.q {
            assert!(qk.is_numerically_zero(1e-12));
        }
    }

    #[test]
    fn reduce_rotational_is_identity() {
        let ode = linear_ode(1, TruncatedSeries::constant(re(-1.0), 16), TruncatedSeries::constant(re(9.0), 16));
        let red = reduce(&ode).unwrap();
        assert_eq!(red.l, 0);
        assert!((red.p[0].coeff_or_zero(0) - re(-1.0)).norm() < 1e-12);
        assert!((red.q[1].coeff_or_zero(0) - re(9.0)).norm() < 1e-12);
        assert!(red.q[0].is_numerically_zero(1e-12));
    }

    #[test]
    fn reduce_m2_linear_example() {
        // B = (2i - 1) w, E = -8 w^2, m = 2 -> P = 2i - 1, Q = -8 Z
        let b = TruncatedSeries::monomial(1, C64::new(-1.0, 2.0), 16);
        let e = TruncatedSeries::monomial(2, re(-8.0), 16);
        let ode = linear_ode(2, b, e);
        let red = reduce(&ode).unwrap();
        assert_eq!(red.l, 0);
        assert!((red.p[0].coeff_or_zero(0) - C64::new(-1.0, 2.0)).norm() < 1e-12);
        assert!((red.q[1].coeff_or_zero(0) - re(-8.0)).norm() < 1e-12);
    }

    #[test]
    fn reduce_with_positive_exponent() {
        // m = 3, phi_22 = w^2, phi_23 = phi_32 = w^3, phi_33 = w^4:
        // hand-derived hats with l = 1.
        let order = 24;
        let h = P0Hypersurface::new(
            3,
            Sign::Positive,
            TruncatedSeries::monomial(2, re(1.0), order),
            TruncatedSeries::monomial(3, re(1.0), order),
            TruncatedSeries::monomial(3, re(1.0), order),
            TruncatedSeries::monomial(4, re(1.0), order),
        );
        let ode = crate::hypersurface::associate_ode(&h).unwrap();
        let red = reduce(&ode).unwrap();
        assert_eq!(red.l, 1);
        // A_hat = 6i, B_hat = 1 + 2i, C_hat = 4, D_hat = 4 - 4i, E_hat = -3 - 2i, F_hat = 2
        assert!((red.p[1].coeff_or_zero(0) - C64::new(0.0, 6.0)).norm() < 1e-10);
        assert!((red.p[0].coeff_or_zero(0) - C64::new(1.0, 2.0)).norm() < 1e-10);
        assert!((red.q[3].coeff_or_zero(0) - re(4.0)).norm() < 1e-10);
        assert!((red.q[2].coeff_or_zero(0) - C64::new(4.0, -4.0)).norm() < 1e-10);
        assert!((red.q[1].coeff_or_zero(0) - C64::new(-3.0, -2.0)).norm() < 1e-10);
        assert!((red.q[0].coeff_or_zero(0) - re(2.0)).norm() < 1e-10);
    }

    #[test]
    fn reduce_rejects_non_fuchsian() {
        let ode = fixtures::higher_level_family(2, 16).unwrap();
        assert!(matches!(reduce(&ode), Err(OdeError::NotFuchsian(_))));
    }

    #[test]
    fn short_windows_flag_low_confidence() {
        // m = 4 needs ord0 B >= 3, but the stored windows end at w^2: the
        // sentinel passes tentatively and is flagged
        let short = TruncatedSeries::zero(2);
        let ode = NonminimalOde::new(4, short.clone(), short.clone(), short.clone(), short.clone(), short.clone(), short).unwrap();
        let rep = fuchsian_test_ode(&ode);
        assert_eq!(rep.class, FuchsianClass::Fuchsian);
        assert!(rep.low_confidence);
        assert!(rep.conditions.iter().any(|c| c.low_confidence));
    }

    #[test]
    fn recover_refuses_relation_violations() {
        let ode = NonminimalOde::new(
            1,
            TruncatedSeries::constant(re(1.0), 8),
            zero(8),
            zero(8),
            zero(8),
            zero(8),
            zero(8),
        )
        .unwrap();
        assert!(matches!(
            crate::hypersurface::recover_hypersurface(&ode, Sign::Positive),
            Err(crate::hypersurface::HypersurfaceError::RelationsViolated { .. })
        ));
    }

    #[test]
    fn map_to_rotational_ode() {
        // alpha = w^-gamma, a = w^gamma, beta = b = delta = 0, gamma = 2
        let order = 24;
        let gamma = 2i64;
        let map = MapTuple {
            alpha: TruncatedSeries::monomial(-gamma, re(1.0), order),
            a: TruncatedSeries::monomial(gamma, re(1.0), order),
            beta: zero(order),
            b: zero(order),
            delta: zero(order),
        };
        let ode = ode_from_map(&map, 1).unwrap();
        assert!(ode.a.is_numerically_zero(1e-10));
        assert!((ode.b.coeff_or_zero(0) - re(-1.0)).norm() < 1e-10);
        assert!(ode.c.is_numerically_zero(1e-10));
        assert!(ode.d.is_numerically_zero(1e-10));
        assert!((ode.e.coeff_or_zero(0) - re(4.0)).norm() < 1e-10);
        assert!(ode.f.is_numerically_zero(1e-10));
        assert!(check_relations(&ode, Sign::Positive).pass());
    }

    #[test]
    fn projective_map_gives_flat_ode() {
        let order = 16;
        let map = MapTuple {
            alpha: TruncatedSeries::constant(re(1.0), order),
            a: TruncatedSeries::monomial(1, re(1.0), order),
            beta: zero(order),
            b: zero(order),
            delta: zero(order),
        };
        let ode = ode_from_map(&map, 1).unwrap();
        for (_, s) in ode.coefficients() {
            assert!(s.is_numerically_zero(1e-12));
        }
        assert!(check_relations(&ode, Sign::Positive).pass());
    }

    #[test]
    fn degenerate_map_is_rejected() {
        // a = alpha makes the Jacobian numerator vanish identically
        let order = 16;
        let s = TruncatedSeries::polynomial(&[(0, re(1.0)), (1, re(2.0))], order);
        let map = MapTuple { alpha: s.clone(), a: s, beta: zero(order), b: zero(order), delta: zero(order) };
        assert!(matches!(ode_from_map(&map, 1), Err(OdeError::DegenerateMap)));
    }

    #[test]
    fn verdict_logic() {
        use crate::numint::MonodromyReport;
        let fuchsian = linear_ode(1, TruncatedSeries::constant(re(-1.0), 8), TruncatedSeries::constant(re(9.0), 8));
        let fp = fuchsian.fingerprint();
        let trivial = MonodromyReport::synthetic(fp, true);
        let branching = MonodromyReport::synthetic(fp, false);
        assert_eq!(extension_verdict(&fuchsian, &trivial, None, None).unwrap(), Verdict::Extends);
        assert_eq!(extension_verdict(&fuchsian, &branching, None, None).unwrap(), Verdict::Branches);

        let nonfuchs = fixtures::higher_level_family(2, 16).unwrap();
        let fp2 = nonfuchs.fingerprint();
        let trivial2 = MonodromyReport::synthetic(fp2, true);
        assert_eq!(extension_verdict(&nonfuchs, &trivial2, None, None).unwrap(), Verdict::Undetermined);

        // mismatched fingerprints are refused
        assert!(matches!(
            extension_verdict(&nonfuchs, &trivial, None, None),
            Err(OdeError::InconsistentInputs { .. })
        ));
    }
}
