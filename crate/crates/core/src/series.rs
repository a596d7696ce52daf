//! Truncated Laurent series over complex double-precision scalars.
//!
//! A [`TruncatedSeries`] stores the coefficients `c_v, ..., c_{T-1}` of
//! `sum_k c_k w^k` where `v` is the valuation (lowest stored exponent, may
//! be negative) and `T = v + len` is the truncation order. Exponents below
//! `v` are exactly zero; exponents at or above `T` are *unknown*, not zero.
//!
//! Arithmetic propagates truncation orders pessimistically: a result never
//! claims a coefficient the inputs cannot determine. For a product the
//! propagated order is `min(v1 + T2, v2 + T1)`.
//!
//! The order of vanishing of a numerically specified series is a tolerance
//! judgment; see [`TruncatedSeries::ord0`].

use num_complex::Complex64 as C64;
use thiserror::Error;

/// Default threshold used by order-of-vanishing decisions.
pub const DEFAULT_ORD_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    /// Division by a series whose stored coefficients are all numerically zero.
    #[error("division by a numerically zero series (through truncation order {trunc_order})")]
    DivByZeroSeries { trunc_order: i64 },
    /// Evaluation at `w = 0` of a series with a pole.
    #[error("evaluation at w = 0 of a series with valuation {valuation} < 0")]
    EvalAtPole { valuation: i64 },
    /// Division by `w^k` left a coefficient below the cut that is not numerically zero.
    #[error("nonzero coefficient {magnitude:.3e} at exponent {exponent} blocks division by w^{power}")]
    PoleRemainder { exponent: i64, power: i64, magnitude: f64 },
}

/// Result of evaluating a partial sum at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: C64,
    /// Set when `|w|` exceeds the ratio-test radius estimated from the
    /// stored coefficient tail; the partial sum is then untrustworthy.
    pub radius_warning: bool,
}

/// A finite window of a Laurent series, `c_v w^v + ... + c_{T-1} w^{T-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    valuation: i64,
    coeffs: Vec<C64>,
}

impl TruncatedSeries {
    /// Series with the given valuation and coefficient window.
    pub fn new(valuation: i64, coeffs: Vec<C64>) -> Self {
        TruncatedSeries { valuation, coeffs }
    }

    /// The zero series, known through `trunc_order`.
    pub fn zero(trunc_order: i64) -> Self {
        let v = trunc_order.min(0);
        TruncatedSeries { valuation: v, coeffs: vec![C64::new(0.0, 0.0); (trunc_order - v) as usize] }
    }

    /// Constant series known through `trunc_order`.
    pub fn constant(c: C64, trunc_order: i64) -> Self {
        let mut s = Self::zero(trunc_order.max(1));
        s.set(0, c);
        s
    }

    /// The monomial `c w^exp`, known exactly through `trunc_order`.
    pub fn monomial(exp: i64, c: C64, trunc_order: i64) -> Self {
        let t = trunc_order.max(exp + 1);
        let mut coeffs = vec![C64::new(0.0, 0.0); (t - exp) as usize];
        coeffs[0] = c;
        TruncatedSeries { valuation: exp, coeffs }
    }

    /// Exact polynomial from `(exponent, coefficient)` terms, known through `trunc_order`.
    pub fn polynomial(terms: &[(i64, C64)], trunc_order: i64) -> Self {
        let v = terms.iter().map(|&(e, _)| e).min().unwrap_or(0).min(trunc_order);
        let coeffs = vec![C64::new(0.0, 0.0); (trunc_order - v).max(0) as usize];
        let mut s = TruncatedSeries { valuation: v, coeffs };
        for &(e, c) in terms {
            if e < trunc_order {
                let prev = s.coeff_or_zero(e);
                s.set(e, prev + c);
            }
        }
        s
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    /// First exponent whose coefficient is unknown.
    pub fn truncation_order(&self) -> i64 {
        self.valuation + self.coeffs.len() as i64
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient at `exp`: zero below the valuation, `None` past the truncation order.
    pub fn known(&self, exp: i64) -> Option<C64> {
        if exp < self.valuation {
            Some(C64::new(0.0, 0.0))
        } else if exp < self.truncation_order() {
            Some(self.coeffs[(exp - self.valuation) as usize])
        } else {
            None
        }
    }

    /// Coefficient at `exp`, defaulting unknown positions to zero.
    pub fn coeff_or_zero(&self, exp: i64) -> C64 {
        self.known(exp).unwrap_or_default()
    }

    fn set(&mut self, exp: i64, c: C64) {
        let i = (exp - self.valuation) as usize;
        self.coeffs[i] = c;
    }

    /// `1 + max |c_k|` over the stored window; the scale used for tolerance checks.
    pub fn scale(&self) -> f64 {
        1.0 + self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest stored coefficient magnitude.
    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Order of vanishing: smallest exponent with `|c_k| > tol * scale`,
    /// or `None` (the infinity sentinel) when every stored coefficient is
    /// below threshold. The judgment only sees the stored window, so an
    /// infinity result on a short series is low-confidence.
    pub fn ord0(&self, tol: f64) -> Option<i64> {
        let cut = tol * self.scale();
        self.coeffs
            .iter()
            .position(|c| c.norm() > cut)
            .map(|i| self.valuation + i as i64)
    }

    /// True when every stored coefficient is below `tol * scale`.
    pub fn is_numerically_zero(&self, tol: f64) -> bool {
        self.ord0(tol).is_none()
    }

    /// Termwise derivative; valuation and truncation order both drop by one.
    pub fn differentiate(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * C64::new((self.valuation + i as i64) as f64, 0.0))
            .collect();
        TruncatedSeries { valuation: self.valuation - 1, coeffs }
    }

    /// Replace every coefficient by its complex conjugate; exponents unchanged.
    pub fn conjugate_bar(&self) -> Self {
        TruncatedSeries {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    /// Multiply by `w^k` (exact shift).
    pub fn mul_pow(&self, k: i64) -> Self {
        TruncatedSeries { valuation: self.valuation + k, coeffs: self.coeffs.clone() }
    }

    /// Divide by `w^k`, requiring every stored coefficient below exponent `k`
    /// to be numerically zero (`<= tol * scale`); those entries are dropped.
    pub fn div_pow(&self, k: i64, tol: f64) -> Result<Self, SeriesError> {
        let cut = tol * self.scale();
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = self.valuation + i as i64;
            if e >= k {
                break;
            }
            if c.norm() > cut {
                return Err(SeriesError::PoleRemainder { exponent: e, power: k, magnitude: c.norm() });
            }
        }
        let keep_from = ((k - self.valuation).max(0) as usize).min(self.coeffs.len());
        let valuation = (self.valuation - k).max(0).min(self.truncation_order() - k);
        Ok(TruncatedSeries { valuation, coeffs: self.coeffs[keep_from..].to_vec() })
    }

    pub fn scalar_mul(&self, c: C64) -> Self {
        TruncatedSeries {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Drop knowledge beyond `trunc_order`.
    pub fn truncate(&self, trunc_order: i64) -> Self {
        if trunc_order >= self.truncation_order() {
            return self.clone();
        }
        let keep = (trunc_order - self.valuation).max(0) as usize;
        TruncatedSeries {
            valuation: self.valuation.min(trunc_order),
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let v = self.valuation.min(rhs.valuation);
        let t = self.truncation_order().min(rhs.truncation_order());
        if t <= v {
            return TruncatedSeries { valuation: t, coeffs: Vec::new() };
        }
        let coeffs = (v..t).map(|e| self.coeff_or_zero(e) + rhs.coeff_or_zero(e)).collect();
        TruncatedSeries { valuation: v, coeffs }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        self.scalar_mul(C64::new(-1.0, 0.0))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let v = self.valuation + rhs.valuation;
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut coeffs = vec![C64::new(0.0, 0.0); n];
        for i in 0..self.coeffs.len().min(n) {
            let a = self.coeffs[i];
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..rhs.coeffs.len().min(n - i) {
                coeffs[i + j] += a * rhs.coeffs[j];
            }
        }
        TruncatedSeries { valuation: v, coeffs }
    }

    /// Laurent division. The divisor's leading order is decided with the
    /// default order tolerance; the quotient's valuation is
    /// `self.valuation - ord0(rhs)`.
    pub fn div(&self, rhs: &Self) -> Result<Self, SeriesError> {
        let beta = rhs
            .ord0(DEFAULT_ORD_TOL)
            .ok_or(SeriesError::DivByZeroSeries { trunc_order: rhs.truncation_order() })?;
        let b: Vec<C64> = rhs.coeffs[(beta - rhs.valuation) as usize..].to_vec();
        let n = self.coeffs.len().min(b.len());
        let mut q = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= b[j] * q[k - j];
            }
            q[k] = acc / b[0];
        }
        Ok(TruncatedSeries { valuation: self.valuation - beta, coeffs: q })
    }

    /// Partial sum at `w`, with a heuristic convergence-radius warning.
    pub fn eval(&self, w: C64) -> Result<Evaluation, SeriesError> {
        if w.norm_sqr() == 0.0 {
            if self.valuation < 0 && self.coeffs.iter().take((-self.valuation) as usize).any(|c| c.norm_sqr() != 0.0) {
                return Err(SeriesError::EvalAtPole { valuation: self.valuation });
            }
            return Ok(Evaluation { value: self.coeff_or_zero(0), radius_warning: false });
        }
        // Horner over the stored window, then the valuation shift.
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * w + c;
        }
        let value = acc * w.powi(self.valuation as i32);
        let radius_warning = match self.radius_estimate() {
            Some(r) => w.norm() > r,
            None => false,
        };
        Ok(Evaluation { value, radius_warning })
    }

    /// Root-test radius estimate from the tail of the stored coefficients
    /// at positive exponents; `None` when the tail carries no information
    /// (e.g. an exact polynomial).
    pub fn radius_estimate(&self) -> Option<f64> {
        let cut = DEFAULT_ORD_TOL * self.scale();
        let t = self.truncation_order();
        let tail_start = (t - (self.coeffs.len() as i64) / 3).max(1);
        let mut growth: f64 = 0.0;
        let mut seen = false;
        for e in tail_start..t {
            let c = self.coeff_or_zero(e).norm();
            if c > cut {
                seen = true;
                growth = growth.max(c.powf(1.0 / e as f64));
            }
        }
        if seen && growth > 0.0 {
            Some(1.0 / growth)
        } else {
            None
        }
    }

    /// Max coefficient difference over the intersection of known windows.
    pub fn max_diff(&self, rhs: &Self) -> f64 {
        let v = self.valuation.min(rhs.valuation);
        let t = self.truncation_order().min(rhs.truncation_order());
        (v..t)
            .map(|e| (self.coeff_or_zero(e) - rhs.coeff_or_zero(e)).norm())
            .fold(0.0, f64::max)
    }

    /// FNV-1a over the valuation and coefficient bit patterns; used to tie
    /// derived reports back to their source data.
    pub fn fingerprint_into(&self, h: &mut u64) {
        fnv(h, self.valuation as u64);
        for c in &self.coeffs {
            fnv(h, c.re.to_bits());
            fnv(h, c.im.to_bits());
        }
    }
}

pub(crate) fn fnv(h: &mut u64, x: u64) {
    for i in 0..8 {
        *h ^= (x >> (8 * i)) & 0xff;
        *h = h.wrapping_mul(0x100_0000_01b3);
    }
}

impl std::fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let e = self.valuation + i as i64;
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e == 0 {
                write!(f, "({})", c)?;
            } else {
                write!(f, "({})*w^{}", c, e)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(w^{})", self.truncation_order())
    }
}

impl std::ops::Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::add(self, rhs)
    }
}

impl std::ops::Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::sub(self, rhs)
    }
}

impl std::ops::Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::mul(self, rhs)
    }
}

impl std::ops::Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries::neg(self)
    }
}
