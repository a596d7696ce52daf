//! Centralizer dimensions of 3x3 complex matrices and the resulting
//! automorphism-algebra dimension bounds.
//!
//! For a nonsingular operator `sigma` (understood up to nonzero scaling)
//! the centralizer dimension inside `gl(3)` is `9 - rank(K)` where `K` is
//! the 9x9 commutator operator `X -> X sigma - sigma X`. The projective
//! bound subtracts the scalars: `dim_gl - 1`, which is `8` exactly when
//! `sigma` is scalar and at most `4` otherwise.

use num_complex::Complex64 as C64;
use thiserror::Error;

/// Relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-9;

/// Relative determinant threshold for nonsingularity.
pub const DET_TOL: f64 = 1e-10;

/// Relative threshold for scalar-matrix detection.
pub const SCALAR_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is numerically singular: |det| = {det:.3e} against scale {scale:.3e}")]
    Singular { det: f64, scale: f64 },
}

pub type Mat3 = [[C64; 3]; 3];

/// A nonsingular 3x3 matrix acting projectively, i.e. up to scaling.
#[derive(Debug, Clone, Copy)]
pub struct MonodromyOperator {
    matrix: Mat3,
}

impl MonodromyOperator {
    /// Validates `|det| > DET_TOL * ||sigma||^3`.
    pub fn new(matrix: Mat3) -> Result<Self, LinalgError> {
        let det = det3(&matrix).norm();
        let scale = frobenius(&matrix).powi(3);
        if det <= DET_TOL * scale {
            return Err(LinalgError::Singular { det, scale });
        }
        Ok(MonodromyOperator { matrix })
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    /// `||sigma - (tr sigma / 3) I|| < SCALAR_TOL * ||sigma||`: projectively
    /// the identity.
    pub fn is_scalar(&self) -> bool {
        let tr = (self.matrix[0][0] + self.matrix[1][1] + self.matrix[2][2]) / 3.0;
        let mut dev = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { tr } else { C64::new(0.0, 0.0) };
                dev += (self.matrix[i][j] - target).norm_sqr();
            }
        }
        dev.sqrt() < SCALAR_TOL * frobenius(&self.matrix)
    }
}

pub fn det3(m: &Mat3) -> C64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn frobenius(m: &Mat3) -> f64 {
    m.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular values of a square complex matrix by one-sided Jacobi sweeps
/// (columns are rotated until pairwise orthogonal; their norms are the
/// singular values). Adequate and robust at the 9x9 sizes used here.
pub fn singular_values(a: &[Vec<C64>]) -> Vec<f64> {
    let n = a.len();
    // column-major copy
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| a[i][j]).collect()).collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = 0.0f64;
                let mut aqq = 0.0f64;
                let mut apq = C64::new(0.0, 0.0);
                for (cp, cq) in cols[p].iter().zip(cols[q].iter()) {
                    app += cp.norm_sqr();
                    aqq += cq.norm_sqr();
                    apq += cp.conj() * cq;
                }
                if apq.norm() <= 1e-30 || apq.norm() <= 1e-16 * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                // complex Jacobi rotation orthogonalizing columns p and q
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum_or_one() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let phase = apq / apq.norm();
                let (head, tail) = cols.split_at_mut(q);
                for (vp_slot, vq_slot) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let (vp, vq) = (*vp_slot, *vq_slot);
                    *vp_slot = vp * c - vq * phase.conj() * s;
                    *vq_slot = vp * phase * s + vq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|col| col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()).collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

trait SignumOrOne {
    fn signum_or_one(self) -> f64;
}

impl SignumOrOne for f64 {
    fn signum_or_one(self) -> f64 {
        if self >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Report of a centralizer-dimension computation.
#[derive(Debug, Clone)]
pub struct CentralizerReport {
    /// Dimension of `{X : X sigma = sigma X}` inside `gl(3)`.
    pub dim_gl: usize,
    /// Singular values of the commutator operator, descending.
    pub singular_values: Vec<f64>,
    /// Some singular value sits within a factor of 10 of the rank cutoff;
    /// the rank decision is then fragile.
    pub gap_warning: bool,
}

/// Dimension of the solution space of `X sigma = sigma X` over complex 3x3
/// matrices: `9 -` numerical rank of the commutator operator, with the
/// singular-value threshold `RANK_TOL * largest`.
pub fn centralizer_dim(sigma: &MonodromyOperator) -> CentralizerReport {
    let m = sigma.matrix();
    // K vec(X) = vec(X sigma - sigma X) with vec stacking columns:
    // K = sigma^T (x) I - I (x) sigma
    let mut k = vec![vec![C64::new(0.0, 0.0); 9]; 9];
    for i in 0..3 {
        for j in 0..3 {
            for p in 0..3 {
                for q in 0..3 {
                    // row index (q + 3p) ~ entry (q, p) of the output
                    let row = 3 * p + q;
                    let col = 3 * j + i;
                    let mut val = C64::new(0.0, 0.0);
                    // (X sigma)_{q p} = sum_r X_{q r} sigma_{r p} -> coefficient of X_{i j}: delta_{q i} sigma_{j p}
                    if q == i {
                        val += m[j][p];
                    }
                    // (sigma X)_{q p} = sum_r sigma_{q r} X_{r p} -> coefficient of X_{i j}: sigma_{q i} delta_{j p}
                    if j == p {
                        val -= m[q][i];
                    }
                    k[row][col] = val;
                }
            }
        }
    }
    let sv = singular_values(&k);
    let largest = sv.first().copied().unwrap_or(0.0);
    let cutoff = RANK_TOL * largest;
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    let gap_warning = largest > 0.0
        && sv
            .iter()
            .any(|&s| s > cutoff / 10.0 && s < cutoff * 10.0);
    CentralizerReport { dim_gl: 9 - rank, singular_values: sv, gap_warning }
}

/// Projective automorphism-dimension bound.
#[derive(Debug, Clone)]
pub struct HolBoundReport {
    /// `dim_gl - 1`, the quotient by scalars.
    pub bound: usize,
    /// `sigma` is scalar within tolerance; the bound is then 8.
    pub is_identity: bool,
    pub dim_gl: usize,
    pub gap_warning: bool,
}

/// `centralizer_dim(sigma) - 1`; flagged when `sigma` is scalar (bound 8).
pub fn hol_dim_bound(sigma: &MonodromyOperator) -> HolBoundReport {
    let rep = centralizer_dim(sigma);
    HolBoundReport {
        bound: rep.dim_gl - 1,
        is_identity: sigma.is_scalar(),
        dim_gl: rep.dim_gl,
        gap_warning: rep.gap_warning,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn diag(a: f64, b: f64, c: f64) -> Mat3 {
        let z = C64::new(0.0, 0.0);
        [[re(a), z, z], [z, re(b), z], [z, z, re(c)]]
    }

    #[test]
    fn jacobi_singular_values_match_known() {
        // diag(3, 2, 1) has exactly those singular values
        let a: Vec<Vec<C64>> = vec![
            vec![re(3.0), re(0.0), re(0.0)],
            vec![re(0.0), re(2.0), re(0.0)],
            vec![re(0.0), re(0.0), re(1.0)],
        ];
        let sv = singular_values(&a);
        assert!((sv[0] - 3.0).abs() < 1e-12);
        assert!((sv[1] - 2.0).abs() < 1e-12);
        assert!((sv[2] - 1.0).abs() < 1e-12);

        // a rank-1 complex matrix
        let u = [C64::new(1.0, 2.0), C64::new(-1.0, 0.5), C64::new(0.0, 1.0)];
        let v = [C64::new(2.0, -1.0), C64::new(0.0, 3.0), C64::new(1.0, 1.0)];
        let b: Vec<Vec<C64>> = (0..3).map(|i| (0..3).map(|j| u[i] * v[j]).collect()).collect();
        let sv = singular_values(&b);
        let expect = (u.iter().map(|c| c.norm_sqr()).sum::<f64>() * v.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt();
        assert!((sv[0] - expect).abs() < 1e-10 * expect);
        assert!(sv[1] < 1e-12 * expect);
        assert!(sv[2] < 1e-12 * expect);
    }

    #[test]
    fn centralizer_fixtures() {
        let id = MonodromyOperator::new(diag(1.0, 1.0, 1.0)).unwrap();
        assert_eq!(centralizer_dim(&id).dim_gl, 9);

        let distinct = MonodromyOperator::new(diag(1.0, 2.0, 3.0)).unwrap();
        assert_eq!(centralizer_dim(&distinct).dim_gl, 3);

        let repeated = MonodromyOperator::new(diag(1.0, 1.0, 2.0)).unwrap();
        assert_eq!(centralizer_dim(&repeated).dim_gl, 5);

        // full Jordan block at eigenvalue 1: centralizer = polynomials in it
        let z = C64::new(0.0, 0.0);
        let jordan = MonodromyOperator::new([
            [re(1.0), re(1.0), z],
            [z, re(1.0), re(1.0)],
            [z, z, re(1.0)],
        ])
        .unwrap();
        assert_eq!(centralizer_dim(&jordan).dim_gl, 3);

        // one 2-block plus a distinct eigenvalue: dim 2^2 + 1... the block
        // contributes dim 2 (polynomials in the nilpotent part), total 3
        let mixed = MonodromyOperator::new([
            [re(1.0), re(1.0), z],
            [z, re(1.0), z],
            [z, z, re(2.0)],
        ])
        .unwrap();
        assert_eq!(centralizer_dim(&mixed).dim_gl, 3);
    }

    #[test]
    fn hol_bound_fixtures() {
        let scalar = MonodromyOperator::new(diag(2.0, 2.0, 2.0)).unwrap();
        let rep = hol_dim_bound(&scalar);
        assert!(rep.is_identity);
        assert_eq!(rep.bound, 8);

        let rep = hol_dim_bound(&MonodromyOperator::new(diag(1.0, 1.0, 2.0)).unwrap());
        assert!(!rep.is_identity);
        assert_eq!(rep.bound, 4);

        let rep = hol_dim_bound(&MonodromyOperator::new(diag(1.0, 2.0, 3.0)).unwrap());
        assert_eq!(rep.bound, 2);
    }

    #[test]
    fn singular_matrices_are_rejected() {
        assert!(matches!(
            MonodromyOperator::new(diag(1.0, 1.0, 0.0)),
            Err(LinalgError::Singular { .. })
        ));
    }
}
