//! Numerical integration of the singular equation along paths in the
//! punctured disc: analytic continuation of solutions, monodromy matrices
//! and branching probes, sectorial growth fits, the associated linear map,
//! and residual checks on sampled solution graphs.
//!
//! The integration state is `(z, u)` with `u = w z'`; near `w = 0` this is
//! the natural scaling of the reduced system and conditions the problem far
//! better than `(z, z')`. Endpoints are converted back to `(z, z')`.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::ode::NonminimalOde;
use crate::series::SeriesError;

/// Verdict threshold for monodromy triviality; deliberately loose relative
/// to the integration tolerances to absorb accumulated drift.
pub const MONODROMY_TRIVIAL_TOL: f64 = 1e-6;

/// Cross-window slope spread allowed for a `Moderate` growth verdict.
pub const SLOPE_STABILITY_TOL: f64 = 0.1;

/// RMS log-log fit residual allowed for a `Moderate` growth verdict.
pub const FIT_RESIDUAL_TOL: f64 = 0.1;

#[derive(Debug, Error)]
pub enum NumintError {
    #[error("equation is not linear: A, C, D, F must be numerically zero")]
    NotLinear,
    #[error("step size underflow at path parameter t = {t:.6}")]
    StepUnderflow { t: f64 },
    #[error("state became non-finite at path parameter t = {t:.6}")]
    NonFinite { t: f64 },
    #[error("path approaches the singularity: clearance {clearance:.3e} < required {required:.3e}")]
    PathTooClose { clearance: f64, required: f64 },
    #[error("sample lies at the singular point w = 0")]
    SampleAtOrigin,
    #[error("psi_1 vanishes numerically at w = {at}")]
    Psi1Vanishes { at: C64 },
    #[error("transported fundamental system is numerically singular (|det| = {det:.3e})")]
    DegenerateFundamentalSystem { det: f64 },
    #[error("polyline path needs at least two points")]
    EmptyPath,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Adaptive controller parameters for the embedded Runge–Kutta integrator.
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum arc-length per step; `None` selects path length / 64.
    pub max_step: Option<f64>,
    /// Paths are rejected when they come closer to `w = 0` than this.
    pub min_clearance: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { abs_tol: 1e-10, rel_tol: 1e-10, max_step: None, min_clearance: 1e-6 }
    }
}

/// Geometric shape of an integration path, parametrized over `t in [0, 1]`.
#[derive(Debug, Clone)]
pub enum PathKind {
    /// `w(t) = radius * exp(i (base_angle + 2 pi turns t))`.
    Circle { radius: f64, base_angle: f64, turns: i32 },
    Segment { start: C64, end: C64 },
    Polyline(Vec<C64>),
}

#[derive(Debug, Clone)]
pub struct PathSpec {
    pub kind: PathKind,
    pub control: StepControl,
}

impl PathSpec {
    pub fn circle(radius: f64, base_angle: f64, turns: i32) -> Self {
        PathSpec { kind: PathKind::Circle { radius, base_angle, turns }, control: StepControl::default() }
    }

    pub fn segment(start: C64, end: C64) -> Self {
        PathSpec { kind: PathKind::Segment { start, end }, control: StepControl::default() }
    }

    pub fn start(&self) -> Result<C64, NumintError> {
        match &self.kind {
            PathKind::Circle { radius, base_angle, .. } => Ok(C64::from_polar(*radius, *base_angle)),
            PathKind::Segment { start, .. } => Ok(*start),
            PathKind::Polyline(pts) => pts.first().copied().ok_or(NumintError::EmptyPath),
        }
    }

    /// Minimum distance of the path to the origin.
    pub fn clearance(&self) -> f64 {
        match &self.kind {
            PathKind::Circle { radius, .. } => radius.abs(),
            PathKind::Segment { start, end } => segment_clearance(*start, *end),
            PathKind::Polyline(pts) => pts
                .windows(2)
                .map(|p| segment_clearance(p[0], p[1]))
                .fold(f64::INFINITY, f64::min),
        }
    }

    fn arc_length(&self) -> f64 {
        match &self.kind {
            PathKind::Circle { radius, turns, .. } => (2.0 * std::f64::consts::PI * radius * *turns as f64).abs(),
            PathKind::Segment { start, end } => (end - start).norm(),
            PathKind::Polyline(pts) => pts.windows(2).map(|p| (p[1] - p[0]).norm()).sum(),
        }
    }

    /// Position and velocity at parameter `t`.
    fn at(&self, t: f64) -> (C64, C64) {
        match &self.kind {
            PathKind::Circle { radius, base_angle, turns } => {
                let omega = 2.0 * std::f64::consts::PI * *turns as f64;
                let w = C64::from_polar(*radius, base_angle + omega * t);
                (w, C64::new(0.0, omega) * w)
            }
            PathKind::Segment { start, end } => (start + (end - start) * t, end - start),
            PathKind::Polyline(pts) => {
                // constant-speed parametrization over the pieces
                let total: f64 = pts.windows(2).map(|p| (p[1] - p[0]).norm()).sum();
                let mut s = t.clamp(0.0, 1.0) * total;
                for p in pts.windows(2) {
                    let len = (p[1] - p[0]).norm();
                    if s <= len || len == 0.0 {
                        let frac = if len > 0.0 { s / len } else { 0.0 };
                        return (p[0] + (p[1] - p[0]) * frac, (p[1] - p[0]) * (total / len.max(1e-300)));
                    }
                    s -= len;
                }
                let last = *pts.last().expect("nonempty");
                (last, C64::new(0.0, 0.0))
            }
        }
    }
}

fn segment_clearance(a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return a.norm();
    }
    // projection of the origin onto the segment
    let t = (-(a.re * d.re + a.im * d.im) / len2).clamp(0.0, 1.0);
    (a + d * t).norm()
}

/// Terminal state of a path integration.
#[derive(Debug, Clone, Copy)]
pub struct PathEndpoint {
    pub w: C64,
    pub z: C64,
    pub dz: C64,
    /// Accumulated local error estimates.
    pub err_estimate: f64,
    /// Any coefficient evaluation left the trusted radius along the way.
    pub radius_warning: bool,
    pub steps: usize,
}

struct Rhs<'a> {
    ode: &'a NonminimalOde,
    radius_warning: std::cell::Cell<bool>,
}

impl<'a> Rhs<'a> {
    fn new(ode: &'a NonminimalOde) -> Self {
        Rhs { ode, radius_warning: std::cell::Cell::new(false) }
    }

    /// d(z, u)/dw for u = w z'.
    fn eval(&self, w: C64, y: [C64; 2]) -> Result<[C64; 2], NumintError> {
        let [z, u] = y;
        let mut coeff = [C64::default(); 6];
        for (slot, (_, s)) in coeff.iter_mut().zip(self.ode.coefficients()) {
            let e = s.eval(w)?;
            if e.radius_warning {
                self.radius_warning.set(true);
            }
            *slot = e.value;
        }
        let [a, b, c, d, e, f] = coeff;
        let m = self.ode.m as i32;
        let wm = w.powi(m);
        let w2m1 = w.powi(2 * m - 1);
        let cubic = ((c * z + d) * z + e) * z + f;
        let du = u / w + (a * z + b) * u / wm + cubic / w2m1;
        Ok([u / w, du])
    }
}

// Dormand–Prince 5(4) tableau.
const DP_C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Analytic continuation of a solution along a path. `init` is `(z, z')` at
/// the path start; the result carries `(z, z')` at the path end.
pub fn integrate_path(ode: &NonminimalOde, init: (C64, C64), path: &PathSpec) -> Result<PathEndpoint, NumintError> {
    let control = path.control;
    let clearance = path.clearance();
    if clearance < control.min_clearance {
        return Err(NumintError::PathTooClose { clearance, required: control.min_clearance });
    }
    let w0 = path.start()?;
    let rhs = Rhs::new(ode);
    let mut y = [init.0, w0 * init.1];

    let arc = path.arc_length().max(1e-300);
    // default arc-length cap: radius/64 on loops, length/64 on segments
    let default_step = match &path.kind {
        PathKind::Circle { radius, .. } => radius.abs() / 64.0,
        _ => arc / 64.0,
    };
    let max_h = control.max_step.unwrap_or(default_step) / arc; // in t-units

    let mut t = 0.0f64;
    let mut h = max_h;
    let mut err_accum = 0.0f64;
    let mut steps = 0usize;
    let f_at = |t: f64, y: [C64; 2]| -> Result<[C64; 2], NumintError> {
        let (w, wdot) = path.at(t);
        let d = rhs.eval(w, y)?;
        Ok([d[0] * wdot, d[1] * wdot])
    };

    while t < 1.0 {
        if h < 1e-13 {
            return Err(NumintError::StepUnderflow { t });
        }
        h = h.min(1.0 - t);
        let mut k = [[C64::default(); 2]; 7];
        k[0] = f_at(t, y)?;
        for s in 0..6 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s + 1) {
                let a = DP_A[s][j];
                if a != 0.0 {
                    ys[0] += kj[0] * (a * h);
                    ys[1] += kj[1] * (a * h);
                }
            }
            k[s + 1] = f_at(t + DP_C[s] * h, ys)?;
        }
        let mut y5 = y;
        let mut err_vec = [C64::default(); 2];
        for (j, kj) in k.iter().enumerate() {
            if DP_B5[j] != 0.0 {
                y5[0] += kj[0] * (DP_B5[j] * h);
                y5[1] += kj[1] * (DP_B5[j] * h);
            }
            if DP_ERR[j] != 0.0 {
                err_vec[0] += kj[0] * (DP_ERR[j] * h);
                err_vec[1] += kj[1] * (DP_ERR[j] * h);
            }
        }
        if !(y5[0].is_finite() && y5[1].is_finite()) {
            return Err(NumintError::NonFinite { t });
        }
        // weighted RMS error norm against abs/rel tolerances
        let mut ratio: f64 = 0.0;
        for i in 0..2 {
            let scale = control.abs_tol + control.rel_tol * y[i].norm().max(y5[i].norm());
            ratio = ratio.max(err_vec[i].norm() / scale);
        }
        if ratio <= 1.0 {
            t += h;
            y = y5;
            err_accum += err_vec[0].norm() + err_vec[1].norm();
            steps += 1;
        }
        let factor = if ratio > 0.0 { 0.9 * ratio.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
        h = h.min(max_h);
        if steps > 2_000_000 {
            return Err(NumintError::StepUnderflow { t });
        }
    }

    let (w_end, _) = path.at(1.0);
    Ok(PathEndpoint {
        w: w_end,
        z: y[0],
        dz: y[1] / w_end,
        err_estimate: err_accum,
        radius_warning: rhs.radius_warning.get(),
        steps,
    })
}

/// 2x2 complex matrix in row-major order.
pub type Matrix2 = [[C64; 2]; 2];

fn mat2_eigenvalues(m: &Matrix2) -> (C64, C64) {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr - det.scale(4.0)).sqrt();
    ((tr + disc) / 2.0, (tr - disc) / 2.0)
}

fn mat2_det(m: &Matrix2) -> C64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Outcome of a monodromy computation around `w = 0`.
#[derive(Debug, Clone)]
pub struct MonodromyReport {
    /// Fundamental-basis monodromy matrix in the `(z, z')` basis at the
    /// basepoint; present in the linear case only.
    pub matrix: Option<Matrix2>,
    pub eigenvalues: Option<(C64, C64)>,
    /// Start-to-end state distance of a single transported solution
    /// (general-case probe).
    pub probe_deviation: Option<f64>,
    pub trivial: bool,
    pub tol: f64,
    pub radius_warning: bool,
    pub ode_fingerprint: u64,
}

impl MonodromyReport {
    #[cfg(test)]
    pub(crate) fn synthetic(ode_fingerprint: u64, trivial: bool) -> Self {
        MonodromyReport {
            matrix: None,
            eigenvalues: None,
            probe_deviation: Some(if trivial { 0.0 } else { 1.0 }),
            trivial,
            tol: MONODROMY_TRIVIAL_TOL,
            radius_warning: false,
            ode_fingerprint,
        }
    }
}

/// Monodromy matrix of a linear equation: transports the fundamental basis
/// `(z, z') = (1, 0)` and `(0, 1)` around the loop and expresses the result
/// in the initial basis. The verdict is `trivial` when `||M - I|| < 1e-6`.
pub fn monodromy_linear(
    ode: &NonminimalOde,
    radius: f64,
    base_angle: f64,
    turns: i32,
    control: StepControl,
) -> Result<MonodromyReport, NumintError> {
    if !ode.is_linear(crate::series::DEFAULT_ORD_TOL) {
        return Err(NumintError::NotLinear);
    }
    let path = PathSpec { kind: PathKind::Circle { radius, base_angle, turns }, control };
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let e1 = integrate_path(ode, (one, zero), &path)?;
    let e2 = integrate_path(ode, (zero, one), &path)?;
    let matrix: Matrix2 = [[e1.z, e2.z], [e1.dz, e2.dz]];
    let eigenvalues = mat2_eigenvalues(&matrix);
    let det = mat2_det(&matrix).norm();
    if det < 1e-8 {
        return Err(NumintError::DegenerateFundamentalSystem { det });
    }
    let dev = ((matrix[0][0] - one).norm_sqr()
        + matrix[0][1].norm_sqr()
        + matrix[1][0].norm_sqr()
        + (matrix[1][1] - one).norm_sqr())
    .sqrt();
    Ok(MonodromyReport {
        matrix: Some(matrix),
        eigenvalues: Some(eigenvalues),
        probe_deviation: None,
        trivial: dev < MONODROMY_TRIVIAL_TOL,
        tol: MONODROMY_TRIVIAL_TOL,
        radius_warning: e1.radius_warning || e2.radius_warning,
        ode_fingerprint: ode.fingerprint(),
    })
}

/// Transports one solution around the loop and reports the start-to-end
/// state distance. A nontrivial probe certifies branching; a trivial probe
/// on finitely many initial conditions is evidence, not proof.
pub fn monodromy_probe(
    ode: &NonminimalOde,
    init: (C64, C64),
    radius: f64,
    base_angle: f64,
    turns: i32,
    control: StepControl,
) -> Result<MonodromyReport, NumintError> {
    let path = PathSpec { kind: PathKind::Circle { radius, base_angle, turns }, control };
    let end = integrate_path(ode, init, &path)?;
    let dev = ((end.z - init.0).norm_sqr() + (end.dz - init.1).norm_sqr()).sqrt();
    let state_norm = (init.0.norm_sqr() + init.1.norm_sqr()).sqrt();
    Ok(MonodromyReport {
        matrix: None,
        eigenvalues: None,
        probe_deviation: Some(dev),
        trivial: dev / (1.0 + state_norm) < MONODROMY_TRIVIAL_TOL,
        tol: MONODROMY_TRIVIAL_TOL,
        radius_warning: end.radius_warning,
        ode_fingerprint: ode.fingerprint(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthVerdict {
    /// Power-law sectorial bound `||y|| <= C |w|^b` fits the samples.
    Moderate,
    /// Log-log linearity fails (or integration broke down): the solution
    /// grows faster than any power along the ray.
    Irregular,
}

/// Sectorial growth fit along a ray toward the singularity.
#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub theta: f64,
    /// Fitted exponent `b` in `||y|| ~ C |w|^b`; `None` when too few samples
    /// survived to fit.
    pub exponent: Option<f64>,
    pub fit_residual: f64,
    pub window_slopes: Vec<f64>,
    pub verdict: GrowthVerdict,
    /// Why sampling stopped before `r_min`, when it did.
    pub stopped_early: Option<String>,
    /// `(radius, log state norm)` samples actually collected.
    pub samples: Vec<(f64, f64)>,
    pub ode_fingerprint: u64,
}

/// Integrates from `|w| = r0` toward `r_min` along `w = t e^{i theta}` and
/// fits `log ||(z, w z')||` against `log (1/t)` on log-spaced windows.
/// Cross-window slope instability, a poor fit, or integrator breakdown all
/// yield an `Irregular` verdict; breakdown is reported, never silent.
pub fn growth_exponent(
    ode: &NonminimalOde,
    init: (C64, C64),
    theta: f64,
    r0: f64,
    r_min: f64,
    control: StepControl,
) -> Result<GrowthReport, NumintError> {
    assert!(r_min > 0.0 && r_min < r0, "need 0 < r_min < r0");
    let n = 12usize;
    let radii: Vec<f64> = (0..n).map(|k| r0 * (r_min / r0).powf(k as f64 / (n - 1) as f64)).collect();

    let dir = C64::from_polar(1.0, theta);
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut state = init;
    let mut stopped_early = None;

    let log_norm = |z: C64, dz: C64, w: C64| -> f64 {
        let u = w * dz;
        (z.norm_sqr() + u.norm_sqr()).sqrt().max(1e-300).ln()
    };
    samples.push((radii[0], log_norm(state.0, state.1, dir * radii[0])));

    for k in 1..n {
        let seg = PathSpec {
            kind: PathKind::Segment { start: dir * radii[k - 1], end: dir * radii[k] },
            control,
        };
        match integrate_path(ode, state, &seg) {
            Ok(end) => {
                state = (end.z, end.dz);
                let ln = log_norm(end.z, end.dz, end.w);
                samples.push((radii[k], ln));
                if ln > 500.0 {
                    stopped_early = Some(format!("state norm exceeded e^500 at |w| = {:.3e}", radii[k]));
                    break;
                }
            }
            Err(NumintError::StepUnderflow { .. }) => {
                stopped_early = Some(format!("step underflow between |w| = {:.3e} and {:.3e}", radii[k - 1], radii[k]));
                break;
            }
            Err(NumintError::NonFinite { .. }) => {
                stopped_early = Some(format!("state overflow between |w| = {:.3e} and {:.3e}", radii[k - 1], radii[k]));
                break;
            }
            Err(other) => return Err(other),
        }
    }

    // least-squares line of log||y|| against log(1/t); b = -slope
    let (exponent, fit_residual, window_slopes) = if samples.len() >= 3 {
        let pts: Vec<(f64, f64)> = samples.iter().map(|&(t, l)| ((1.0 / t).ln(), l)).collect();
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        let slope = (n * sxy - sx * sy) / denom;
        let intercept = (sy - slope * sx) / n;
        let rms = (pts.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum::<f64>() / n).sqrt();
        let slopes: Vec<f64> = pts
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        (Some(-slope), rms, slopes)
    } else {
        (None, f64::INFINITY, Vec::new())
    };

    let spread = match (window_slopes.iter().cloned().fold(f64::INFINITY, f64::min), window_slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max)) {
        (lo, hi) if lo.is_finite() && hi.is_finite() => hi - lo,
        _ => f64::INFINITY,
    };
    let verdict = if stopped_early.is_none()
        && exponent.is_some()
        && spread <= SLOPE_STABILITY_TOL
        && fit_residual <= FIT_RESIDUAL_TOL
    {
        GrowthVerdict::Moderate
    } else {
        GrowthVerdict::Irregular
    };

    Ok(GrowthReport {
        theta,
        exponent,
        fit_residual,
        window_slopes,
        verdict,
        stopped_early,
        samples,
        ode_fingerprint: ode.fingerprint(),
    })
}

/// The associated linear map of a linear equation, realized numerically:
/// `(z, w) -> (z / psi_1(w), psi_2(w) / psi_1(w))` where `psi_1, psi_2` are
/// the solutions transported from the given initial pairs at the basepoint.
/// Images of solution graphs are affine lines.
#[derive(Debug, Clone)]
pub struct LinearMapEvaluator<'a> {
    ode: &'a NonminimalOde,
    pub basepoint: C64,
    pub psi1_init: (C64, C64),
    pub psi2_init: (C64, C64),
    pub control: StepControl,
}

/// Builds the evaluator after checking linearity.
pub fn associated_map_linear<'a>(
    ode: &'a NonminimalOde,
    basepoint: C64,
    psi1_init: (C64, C64),
    psi2_init: (C64, C64),
    control: StepControl,
) -> Result<LinearMapEvaluator<'a>, NumintError> {
    if !ode.is_linear(crate::series::DEFAULT_ORD_TOL) {
        return Err(NumintError::NotLinear);
    }
    Ok(LinearMapEvaluator { ode, basepoint, psi1_init, psi2_init, control })
}

impl<'a> LinearMapEvaluator<'a> {
    /// `(psi_1(w), psi_2(w))` by continuation along the straight segment
    /// from the basepoint.
    pub fn fundamental_at(&self, w: C64) -> Result<(C64, C64), NumintError> {
        if (w - self.basepoint).norm() == 0.0 {
            return Ok((self.psi1_init.0, self.psi2_init.0));
        }
        let seg = PathSpec { kind: PathKind::Segment { start: self.basepoint, end: w }, control: self.control };
        let p1 = integrate_path(self.ode, self.psi1_init, &seg)?;
        let p2 = integrate_path(self.ode, self.psi2_init, &seg)?;
        Ok((p1.z, p2.z))
    }

    /// Image of the point `(z, w)` under the map.
    pub fn eval(&self, z: C64, w: C64) -> Result<(C64, C64), NumintError> {
        let (psi1, psi2) = self.fundamental_at(w)?;
        if psi1.norm() <= 1e-12 * (1.0 + psi2.norm()) {
            return Err(NumintError::Psi1Vanishes { at: w });
        }
        Ok((z / psi1, psi2 / psi1))
    }
}

/// Largest relative deviation of the points from the best complex affine
/// line `x = c0 + c1 s` with `(x, s)` the two image coordinates.
pub fn collinearity_residual(points: &[(C64, C64)]) -> f64 {
    assert!(points.len() >= 3, "need at least three points");
    // complex least squares for (c0, c1)
    let n = C64::new(points.len() as f64, 0.0);
    let ss: C64 = points.iter().map(|p| p.1).sum();
    let ssb: C64 = points.iter().map(|p| p.1 * p.1.conj()).sum();
    let sx: C64 = points.iter().map(|p| p.0).sum();
    let sxs: C64 = points.iter().map(|p| p.0 * p.1.conj()).sum();
    // normal equations: [n, ss; conj(ss), ssb] (c0, c1) = (sx, sxs)
    let det = n * ssb - ss * ss.conj();
    if det.norm() < 1e-250 {
        return f64::INFINITY;
    }
    let c0 = (sx * ssb - ss * sxs) / det;
    let c1 = (n * sxs - ss.conj() * sx) / det;
    let scale = 1.0 + points.iter().map(|p| p.0.norm().max(p.1.norm())).fold(0.0, f64::max);
    points
        .iter()
        .map(|p| (p.0 - c0 - c1 * p.1).norm() / scale)
        .fold(0.0, f64::max)
}

/// A solution graph sample with analytic derivatives.
#[derive(Debug, Clone, Copy)]
pub struct GraphSample {
    pub w: C64,
    pub z: C64,
    pub dz: C64,
    pub d2z: C64,
}

/// Maximum pointwise residual of the equation over the samples:
/// `|z'' - (A z + B) z' / w^m - (C z^3 + D z^2 + E z + F) / w^{2m}|`.
pub fn segre_residual(ode: &NonminimalOde, samples: &[GraphSample]) -> Result<f64, NumintError> {
    let m = ode.m as i32;
    let mut worst = 0.0f64;
    for s in samples {
        if s.w.norm_sqr() == 0.0 {
            return Err(NumintError::SampleAtOrigin);
        }
        let mut coeff = [C64::default(); 6];
        for (slot, (_, series)) in coeff.iter_mut().zip(ode.coefficients()) {
            *slot = series.eval(s.w)?.value;
        }
        let [a, b, c, d, e, f] = coeff;
        let cubic = ((c * s.z + d) * s.z + e) * s.z + f;
        let rhs = (a * s.z + b) * s.dz / s.w.powi(m) + cubic / s.w.powi(2 * m);
        worst = worst.max((s.d2z - rhs).norm());
    }
    Ok(worst)
}
