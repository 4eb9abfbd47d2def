//! Stability laboratory.
//!
//! Four instruments, all operating on the production steppers rather than on
//! idealized recurrences:
//!
//! * [`boundary_locus`] draws approximate stability regions by marching the
//!   scalar test equation `y' = ky` at unit step along rays `k = 0.3 + r e^{iθ}`
//!   and bisecting each ray for the outermost radius the march survives,
//! * [`model_ode_step_matrix`] is the closed-form 3-term companion matrix of
//!   an AB step on the scalar model problem, with its Gram eigenvalues in
//!   closed form,
//! * [`build_step_matrix`] differentiates an arbitrary one-step advance map
//!   by forward differences to produce the step matrix `G_ε`, whose
//!   [`spectral_radius`] decides stability of a full discretization,
//! * [`max_stable_dt`] bisects a step size bracket against the criterion
//!   `ρ(G_ε(dt)) ≤ 1` to locate the largest stable step.

use crate::steppers::{ab_step, rk_step, History, RkKind, SchemeState, StepError, StepperSpec};
use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, Matrix3};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StabilityError {
    #[error("eigensolve failed")]
    EigensolveFailed,
    #[error("matrix must be square and nonempty")]
    BadMatrix,
    #[error("non-finite entries in step-matrix column {col}")]
    NonFiniteColumn { col: usize },
    #[error("advance returned length {got}, stability vector has length {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid bracket ({lo}, {hi})")]
    BadBracket { lo: f64, hi: f64 },
    #[error("bracket ({lo}, {hi}) does not straddle the stability boundary: {detail}")]
    BracketDoesNotStraddle { lo: f64, hi: f64, detail: String },
    #[error(transparent)]
    Step(#[from] StepError),
}

/// Default forward-difference perturbation for [`build_step_matrix`].
pub const DEFAULT_EPSILON: f64 = 1e-7;
/// Round-off slack above 1 allowed in the spectral-radius stability test.
pub const RHO_SLACK: f64 = 1e-9;
/// Step-size resolution at which [`max_stable_dt`] stops bisecting.
pub const DT_RESOLUTION: f64 = 1e-4;

// ---------------------------------------------------------------------------
// Boundary-locus stability regions
// ---------------------------------------------------------------------------

/// Number of rays in a [`StabilityRegion`].
pub const LOCUS_THETAS: usize = 500;
/// Real offset of the ray origin: `k = offset + r e^{iθ}`.
pub const LOCUS_OFFSET: f64 = 0.3;
/// Radius tolerance of the per-ray bisection.
pub const LOCUS_TOL: f64 = 1e-12;
/// Steps in a trial march.
const MARCH_STEPS: usize = 100;
/// A march is declared unstable as soon as `|y|` exceeds this cap.
const MARCH_CAP: f64 = 2.0;
/// Outer radius and sample count of the coarse downward scan.
const SCAN_R_HI: f64 = 8.0;
const SCAN_SAMPLES: usize = 256;

/// Approximate stability region of one stepper: for each of the 500 ray
/// angles, the outermost radius whose trial march stays bounded.
///
/// When built with `normalize = true`, `r_max` is divided by
/// `evals_per_step` so regions of schemes with different per-step cost can
/// be compared per RHS evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRegion {
    pub offset: f64,
    pub thetas: Vec<f64>,
    pub r_max: Vec<f64>,
    pub evals_per_step: usize,
    pub normalized: bool,
}

impl StabilityRegion {
    /// Boundary points `z = offset + r e^{iθ}` as `(re, im)` pairs.
    pub fn boundary_points(&self) -> Vec<(f64, f64)> {
        self.thetas
            .iter()
            .zip(&self.r_max)
            .map(|(&th, &r)| (self.offset + r * th.cos(), r * th.sin()))
            .collect()
    }

    /// Ray radius at θ = π (the sample grid contains π exactly).
    pub fn radius_at_pi(&self) -> f64 {
        self.r_max[LOCUS_THETAS / 2]
    }

    /// How far the region reaches along the negative real axis: the largest
    /// `-Re z` over the boundary.
    pub fn negative_real_extent(&self) -> f64 {
        self.boundary_points()
            .iter()
            .map(|&(re, _)| -re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest imaginary part reached anywhere on the boundary. Regions may
    /// bulge above their imaginary-axis intercept, so this generally exceeds
    /// [`imaginary_axis_crossing`](Self::imaginary_axis_crossing).
    pub fn max_imaginary_extent(&self) -> f64 {
        self.boundary_points()
            .iter()
            .map(|&(_, im)| im)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Height at which the boundary crosses the imaginary axis in the upper
    /// half plane (linear interpolation between adjacent samples; the
    /// highest crossing if there are several). `None` if the boundary never
    /// crosses `Re z = 0`.
    pub fn imaginary_axis_crossing(&self) -> Option<f64> {
        let z = self.boundary_points();
        let mut best: Option<f64> = None;
        for i in 0..z.len() - 1 {
            // Dead rays collapse to the anchor; they are not boundary
            // points, and bridging them to a live neighbor would fabricate
            // a crossing where the region never reaches the axis.
            if self.r_max[i] == 0.0 || self.r_max[i + 1] == 0.0 {
                continue;
            }
            let (ar, ai) = z[i];
            let (br, bi) = z[i + 1];
            if ai <= 0.0 && bi <= 0.0 {
                continue;
            }
            if (ar <= 0.0) != (br <= 0.0) {
                let t = ar / (ar - br);
                let im = ai + t * (bi - ai);
                if im > 0.0 && best.map_or(true, |b| im > b) {
                    best = Some(im);
                }
            }
        }
        best
    }
}

fn modulus(y: &[f64]) -> f64 {
    y[0].hypot(y[1])
}

/// March `y' = ky` from `y(0) = 1` for 100 unit steps (complex `k` embedded
/// as a 2x2 rotation-scaling acting on `(Re y, Im y)`). Stable means `|y|`
/// never exceeds 2 during the march and shows no net growth at the end.
///
/// AB steppers spend their bootstrap inside the same 100-step budget, seeded
/// by the production protocol (RK of matching order, records at every
/// visited point).
fn march_is_stable(spec: StepperSpec, k_re: f64, k_im: f64) -> bool {
    let net_cap = 1.0 + RHO_SLACK;
    let mut rhs = |_t: f64, y: &[f64]| {
        vec![k_re * y[0] - k_im * y[1], k_im * y[0] + k_re * y[1]]
    };
    let mut y = vec![1.0, 0.0];
    match spec {
        StepperSpec::Rk3 | StepperSpec::Rk4 => {
            let kind = if spec == StepperSpec::Rk3 {
                RkKind::Rk3
            } else {
                RkKind::Rk4
            };
            for j in 0..MARCH_STEPS {
                match rk_step(&mut rhs, j as f64, &y, 1.0, kind) {
                    Ok(next) => y = next,
                    Err(_) => return false,
                }
                if !y.iter().all(|v| v.is_finite()) || modulus(&y) > MARCH_CAP {
                    return false;
                }
            }
            modulus(&y) <= net_cap
        }
        StepperSpec::Ab { order, history_len } => {
            let m = history_len;
            let kind = RkKind::for_order(order);
            let mut hist = History::new(m);
            hist.push(0.0, rhs(0.0, &y));
            let mut t = 0.0;
            for j in 0..m - 1 {
                // The record at the current point doubles as the k1 stage.
                let k1 = hist.values().last().unwrap().clone();
                match crate::steppers::rk_step_reusing_k1(&mut rhs, t, &y, 1.0, kind, &k1) {
                    Ok(next) => y = next,
                    Err(_) => return false,
                }
                t = (j + 1) as f64;
                if !y.iter().all(|v| v.is_finite()) || modulus(&y) > MARCH_CAP {
                    return false;
                }
                hist.push(t, rhs(t, &y));
            }
            let mut state = SchemeState {
                t,
                y,
                history: hist,
            };
            for _ in 0..MARCH_STEPS - (m - 1) {
                if ab_step(&mut rhs, &mut state, 1.0, spec).is_err() {
                    return false;
                }
                if !state.y.iter().all(|v| v.is_finite()) || modulus(&state.y) > MARCH_CAP {
                    return false;
                }
            }
            modulus(&state.y) <= net_cap
        }
    }
}

/// Outermost stable radius along the ray at angle `theta`, located by a
/// coarse downward scan from r = 8 followed by bisection to 1e-12. Returns 0
/// if no scanned radius is stable (rays pointing into the right half plane).
///
/// Rays are not globally monotone (small radii near θ = π sit at `k ≈ 0.3`,
/// which grows); the scan brackets the outermost stable-to-unstable
/// transition and the bisection resolves that single crossing.
pub fn locus_radius(spec: StepperSpec, theta: f64) -> f64 {
    let (ct, st) = (theta.cos(), theta.sin());
    let stable = |r: f64| march_is_stable(spec, LOCUS_OFFSET + r * ct, r * st);

    let mut lo = None;
    let mut hi = None;
    for i in (1..=SCAN_SAMPLES).rev() {
        let r = SCAN_R_HI * i as f64 / SCAN_SAMPLES as f64;
        if stable(r) {
            lo = Some(r);
            if i < SCAN_SAMPLES {
                hi = Some(SCAN_R_HI * (i + 1) as f64 / SCAN_SAMPLES as f64);
            }
            break;
        }
    }
    let Some(mut lo) = lo else { return 0.0 };
    let Some(mut hi) = hi else { return lo };
    while hi - lo > LOCUS_TOL {
        let mid = 0.5 * (lo + hi);
        if stable(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Trace the whole stability region of `spec`: 500 equally spaced ray
/// angles around the circle, one [`locus_radius`] search each.
pub fn boundary_locus(spec: StepperSpec, normalize: bool) -> StabilityRegion {
    let thetas: Vec<f64> = (0..LOCUS_THETAS)
        .map(|i| 2.0 * std::f64::consts::PI * i as f64 / LOCUS_THETAS as f64)
        .collect();
    let divisor = spec.evals_per_step() as f64;
    let r_max: Vec<f64> = thetas
        .iter()
        .map(|&th| {
            let r = locus_radius(spec, th);
            if normalize {
                r / divisor
            } else {
                r
            }
        })
        .collect();
    StabilityRegion {
        offset: LOCUS_OFFSET,
        thetas,
        r_max,
        evals_per_step: spec.evals_per_step(),
        normalized: normalize,
    }
}

// ---------------------------------------------------------------------------
// Model-ODE companion matrix
// ---------------------------------------------------------------------------

/// Companion step matrix of a 3-term AB step on the scalar model problem
/// `y' = -y` with step `beta`, acting on the state history
/// `(y_n, y_{n-1}, y_{n-2})`. `alpha` is ordered newest-first.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOdeStepMatrix {
    pub beta: f64,
    pub alpha: [f64; 3],
    pub g: Matrix3<f64>,
}

pub fn model_ode_step_matrix(beta: f64, alpha: [f64; 3]) -> ModelOdeStepMatrix {
    let [a1, a2, a3] = alpha;
    #[rustfmt::skip]
    let g = Matrix3::new(
        1.0 - beta * a1, -beta * a2, -beta * a3,
        1.0,             0.0,        0.0,
        0.0,             1.0,        0.0,
    );
    ModelOdeStepMatrix { beta, alpha, g }
}

impl ModelOdeStepMatrix {
    /// Eigenvalues of `GᵀG` in closed form: `1` and
    /// `(C ± sqrt(C² - 4 α₃² β²)) / 2` with `C = -2 α₁ β + 2 + β² ‖α‖₂²`.
    pub fn gram_eigenvalues(&self) -> [f64; 3] {
        let [a1, a2, a3] = self.alpha;
        let b = self.beta;
        let norm2 = a1 * a1 + a2 * a2 + a3 * a3;
        let c = -2.0 * a1 * b + 2.0 + b * b * norm2;
        // Gram matrices are PSD, so the discriminant is nonnegative up to
        // round-off; clamp to keep the square root real.
        let disc = (c * c - 4.0 * a3 * a3 * b * b).max(0.0).sqrt();
        [1.0, 0.5 * (c + disc), 0.5 * (c - disc)]
    }
}

// ---------------------------------------------------------------------------
// Finite-difference step matrices
// ---------------------------------------------------------------------------

/// Forward-difference step matrix `G_ε` of a one-step advance map, with the
/// step size and perturbation recorded and a human-readable name per
/// stability-vector slot.
#[derive(Debug, Clone, PartialEq)]
pub struct StepMatrix {
    pub g: DMatrix<f64>,
    pub dt: f64,
    pub epsilon: f64,
    pub layout: Vec<String>,
}

/// Differentiate `advance` around `base`: column `j` of `G_ε` is
/// `(advance(φ + ε e_j) - advance(φ)) / ε`.
///
/// `advance` must be deterministic; columns are independent, so any
/// evaluation order (including a concurrent one) yields the same matrix.
/// The base state is the caller's choice of reference solution.
pub fn build_step_matrix<F>(
    advance: &mut F,
    base: &[f64],
    dt: f64,
    epsilon: f64,
) -> Result<StepMatrix, StabilityError>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>, StepError>,
{
    let d = base.len();
    if d == 0 || !(epsilon > 0.0) {
        return Err(StabilityError::BadMatrix);
    }
    let f0 = advance(base)?;
    if f0.len() != d {
        return Err(StabilityError::DimensionMismatch {
            expected: d,
            got: f0.len(),
        });
    }
    let mut g = DMatrix::zeros(d, d);
    let mut phi = base.to_vec();
    for j in 0..d {
        phi[j] = base[j] + epsilon;
        let fj = advance(&phi)?;
        if fj.len() != d {
            return Err(StabilityError::DimensionMismatch {
                expected: d,
                got: fj.len(),
            });
        }
        phi[j] = base[j];
        for i in 0..d {
            let entry = (fj[i] - f0[i]) / epsilon;
            if !entry.is_finite() {
                return Err(StabilityError::NonFiniteColumn { col: j });
            }
            g[(i, j)] = entry;
        }
    }
    let layout = (0..d).map(|j| format!("phi[{j}]")).collect();
    Ok(StepMatrix {
        g,
        dt,
        epsilon,
        layout,
    })
}

impl StepMatrix {
    /// Replace the default `phi[j]` slot names (e.g. with
    /// [`ab_stability_layout`] output).
    pub fn with_layout(mut self, layout: Vec<String>) -> Self {
        assert_eq!(layout.len(), self.g.nrows(), "layout length must match dimension");
        self.layout = layout;
        self
    }
}

/// Length of the AB stability vector: the state plus the `history_len - 1`
/// retained past RHS records. The RHS at the current point is recomputed
/// from the state each step, so it is not a free slot.
pub fn ab_stability_dim(dim: usize, history_len: usize) -> usize {
    dim * history_len
}

/// Slot names for the AB stability vector: `y[i]`, then past RHS records
/// newest-first (`f[t-1dt][i]`, `f[t-2dt][i]`, ...).
pub fn ab_stability_layout(dim: usize, history_len: usize) -> Vec<String> {
    let mut names: Vec<String> = (0..dim).map(|i| format!("y[{i}]")).collect();
    for lag in 1..history_len {
        for i in 0..dim {
            names.push(format!("f[t-{lag}dt][{i}]"));
        }
    }
    names
}

/// One AB step as a map on the stability vector
/// `[y, f(t-dt), ..., f(t-(m-1)dt)]` (uniform spacing `dt`, blocks of `dim`,
/// past records newest-first).
///
/// The map evaluates the RHS at the current point from `y`, takes one
/// production [`ab_step`], and returns the advanced vector in the same
/// layout. Feeding it to [`build_step_matrix`] yields the `G_ε` whose
/// spectral radius decides stability of the discretization at step `dt`.
pub fn ab_stability_advance<F>(
    rhs: &mut F,
    dim: usize,
    spec: StepperSpec,
    dt: f64,
    phi: &[f64],
) -> Result<Vec<f64>, StepError>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    let StepperSpec::Ab { order: _, history_len: m } = spec else {
        panic!("ab_stability_advance requires an AB spec");
    };
    assert_eq!(phi.len(), dim * m, "stability vector length mismatch");
    let y = phi[..dim].to_vec();
    let mut hist = History::new(m);
    for j in (1..m).rev() {
        hist.push(-(j as f64) * dt, phi[dim * j..dim * (j + 1)].to_vec());
    }
    hist.push(0.0, rhs(0.0, &y));
    let mut state = SchemeState {
        t: 0.0,
        y,
        history: hist,
    };
    ab_step(rhs, &mut state, dt, spec)?;
    // New vector in the frame of t + dt: the record ab_step just pushed is
    // the next step's current-point value, recomputed there, so it is
    // dropped; the remaining records shift one lag older.
    let vals = state.history.values();
    let mut out = state.y;
    for j in (0..m - 1).rev() {
        out.extend_from_slice(&vals[j]);
    }
    Ok(out)
}

/// Spectral radius by dense real Schur decomposition (suitable for the
/// toolkit's matrix sizes; a bounded iteration budget guards against
/// non-convergence).
pub fn spectral_radius(g: &DMatrix<f64>) -> Result<f64, StabilityError> {
    if g.nrows() == 0 || g.nrows() != g.ncols() {
        return Err(StabilityError::BadMatrix);
    }
    if g.iter().any(|x| !x.is_finite()) {
        return Err(StabilityError::BadMatrix);
    }
    let schur = Schur::try_new(g.clone(), 1e-12, 1_000_000)
        .ok_or(StabilityError::EigensolveFailed)?;
    Ok(schur
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

// ---------------------------------------------------------------------------
// Maximum stable step search
// ---------------------------------------------------------------------------

/// Result of [`max_stable_dt`]: the largest step observed stable, the
/// bisection count, and the spectral radius measured there.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxDtResult {
    pub dt_max: f64,
    pub iterations: usize,
    pub rho_at_dt_max: f64,
}

/// Bisect `bracket` for the largest `dt` with `rho_at(dt) ≤ 1 + RHO_SLACK`,
/// to a resolution of `1e-4`.
///
/// `rho_at` is typically `spectral_radius(build_step_matrix(...))` of the
/// problem's one-step advance at that `dt`. The bracket must straddle the
/// boundary: stable at `lo`, unstable at `hi`. The spectral radius is
/// assumed to cross the threshold once inside the bracket.
pub fn max_stable_dt<F>(mut rho_at: F, bracket: (f64, f64)) -> Result<MaxDtResult, StabilityError>
where
    F: FnMut(f64) -> Result<f64, StabilityError>,
{
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(StabilityError::BadBracket { lo, hi });
    }
    let threshold = 1.0 + RHO_SLACK;
    let mut rho_lo = rho_at(lo)?;
    if rho_lo > threshold {
        return Err(StabilityError::BracketDoesNotStraddle {
            lo,
            hi,
            detail: format!("rho({lo}) = {rho_lo} already exceeds 1"),
        });
    }
    let rho_hi = rho_at(hi)?;
    if rho_hi <= threshold {
        return Err(StabilityError::BracketDoesNotStraddle {
            lo,
            hi,
            detail: format!("rho({hi}) = {rho_hi} is still stable"),
        });
    }
    let mut iterations = 0;
    while hi - lo > DT_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        let rho_mid = rho_at(mid)?;
        iterations += 1;
        if rho_mid <= threshold {
            lo = mid;
            rho_lo = rho_mid;
        } else {
            hi = mid;
        }
    }
    Ok(MaxDtResult {
        dt_max: lo,
        iterations,
        rho_at_dt_max: rho_lo,
    })
}

// ---------------------------------------------------------------------------
// Stability-ratio arithmetic
// ---------------------------------------------------------------------------

/// Ratios summarizing a measured maximum step `dt` against the RK4 and
/// single-rate AB baselines: `r_rk4 = dt/dt_rk4`, `r_srab = dt/dt_srab`, and
/// the multi-rate efficiency `r_srab / sr` (1.0 means the multi-rate scheme
/// recovered the full factor-SR stability gain; report as a percentage by
/// scaling with 100).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityRatios {
    pub r_rk4: f64,
    pub r_srab: f64,
    pub efficiency: f64,
}

pub fn stability_ratios(dt: f64, dt_rk4: f64, dt_srab: f64, sr: usize) -> StabilityRatios {
    assert!(
        dt > 0.0 && dt_rk4 > 0.0 && dt_srab > 0.0 && sr >= 1,
        "stability_ratios requires positive inputs"
    );
    let r_srab = dt / dt_srab;
    StabilityRatios {
        r_rk4: dt / dt_rk4,
        r_srab,
        efficiency: r_srab / sr as f64,
    }
}
