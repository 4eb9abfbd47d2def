//! Single-rate steppers: RK3 (Heun), classical RK4, and Adams-Bashforth of
//! order `n` with history length `m >= n`, bootstrapped by RK steps.
//!
//! All steppers work on a plain `&[f64]` state with the RHS supplied as a
//! closure `FnMut(t, y) -> Vec<f64>`, so callers can instrument evaluation
//! counts or capture environment state. RHS evaluation counts follow exact,
//! documented formulas and are returned by the driver.

use crate::coeffs::{ab_weights, CoeffsError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StepError {
    #[error("rhs blowup: non-finite right-hand side at t = {t}")]
    RhsBlowup { t: f64 },
    #[error("nonpositive step size dt = {dt}")]
    BadStep { dt: f64 },
    #[error("integration horizon too short: need at least {needed} steps of dt for bootstrap")]
    HorizonTooShort { needed: usize },
    #[error("history not warmed up: {have} of {need} entries")]
    ColdHistory { have: usize, need: usize },
    #[error(transparent)]
    Coeffs(#[from] CoeffsError),
}

/// Explicit Runge-Kutta variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RkKind {
    /// Heun's third-order method: stages at (0, 1/3, 2/3), weights (1/4, 0, 3/4).
    Rk3,
    /// The classical fourth-order method.
    Rk4,
}

impl RkKind {
    pub fn stages(self) -> usize {
        match self {
            RkKind::Rk3 => 3,
            RkKind::Rk4 => 4,
        }
    }

    /// RK scheme used to bootstrap an AB method of order `n`.
    pub fn for_order(n: usize) -> RkKind {
        if n >= 4 {
            RkKind::Rk4
        } else {
            RkKind::Rk3
        }
    }
}

/// Integrator selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepperSpec {
    Rk3,
    Rk4,
    /// Adams-Bashforth of order `order` using `history_len >= order` stored
    /// RHS values; `history_len > order` selects the extended-history
    /// (minimum-norm) family.
    Ab { order: usize, history_len: usize },
}

impl StepperSpec {
    pub fn ab(order: usize) -> Self {
        StepperSpec::Ab {
            order,
            history_len: order,
        }
    }

    /// Extended history with one extra node: AB34 for order 3, AB45 for 4.
    pub fn ab_extended(order: usize) -> Self {
        StepperSpec::Ab {
            order,
            history_len: order + 1,
        }
    }

    /// RHS evaluations per production step (the stability-region
    /// normalization constant).
    pub fn evals_per_step(&self) -> usize {
        match self {
            StepperSpec::Rk3 => 3,
            StepperSpec::Rk4 => 4,
            StepperSpec::Ab { .. } => 1,
        }
    }
}

fn check_finite(f: &[f64], t: f64) -> Result<(), StepError> {
    if f.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(StepError::RhsBlowup { t })
    }
}

fn axpy(y: &[f64], a: f64, x: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(yi, xi)| yi + a * xi).collect()
}

/// One explicit RK step. `k1` may be supplied when the caller already holds
/// `rhs(t, y)` (the bootstrap records it into the AB history anyway).
fn rk_step_impl<F>(
    rhs: &mut F,
    t: f64,
    y: &[f64],
    dt: f64,
    kind: RkKind,
    k1: Option<&[f64]>,
) -> Result<Vec<f64>, StepError>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    if !(dt > 0.0) {
        return Err(StepError::BadStep { dt });
    }
    let k1 = match k1 {
        Some(k) => k.to_vec(),
        None => rhs(t, y),
    };
    check_finite(&k1, t)?;
    match kind {
        RkKind::Rk3 => {
            let k2 = rhs(t + dt / 3.0, &axpy(y, dt / 3.0, &k1));
            check_finite(&k2, t)?;
            let k3 = rhs(t + 2.0 * dt / 3.0, &axpy(y, 2.0 * dt / 3.0, &k2));
            check_finite(&k3, t)?;
            Ok(y.iter()
                .zip(k1.iter().zip(&k3))
                .map(|(yi, (a, c))| yi + dt * (a / 4.0 + 3.0 * c / 4.0))
                .collect())
        }
        RkKind::Rk4 => {
            let k2 = rhs(t + dt / 2.0, &axpy(y, dt / 2.0, &k1));
            check_finite(&k2, t)?;
            let k3 = rhs(t + dt / 2.0, &axpy(y, dt / 2.0, &k2));
            check_finite(&k3, t)?;
            let k4 = rhs(t + dt, &axpy(y, dt, &k3));
            check_finite(&k4, t)?;
            Ok(y.iter()
                .enumerate()
                .map(|(i, yi)| yi + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect())
        }
    }
}

/// One explicit RK step of `kind` from `(t, y)`.
pub fn rk_step<F>(rhs: &mut F, t: f64, y: &[f64], dt: f64, kind: RkKind) -> Result<Vec<f64>, StepError>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    rk_step_impl(rhs, t, y, dt, kind, None)
}

/// Same as [`rk_step`] but reuses an already-computed `rhs(t, y)` as the
/// first stage (the MRAB bootstrap records it into both histories anyway).
pub(crate) fn rk_step_reusing_k1<F>(
    rhs: &mut F,
    t: f64,
    y: &[f64],
    dt: f64,
    kind: RkKind,
    k1: &[f64],
) -> Result<Vec<f64>, StepError>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    rk_step_impl(rhs, t, y, dt, kind, Some(k1))
}

/// Time-stamped RHS history ring, newest-last, bounded capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct History {
    capacity: usize,
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl History {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1);
        Self {
            capacity,
            times: Vec::with_capacity(capacity + 1),
            values: Vec::with_capacity(capacity + 1),
        }
    }

    /// Append `(t, f)`, dropping the oldest entry once full. Times must
    /// arrive strictly increasing.
    pub fn push(&mut self, t: f64, f: Vec<f64>) {
        if let Some(last) = self.times.last() {
            assert!(t > *last, "history times must be strictly increasing");
        }
        self.times.push(t);
        self.values.push(f);
        if self.times.len() > self.capacity {
            self.times.remove(0);
            self.values.remove(0);
        }
    }

    pub fn is_full(&self) -> bool {
        self.times.len() == self.capacity
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }
}

/// Evolving AB state: current `(t, y)` plus the RHS history ring.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeState {
    pub t: f64,
    pub y: Vec<f64>,
    pub history: History,
}

/// Populate the history ring for an AB run by taking `m - 1` RK steps of
/// size `dt` from `(t0, y0)` and recording `(t, rhs(t, y))` at every visited
/// point, `t0` included.
///
/// Cost contract: the `t0` record doubles as the first RK step's `k1` stage,
/// so the bootstrap spends exactly `stages*(m-1) + (m-1)` RHS evaluations
/// (the remaining `m-1` records are fresh).
pub fn ab_bootstrap<F>(
    rhs: &mut F,
    t0: f64,
    y0: &[f64],
    dt: f64,
    spec: StepperSpec,
) -> Result<SchemeState, StepError>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    let StepperSpec::Ab { order, history_len } = spec else {
        panic!("ab_bootstrap requires an AB spec");
    };
    if !(dt > 0.0) {
        return Err(StepError::BadStep { dt });
    }
    let kind = RkKind::for_order(order);
    let mut history = History::new(history_len);
    let mut t = t0;
    let mut y = y0.to_vec();
    let f0 = rhs(t, &y);
    check_finite(&f0, t)?;
    for j in 0..history_len - 1 {
        if j == 0 {
            // The t0 record doubles as this step's k1 stage (count contract).
            history.push(t, f0.clone());
            y = rk_step_impl(rhs, t, &y, dt, kind, Some(&f0))?;
        } else {
            let fj = rhs(t, &y);
            check_finite(&fj, t)?;
            history.push(t, fj);
            y = rk_step_impl(rhs, t, &y, dt, kind, None)?;
        }
        t = t0 + (j + 1) as f64 * dt;
    }
    if history.is_empty() {
        // m == 1 (e.g. forward Euler): no RK steps, just the t0 record.
        history.push(t, f0);
    } else {
        let fm = rhs(t, &y);
        check_finite(&fm, t)?;
        history.push(t, fm);
    }
    Ok(SchemeState { t, y, history })
}

/// One AB step of size `dt` from a warmed-up state. Weights are recomputed
/// from the actual stored history times, so non-uniform histories and a
/// shortened final step need no special casing. Evaluates the RHS once, at
/// the new point, and rotates it into the ring.
pub fn ab_step<F>(
    rhs: &mut F,
    state: &mut SchemeState,
    dt: f64,
    spec: StepperSpec,
) -> Result<(), StepError>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    let StepperSpec::Ab { order, history_len } = spec else {
        panic!("ab_step requires an AB spec");
    };
    if !state.history.is_full() {
        return Err(StepError::ColdHistory {
            have: state.history.len(),
            need: history_len,
        });
    }
    if !(dt > 0.0) {
        return Err(StepError::BadStep { dt });
    }
    let t = state.t;
    let w = ab_weights(state.history.times(), order, (t, t + dt))?;
    let dy = w.apply(state.history.values());
    for (yi, di) in state.y.iter_mut().zip(&dy) {
        *yi += di;
    }
    state.t = t + dt;
    let f = rhs(state.t, &state.y);
    check_finite(&f, state.t)?;
    state.history.push(state.t, f);
    Ok(())
}

/// Outcome of [`integrate_to`]: final state and the exact RHS evaluation count.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationResult {
    pub t: f64,
    pub y: Vec<f64>,
    pub evals: usize,
    pub steps: usize,
}

/// March from `(t0, y0)` to `t_end` with nominal step `dt`, shortening the
/// final step to land exactly on `t_end`.
///
/// Eval counts are exact by construction: RK spends `stages` per step; AB
/// spends `stages*(m-1) + (m-1)` in the bootstrap plus one per AB step.
pub fn integrate_to<F>(
    rhs: &mut F,
    y0: &[f64],
    t0: f64,
    t_end: f64,
    dt: f64,
    spec: StepperSpec,
) -> Result<IntegrationResult, StepError>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    if !(dt > 0.0) {
        return Err(StepError::BadStep { dt });
    }
    if t_end <= t0 {
        return Err(StepError::BadStep { dt: t_end - t0 });
    }
    let span = t_end - t0;
    // Number of whole steps of size dt that fit; final partial step if the
    // remainder is more than round-off.
    let ratio = span / dt;
    let mut n_full = ratio.floor() as usize;
    let mut rem = span - n_full as f64 * dt;
    if rem <= 1e-12 * dt.max(span) {
        rem = 0.0;
    } else if (dt - rem).abs() <= 1e-12 * dt.max(span) {
        n_full += 1;
        rem = 0.0;
    }

    let mut evals = 0usize;
    let mut counted = |t: f64, y: &[f64]| {
        evals += 1;
        rhs(t, y)
    };

    match spec {
        StepperSpec::Rk3 | StepperSpec::Rk4 => {
            let kind = if spec == StepperSpec::Rk3 { RkKind::Rk3 } else { RkKind::Rk4 };
            let mut y = y0.to_vec();
            let mut steps = 0usize;
            for j in 0..n_full {
                y = rk_step(&mut counted, t0 + j as f64 * dt, &y, dt, kind)?;
                steps += 1;
            }
            let mut t = t0 + n_full as f64 * dt;
            if rem > 0.0 {
                y = rk_step(&mut counted, t, &y, rem, kind)?;
                steps += 1;
                t = t_end;
            }
            drop(counted);
            Ok(IntegrationResult { t, y, evals, steps })
        }
        StepperSpec::Ab { history_len, .. } => {
            let boot_steps = history_len - 1;
            let total_steps = n_full + usize::from(rem > 0.0);
            if total_steps < boot_steps {
                return Err(StepError::HorizonTooShort { needed: boot_steps });
            }
            let mut state = ab_bootstrap(&mut counted, t0, y0, dt, spec)?;
            let mut steps = boot_steps;
            for j in boot_steps..n_full {
                // Step from the exact grid time to avoid accumulation drift.
                state.t = t0 + j as f64 * dt;
                ab_step(&mut counted, &mut state, dt, spec)?;
                steps += 1;
            }
            if rem > 0.0 {
                ab_step(&mut counted, &mut state, rem, spec)?;
                steps += 1;
                state.t = t_end;
            }
            drop(counted);
            Ok(IntegrationResult {
                t: state.t,
                y: state.y,
                evals,
                steps,
            })
        }
    }
}
