//! RHS-evaluation cost model comparing a single-rate RK4 run against a
//! multi-rate AB run on a two-grid problem.
//!
//! RK4 spends four RHS evaluations per point per step, on every point of
//! both grids, at its own stable step. The AB scheme spends one evaluation
//! per point per micro step on the fast grid and one per macro step on the
//! slow grid, but its stable macro step is only `r` times the RK4 step:
//!
//! ```text
//! N_rk4 = 4 (t / dt_rk4) (n_f + n_s)
//! N_ab  = (t / (dt_rk4 r)) (SR n_f + n_s)
//! ```
//!
//! The model's one empirical input is `r`, the measured stable-step ratio
//! of the AB scheme at the given step ratio. Everything else is arithmetic,
//! which is the point: speedups are decided by stability, not accuracy.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PerfError {
    #[error("performance model input rejected: {0}")]
    BadInput(String),
}

/// One evaluated scenario. `r_rk4` is the stable-step ratio
/// `dt_ab / dt_rk4` measured for the scheme at step ratio `sr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerfModelInput {
    pub n_f: usize,
    pub n_s: usize,
    pub sr: usize,
    pub r_rk4: f64,
    pub t: f64,
    pub dt_rk4: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerfModelResult {
    pub n_rhs_rk4: f64,
    pub n_rhs_ab: f64,
    pub speedup: f64,
    pub pct_reduction: f64,
}

/// Measured stable-step ratios `r(SR)` for the extended third-order scheme,
/// inputs to the published cost tables. The plateau at SR >= 5 is where the
/// fast grid stops being the binding stability constraint.
pub const AB34_STEP_RATIOS: [(usize, f64); 6] = [
    (1, 0.259),
    (2, 0.518),
    (3, 0.775),
    (4, 1.035),
    (5, 1.294),
    (6, 1.296),
];

/// Measured stable-step ratios `r(SR)` for the extended fourth-order scheme.
pub const AB45_STEP_RATIOS: [(usize, f64); 6] = [
    (1, 0.178),
    (2, 0.356),
    (3, 0.533),
    (4, 0.711),
    (5, 0.827),
    (6, 0.827),
];

fn validate(input: &PerfModelInput) -> Result<(), PerfError> {
    if input.n_f == 0 || input.n_s == 0 {
        return Err(PerfError::BadInput("grids must be non-empty".into()));
    }
    if input.sr == 0 {
        return Err(PerfError::BadInput("step ratio must be >= 1".into()));
    }
    if !(input.r_rk4 > 0.0 && input.r_rk4.is_finite()) {
        return Err(PerfError::BadInput(format!(
            "stable-step ratio {} must be positive",
            input.r_rk4
        )));
    }
    if !(input.t > 0.0) || !(input.dt_rk4 > 0.0) {
        return Err(PerfError::BadInput(
            "horizon and RK4 step must be positive".into(),
        ));
    }
    Ok(())
}

/// Evaluate the model for one scenario.
pub fn rhs_counts(input: &PerfModelInput) -> Result<PerfModelResult, PerfError> {
    validate(input)?;
    let steps_rk4 = input.t / input.dt_rk4;
    let work = (input.n_f + input.n_s) as f64;
    let n_rhs_rk4 = 4.0 * steps_rk4 * work;
    let work_ab = (input.sr * input.n_f + input.n_s) as f64;
    let n_rhs_ab = steps_rk4 / input.r_rk4 * work_ab;
    let speedup = n_rhs_rk4 / n_rhs_ab;
    Ok(PerfModelResult {
        n_rhs_rk4,
        n_rhs_ab,
        speedup,
        pct_reduction: 100.0 * (1.0 - n_rhs_ab / n_rhs_rk4),
    })
}

/// One row of [`speedup_table`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedupRow {
    pub sr: usize,
    pub r_rk4: f64,
    pub n_rhs_ab: f64,
    pub speedup: f64,
    pub pct_reduction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupTable {
    pub n_rhs_rk4: f64,
    pub rows: Vec<SpeedupRow>,
}

/// Evaluate a family of scenarios that share the problem (`n_f`, `n_s`,
/// `t`, `dt_rk4`) and differ only in `(sr, r_rk4)`. Mixed problems are
/// rejected: a table with varying grids would compare nothing.
pub fn speedup_table(inputs: &[PerfModelInput]) -> Result<SpeedupTable, PerfError> {
    let first = inputs
        .first()
        .ok_or_else(|| PerfError::BadInput("table needs at least one row".into()))?;
    for i in inputs {
        if (i.n_f, i.n_s) != (first.n_f, first.n_s) || i.t != first.t || i.dt_rk4 != first.dt_rk4 {
            return Err(PerfError::BadInput(
                "table rows must share n_f, n_s, t and dt_rk4".into(),
            ));
        }
    }
    let mut rows = Vec::with_capacity(inputs.len());
    let mut n_rhs_rk4 = 0.0;
    for i in inputs {
        let r = rhs_counts(i)?;
        n_rhs_rk4 = r.n_rhs_rk4;
        rows.push(SpeedupRow {
            sr: i.sr,
            r_rk4: i.r_rk4,
            n_rhs_ab: r.n_rhs_ab,
            speedup: r.speedup,
            pct_reduction: r.pct_reduction,
        });
    }
    Ok(SpeedupTable { n_rhs_rk4, rows })
}
