//! One-dimensional advection testbed: a diagonal-norm summation-by-parts
//! finite-difference operator, characteristic boundary penalties, an overset
//! two-grid channel, and a metric-based timestep calculator.
//!
//! The testbed exists to exercise the time integrators on something with a
//! realistic spectrum: boundary closures, interpolation penalties between
//! grids, and stiff penalty eigenvalues alongside the advective ones.

mod overset;
mod sbp;
mod timestep;

pub use overset::{overset_rhs, FringeMap, OversetPair1D};
pub use sbp::{sbp_derivative, SbpOperator};
pub use timestep::{compute_timestep, MetricPoint};

use thiserror::Error;

/// Penalty strength shared by every inflow and interface SAT. One half is
/// the smallest value that keeps the inflow energy estimate dissipative.
pub const SAT_SIGMA: f64 = 0.5;

/// Smallest grid the boundary closures fit on: four closure rows per side
/// plus one interior row.
pub const MIN_POINTS: usize = 9;

#[derive(Debug, Error)]
pub enum PdeError {
    #[error("grid needs at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("grid extent [{a}, {b}] is empty or reversed")]
    BadExtent { a: f64, b: f64 },
    #[error("state length {got} does not match the grid ({want})")]
    LengthMismatch { want: usize, got: usize },
    #[error("overset layout rejected: {0}")]
    BadLayout(String),
    #[error("overset channel requires a positive wave speed, got {0}")]
    BadWaveSpeed(f64),
    #[error("Jacobian must be positive, got {0}")]
    BadJacobian(f64),
    #[error("sound speed must be positive, got {0}")]
    BadSoundSpeed(f64),
    #[error("metric point {0} has mismatched direction counts")]
    BadMetricShape(usize),
    #[error("metric point {0} has a degenerate metric (zero denominator)")]
    DegenerateMetric(usize),
    #[error("timestep needs at least one metric point")]
    NoPoints,
}

/// How a [`Grid1D`] terminates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Wrap-around indexing; no closures, no penalties.
    Periodic,
    /// Finite line with SBP closures; the inflow end takes a characteristic
    /// SAT penalty, the outflow end is left free.
    SatCharacteristic,
}

/// Uniform 1-D grid. Periodic grids omit the duplicate endpoint, so `x`
/// holds `n` distinct points and `dx = (b - a) / n`; line grids include both
/// ends and `dx = (b - a) / (n - 1)`.
#[derive(Debug, Clone)]
pub struct Grid1D {
    pub x: Vec<f64>,
    pub dx: f64,
    pub boundary: BoundaryKind,
}

impl Grid1D {
    pub fn periodic(a: f64, b: f64, n: usize) -> Result<Self, PdeError> {
        Self::build(a, b, n, BoundaryKind::Periodic)
    }

    pub fn line(a: f64, b: f64, n: usize) -> Result<Self, PdeError> {
        Self::build(a, b, n, BoundaryKind::SatCharacteristic)
    }

    fn build(a: f64, b: f64, n: usize, boundary: BoundaryKind) -> Result<Self, PdeError> {
        if n < MIN_POINTS {
            return Err(PdeError::TooFewPoints {
                min: MIN_POINTS,
                got: n,
            });
        }
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(PdeError::BadExtent { a, b });
        }
        let dx = match boundary {
            BoundaryKind::Periodic => (b - a) / n as f64,
            BoundaryKind::SatCharacteristic => (b - a) / (n - 1) as f64,
        };
        let x = (0..n).map(|i| a + i as f64 * dx).collect();
        Ok(Grid1D { x, dx, boundary })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Semi-discrete advection RHS `du/dt = -c du/dx` with a homogeneous (zero)
/// inflow state on SAT grids. See [`advection_rhs_with_inflow`] for the
/// general boundary-data variant.
pub fn advection_rhs(
    grid: &Grid1D,
    op: &SbpOperator,
    u: &[f64],
    wave_speed: f64,
) -> Result<Vec<f64>, PdeError> {
    advection_rhs_with_inflow(grid, op, u, wave_speed, 0.0)
}

/// Advection RHS with explicit inflow data `g`. On a SAT grid the inflow end
/// (left for `c > 0`, right for `c < 0`) receives the penalty
/// `-sigma * |c| / P_00 * (u_b - g)` with `sigma = 1/2`; the outflow end is
/// free. Periodic grids ignore `g`.
pub fn advection_rhs_with_inflow(
    grid: &Grid1D,
    op: &SbpOperator,
    u: &[f64],
    wave_speed: f64,
    inflow: f64,
) -> Result<Vec<f64>, PdeError> {
    let n = grid.len();
    if u.len() != n {
        return Err(PdeError::LengthMismatch {
            want: n,
            got: u.len(),
        });
    }
    let periodic = grid.boundary == BoundaryKind::Periodic;
    let du = op.apply(u, grid.dx, periodic)?;
    let c = wave_speed;
    let mut rhs: Vec<f64> = du.iter().map(|d| -c * d).collect();
    if grid.boundary == BoundaryKind::SatCharacteristic && c != 0.0 {
        // P_00 = p_0 * dx, so the penalty scale is sigma*|c| / (p_0 * dx).
        let tau = SAT_SIGMA * c.abs() / (op.boundary_norm(0) * grid.dx);
        if c > 0.0 {
            rhs[0] -= tau * (u[0] - inflow);
        } else {
            rhs[n - 1] -= tau * (u[n - 1] - inflow);
        }
    }
    Ok(rhs)
}
