//! Metric-based CFL timestep estimate for curvilinear grids.
//!
//! Each grid point carries its Jacobian `J`, the raw metric rows
//! `d xi_i / dx`, the local velocity and sound speed, and an effective
//! viscosity. With the scaled metric `xihat_i = (1/J) d xi_i / dx`, the
//! inviscid estimate at a point is
//!
//! ```text
//! dt_inv = (1/J) / sum_i ( |U . xihat_i| + c ||xihat_i|| )
//! ```
//!
//! and the viscous estimate divides by the same sum plus
//! `2 nu* J (sum_i ||xihat_i||)^2`. The global step is the minimum over
//! points of `min(dt_inv, dt_visc)`, scaled by the CFL number. On a uniform
//! Cartesian grid this collapses to the familiar `dx / (|u| + c)` in 1-D and
//! `h / 2` for a unit-speed acoustic wave on a square 2-D cell.

use super::PdeError;

/// Per-point metric data. `metric_rows[i]` is the raw row `d xi_i / dx`
/// (not yet divided by J); `velocity` must have the same dimension as each
/// row. `nu_star` is the effective viscosity `max(mu, k / c_v)`; it only
/// matters when the viscous estimate is requested.
#[derive(Debug, Clone)]
pub struct MetricPoint {
    pub jacobian: f64,
    pub metric_rows: Vec<Vec<f64>>,
    pub velocity: Vec<f64>,
    pub sound_speed: f64,
    pub nu_star: f64,
}

impl MetricPoint {
    /// Uniform 1-D cell: `J = 1/dx`, metric row `(1/dx)`.
    pub fn cartesian_1d(dx: f64, u: f64, sound_speed: f64, nu_star: f64) -> Self {
        MetricPoint {
            jacobian: 1.0 / dx,
            metric_rows: vec![vec![1.0 / dx]],
            velocity: vec![u],
            sound_speed,
            nu_star,
        }
    }

    /// Uniform 2-D cell: `J = 1/(dx dy)`, rows `(1/dx, 0)` and `(0, 1/dy)`.
    pub fn cartesian_2d(dx: f64, dy: f64, velocity: (f64, f64), sound_speed: f64, nu_star: f64) -> Self {
        MetricPoint {
            jacobian: 1.0 / (dx * dy),
            metric_rows: vec![vec![1.0 / dx, 0.0], vec![0.0, 1.0 / dy]],
            velocity: vec![velocity.0, velocity.1],
            sound_speed,
            nu_star,
        }
    }

    fn local_dt(&self, index: usize, viscous: bool) -> Result<f64, PdeError> {
        let j = self.jacobian;
        if !(j > 0.0) || !j.is_finite() {
            return Err(PdeError::BadJacobian(j));
        }
        let c = self.sound_speed;
        if !(c > 0.0) || !c.is_finite() {
            return Err(PdeError::BadSoundSpeed(c));
        }
        let dim = self.velocity.len();
        if self.metric_rows.is_empty() || self.metric_rows.iter().any(|r| r.len() != dim) {
            return Err(PdeError::BadMetricShape(index));
        }
        let mut den = 0.0;
        let mut norm_sum = 0.0;
        for row in &self.metric_rows {
            let mut dot = 0.0;
            let mut sq = 0.0;
            for (m, u) in row.iter().zip(&self.velocity) {
                let h = m / j;
                dot += h * u;
                sq += h * h;
            }
            let norm = sq.sqrt();
            den += dot.abs() + c * norm;
            norm_sum += norm;
        }
        if den <= 0.0 {
            return Err(PdeError::DegenerateMetric(index));
        }
        let dt_inv = (1.0 / j) / den;
        if !viscous {
            return Ok(dt_inv);
        }
        let dt_visc = (1.0 / j) / (den + 2.0 * self.nu_star * j * norm_sum * norm_sum);
        Ok(dt_inv.min(dt_visc))
    }
}

/// Global CFL timestep: the minimum local estimate over all points times
/// `cfl`. Set `viscous` to include the diffusive restriction.
pub fn compute_timestep(
    points: &[MetricPoint],
    cfl: f64,
    viscous: bool,
) -> Result<f64, PdeError> {
    if points.is_empty() {
        return Err(PdeError::NoPoints);
    }
    let mut dt = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        dt = dt.min(p.local_dt(i, viscous)?);
    }
    Ok(cfl * dt)
}
