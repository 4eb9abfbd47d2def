//! Metric-based CFL timestep estimates.
//!
//! One formula covers every grid that supplies a Jacobian and metric rows
//! per point: the inviscid denominator sums contravariant wave speeds, the
//! viscous variant adds a diffusion term, and the global step is the
//! pointwise minimum scaled by the CFL number.
//!
//!     cargo run --example cfl_timestep

use mrab::pde1d::{compute_timestep, MetricPoint};

fn main() {
    // 1-D reduction: dt = cfl * dx / (|u| + c).
    let dx = 1.01666 / 61.0;
    let p = MetricPoint::cartesian_1d(dx, 0.0, 1.0, 0.0);
    let dt = compute_timestep(&[p], 1.0, false).unwrap();
    println!("1-D, u = 0, c = 1:        dt = {dt:.6} (dx = {dx:.6})");

    // Square 2-D cell, acoustic wave: both directions contribute, so the
    // step halves relative to 1-D.
    let p = MetricPoint::cartesian_2d(dx, dx, (0.0, 0.0), 1.0, 0.0);
    let dt = compute_timestep(&[p], 1.0, false).unwrap();
    println!("2-D square, u = 0, c = 1: dt = {dt:.6} (= dx / 2)");

    // Anisotropic cell with a mean flow.
    let p = MetricPoint::cartesian_2d(0.01, 0.0025, (50.0, 5.0), 340.0, 0.0);
    let dt = compute_timestep(&[p], 1.0, false).unwrap();
    println!("2-D boundary-layer cell:  dt = {dt:.3e}");

    // Viscosity enters the same denominator; with nu large the estimate
    // falls back to the diffusive dx^2 scaling automatically.
    for nu in [0.0, 1e-3, 1.0] {
        let p = MetricPoint::cartesian_1d(dx, 1.0, 1.0, nu);
        let inviscid = compute_timestep(&[p.clone()], 1.0, false).unwrap();
        let viscous = compute_timestep(&[p], 1.0, true).unwrap();
        println!("nu = {nu:<6}            dt = {inviscid:.3e} inviscid, {viscous:.3e} viscous");
    }

    // Grids are just collections of points; the worst cell sets the step.
    let points: Vec<MetricPoint> = (0..61)
        .map(|i| {
            // Spacing tightens smoothly toward the right edge.
            let local_dx = dx * (1.0 - 0.8 * i as f64 / 60.0);
            MetricPoint::cartesian_1d(local_dx, 0.3, 1.0, 0.0)
        })
        .collect();
    let dt = compute_timestep(&points, 0.4, false).unwrap();
    println!("stretched grid, cfl 0.4:  dt = {dt:.3e} (tightest cell wins)");
}
