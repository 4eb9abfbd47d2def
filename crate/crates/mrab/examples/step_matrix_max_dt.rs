//! Step matrices by finite differences, and the largest stable step.
//!
//! Any advance function, treated as a black box, is differentiated column
//! by column around a base state to produce the one-step matrix G. The
//! spectral radius of G decides stability for the discretized PDE with all
//! its boundary coupling, no eigenfunction analysis required. Bisecting
//! rho(G(dt)) = 1 then finds the step limit.
//!
//! The bisected RK4 limit on the periodic advection testbed lands within a
//! few percent of the classical prediction: imaginary-axis reach of the
//! scheme divided by the operator's spectral extent.
//!
//!     cargo run --example step_matrix_max_dt

use mrab::pde1d::{advection_rhs, Grid1D, SbpOperator};
use mrab::stability::{
    ab_stability_advance, ab_stability_dim, boundary_locus, build_step_matrix, max_stable_dt,
    spectral_radius, StabilityError, DEFAULT_EPSILON,
};
use mrab::steppers::{rk_step, RkKind, StepperSpec};

fn rho(spec: StepperSpec, grid: &Grid1D, op: &SbpOperator, dt: f64) -> Result<f64, StabilityError> {
    let n = grid.len();
    let mut rhs = |_t: f64, y: &[f64]| advection_rhs(grid, op, y, 1.0).expect("sized state");
    let sm = match spec {
        StepperSpec::Rk3 | StepperSpec::Rk4 => {
            let kind = if spec == StepperSpec::Rk3 { RkKind::Rk3 } else { RkKind::Rk4 };
            let mut advance = |phi: &[f64]| rk_step(&mut rhs, 0.0, phi, dt, kind);
            build_step_matrix(&mut advance, &vec![0.0; n], dt, DEFAULT_EPSILON)?
        }
        StepperSpec::Ab { history_len: m, .. } => {
            // The stability vector joins the state with m-1 past RHS
            // records, so one matrix captures the whole multistep update.
            let mut advance = |phi: &[f64]| ab_stability_advance(&mut rhs, n, spec, dt, phi);
            build_step_matrix(&mut advance, &vec![0.0; ab_stability_dim(n, m)], dt, DEFAULT_EPSILON)?
        }
    };
    spectral_radius(&sm.g)
}

fn main() {
    let grid = Grid1D::periodic(0.0, 1.01666, 61).unwrap();
    let op = SbpOperator::order_4_2();

    println!("61-point periodic advection testbed, dx = {:.6}", grid.dx);
    println!("{:<6} {:>12} {:>6} {:>14}", "scheme", "dt_max", "iters", "rho(dt_max)");
    let schemes: [(&str, StepperSpec, (f64, f64)); 4] = [
        ("rk3", StepperSpec::Rk3, (0.005, 0.2)),
        ("rk4", StepperSpec::Rk4, (0.005, 0.2)),
        ("ab3", StepperSpec::ab(3), (0.0005, 0.05)),
        ("ab34", StepperSpec::ab_extended(3), (0.0005, 0.05)),
    ];
    let mut rk4_dt = 0.0;
    for (name, spec, bracket) in schemes {
        let res = max_stable_dt(|dt| rho(spec, &grid, &op, dt), bracket).expect("bracket straddles");
        if name == "rk4" {
            rk4_dt = res.dt_max;
        }
        println!(
            "{:<6} {:>12.6} {:>6} {:>14.10}",
            name, res.dt_max, res.iterations, res.rho_at_dt_max
        );
    }

    // Prediction from scheme reach over operator extent. The operator's
    // largest advective eigenvalue magnitude approaches 1.3722 / dx on
    // refined periodic grids.
    let reach = boundary_locus(StepperSpec::Rk4, false)
        .imaginary_axis_crossing()
        .unwrap();
    let predicted = reach * grid.dx / 1.3722;
    println!(
        "\nrk4 predicted dt = reach {reach:.4} * dx / 1.3722 = {predicted:.6} ({:+.2}% off)",
        (rk4_dt / predicted - 1.0) * 100.0
    );
}
