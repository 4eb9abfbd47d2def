//! RHS-evaluation budgets: multi-rate AB against global-step RK4.
//!
//! The model counts evaluations only. RK4 pays four per point per step
//! everywhere; multi-rate AB pays SR per fast point and one per slow point
//! per macro step, at a step size set by the measured stable-step ratio
//! r = dt_AB / dt_RK4. Speedup is the count quotient, so it is independent
//! of the horizon and of the RK4 step itself.
//!
//!     cargo run --example perf_model_tables

use mrab::perfmodel::{speedup_table, PerfModelInput, AB34_STEP_RATIOS, AB45_STEP_RATIOS};

fn show(title: &str, n_f: usize, n_s: usize, ratios: &[(usize, f64)]) {
    let inputs: Vec<PerfModelInput> = ratios
        .iter()
        .map(|&(sr, r)| PerfModelInput {
            n_f,
            n_s,
            sr,
            r_rk4: r,
            t: 1.0,
            dt_rk4: 1.0,
        })
        .collect();
    let table = speedup_table(&inputs).expect("consistent problem");
    println!("{title}");
    println!("  n_f = {n_f}, n_s = {n_s}, RK4 count = {:.0}", table.n_rhs_rk4);
    println!(
        "  {:>3} {:>7} {:>14} {:>8} {:>10}",
        "SR", "r", "AB count", "speedup", "reduction"
    );
    for row in &table.rows {
        println!(
            "  {:>3} {:>7.3} {:>14.0} {:>8.2} {:>9.1}%",
            row.sr, row.r_rk4, row.n_rhs_ab, row.speedup, row.pct_reduction
        );
    }
    println!();
}

fn main() {
    // Cylinder benchmark: a fine O-grid around the body, a coarse
    // background. Third order wins once the stable-step ratio passes the
    // break-even point; fourth order never quite gets there because its
    // measured step ratios are smaller.
    show("cylinder, third order", 4840, 3721, &AB34_STEP_RATIOS);
    show("cylinder, fourth order", 4840, 3721, &AB45_STEP_RATIOS);

    // A large production-scale mesh where the slow points outnumber the
    // fast ones: exactly the regime multi-rate stepping is for.
    show(
        "large mesh, third order",
        12_582_912,
        339_521 + 11_419_614 + 2_060_250,
        &AB34_STEP_RATIOS[..5],
    );

    // Break-even: speedup exceeds one when 4 r (n_f + n_s) > SR n_f + n_s.
    let (sr, r) = AB34_STEP_RATIOS[1];
    let lhs = 4.0 * r * (4840.0 + 3721.0);
    let rhs = (sr * 4840) as f64 + 3721.0;
    println!("break-even check at SR = {sr}: 4r(n_f+n_s) = {lhs:.0} vs SR*n_f+n_s = {rhs:.0}");
}
