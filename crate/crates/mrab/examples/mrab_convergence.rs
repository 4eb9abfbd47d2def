//! Measured convergence order of the multi-rate schemes.
//!
//! Halving the macro step (micro step in tow) three times and fitting the
//! log-log slope shows third order for both the standard and the
//! extended-history variants, at every step ratio. The extended history
//! costs nothing extra per step; its payoff is stability, not accuracy.
//!
//!     cargo run --example mrab_convergence

use mrab::eoc::estimate_order;
use mrab::multirate::mrab_integrate;
use mrab::{MrabConfig, TwoRateSystem};
use nalgebra::{Matrix2, SymmetricEigen, Vector2};

fn exact(t: f64) -> (f64, f64) {
    let a: Matrix2<f64> = Matrix2::new(-1.0, 0.1, 0.1, -0.05);
    let se = SymmetricEigen::new(a);
    let w = se.eigenvectors.transpose() * Vector2::new(1.0, 0.5);
    let y = se.eigenvectors
        * Vector2::new(
            w[0] * (se.eigenvalues[0] * t).exp(),
            w[1] * (se.eigenvalues[1] * t).exp(),
        );
    (y[0], y[1])
}

fn error_at(history: usize, sr: usize, big_h: f64) -> f64 {
    let mut sys = TwoRateSystem {
        dim_f: 1,
        dim_s: 1,
        rhs_f: |_t: f64, f: &[f64], s: &[f64]| vec![-f[0] + 0.1 * s[0]],
        rhs_s: |_t: f64, f: &[f64], s: &[f64]| vec![-0.05 * s[0] + 0.1 * f[0]],
    };
    let cfg = MrabConfig::new(3, history, sr, big_h);
    let t_end = (2.5 / big_h).round() * big_h;
    let run = mrab_integrate(&mut sys, 0.0, &[1.0], &[0.5], t_end, &cfg).expect("stable march");
    let (ef, es) = exact(run.t);
    (run.f[0] - ef).abs().max((run.s[0] - es).abs())
}

fn main() {
    let dts = [0.05, 0.025, 0.0125];
    println!("macro steps {dts:?}, horizon 2.5");
    println!("{:<22} {}", "scheme", "slope by step ratio 2..6");
    for (label, history) in [("mrab3 (3 nodes)", 3usize), ("mrab34 (4 nodes)", 4)] {
        print!("{label:<22}");
        for sr in 2..=6usize {
            let errs: Vec<f64> = dts.iter().map(|&h| error_at(history, sr, h)).collect();
            let fit = estimate_order(&dts, &errs);
            print!(" {:.3}", fit.slope);
        }
        println!();
    }
}
