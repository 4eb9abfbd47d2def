//! Adams-Bashforth weights from history nodes.
//!
//! The same routine covers three regimes: the square system (classical AB),
//! the underdetermined system (extended history, solved for minimum norm),
//! and nonuniform nodes such as a shortened final step.
//!
//!     cargo run --example ab_coefficients

use mrab::coeffs::ab_weights;

fn show(label: &str, nodes: &[f64], order: usize, interval: (f64, f64)) {
    let w = ab_weights(nodes, order, interval).expect("valid node set");
    println!("{label}");
    println!("  nodes    {:?}", w.nodes);
    println!("  interval [{}, {}]", w.interval.0, w.interval.1);
    print!("  alpha   ");
    for a in &w.alpha {
        print!(" {a:+.12}");
    }
    let norm: f64 = w.alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
    println!("\n  2-norm   {norm:.12}\n");
}

fn main() {
    // Classical third order: three nodes, three conditions. The exact
    // fractions are 5/12, -16/12, 23/12.
    show("AB3, uniform history", &[-2.0, -1.0, 0.0], 3, (0.0, 1.0));

    // One extra node with the same three conditions. The solver picks the
    // minimum-norm weights, which buy a visibly larger stable region for
    // the same accuracy order.
    show("AB34, extended history", &[-3.0, -2.0, -1.0, 0.0], 3, (0.0, 1.0));

    // Fourth order with a fifth node.
    show(
        "AB45, extended history",
        &[-4.0, -3.0, -2.0, -1.0, 0.0],
        4,
        (0.0, 1.0),
    );

    // Nothing requires uniform spacing. A multi-rate integrator asks for
    // weights like these on every micro step: the history is uniform but
    // the target interval covers only a fraction of the last gap.
    show(
        "AB3 weights for a quarter step",
        &[-2.0, -1.0, 0.0],
        3,
        (0.0, 0.25),
    );

    // A restarted run with a shortened last step leaves a nonuniform tail.
    show("AB3, nonuniform history", &[-1.9, -1.2, 0.0], 3, (0.0, 0.7));
}
