//! Equilibrium measure of a semicircle, then `t ↦ cap(E_t)` for a point
//! against the upper bound `(∫_t^2 ds/|E_s|)^{-1}`.
//!
//! `cargo run --release --example capacity_curve`

use std::f64::consts::{FRAC_PI_4, PI};

use dzeros::capacity::{capacity_curve, equilibrium_measure, SolverParams};
use dzeros::circle_sets::{Arc, CircleSet};

fn main() -> dzeros::Result<()> {
    let params = SolverParams::default();
    let semicircle = CircleSet::from_arcs([Arc::new(0.0, PI)?]);
    let eq = equilibrium_measure(&semicircle, &params)?;
    println!(
        "semicircle: energy {:.6} (closed form {:.6}), KKT residual {:.1e}, {} iterations",
        eq.energy,
        (1.0 / FRAC_PI_4.sin()).ln(),
        eq.kkt_residual,
        eq.iterations
    );

    let ts: Vec<f64> = (1..=6).rev().map(|k| 10f64.powi(-k)).collect();
    let curve = capacity_curve(&CircleSet::point(0.0), &ts, &SolverParams { cells: 80, ..params })?;
    println!("{:>8} {:>12} {:>12}", "t", "cap(E_t)", "bound");
    for p in curve {
        println!("{:>8.0e} {:>12.6} {:>12.6}", p.t, p.capacity.value(), p.upper_bound.value());
    }
    Ok(())
}
