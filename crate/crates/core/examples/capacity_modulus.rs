//! A modulus built from a capacity curve, `ω(t) = exp(-e^{ψ^{-1}(cap(E_t))})`,
//! and the regularity check for power moduli on both sides of the borderline.
//!
//! `cargo run --release --example capacity_modulus`

use dzeros::capacity::{capacity_curve, SolverParams};
use dzeros::circle_sets::CircleSet;
use dzeros::zerosets::{capacity_omega, default_delta_grid, omega_regularity, DecayProfile, ModulusOmega};

fn main() -> dzeros::Result<()> {
    let ts: Vec<f64> = (0..=10).map(|k| 10f64.powf(-6.0 + 0.5 * k as f64)).collect();
    let curve = capacity_curve(&CircleSet::points(&[0.0, 2.0]), &ts, &SolverParams { cells: 60, ..Default::default() })?;
    let omega = capacity_omega(&curve, &DecayProfile::Power { p: 3.0 })?;
    for t in [1e-6, 1e-4, 1e-2, 0.5] {
        println!("ω({t:.0e}) = {:.6e}", omega.eval(t));
    }
    let grid = default_delta_grid();
    for p in [1.0, 1.5] {
        let reg = omega_regularity(&ModulusOmega::power(p)?, &grid)?;
        println!("ω = t^{p}: sup ratio {:.4}, slope {:.4}, pass {}", reg.sup_ratio, reg.slope, reg.pass);
    }
    Ok(())
}
