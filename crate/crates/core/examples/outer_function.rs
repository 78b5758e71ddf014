//! Outer function with modulus `d(ζ, E)^{1/2}` on the boundary, `E` a
//! triadic Cantor level, compared with the target just inside the circle.
//!
//! `cargo run --release --example outer_function`

use num_complex::Complex64;

use dzeros::circle_sets::{cantor_level, perfect_symmetric};
use dzeros::dirichlet::{outer_function, power_log_modulus};

fn main() -> dzeros::Result<()> {
    let m = 1 << 14;
    let alpha = 0.5;
    let e = cantor_level(&perfect_symmetric(1.0 / 3.0, 8)?, 8)?;
    let lm = power_log_modulus(&e, m, alpha)?;
    let f = outer_function(&lm.grid, m / 2 - 1)?;
    println!("{} of {m} samples clipped at {:.2e}", lm.clipped, lm.clip);
    println!("a_0 = {:.12}, D(f) = {:.6}", f.coeff(0).re, f.dirichlet_norm());
    let r = 1.0 - 1e-3;
    for j in (0..m).step_by(m / 16) {
        let d = lm.distances[j];
        let got = f.evaluate(Complex64::from_polar(r, lm.grid.theta(j)))?.norm();
        println!("θ = {:.4}  d = {:.4}  |f| = {:.6}  d^α = {:.6}", lm.grid.theta(j), d, got, d.powf(alpha));
    }
    Ok(())
}
