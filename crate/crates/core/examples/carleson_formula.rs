//! Both sides of `D(Bf) = D(f) + (1/2π) ∫ Σ P_{z_n} |f|²` for a product with
//! three zeros and a cubic.
//!
//! `cargo run --release --example carleson_formula`

use num_complex::Complex64;

use dzeros::blaschke::{carleson_check, ZeroSequence};
use dzeros::dirichlet::PowerSeries;

fn main() -> dzeros::Result<()> {
    let zs = ZeroSequence::from_pairs(&[[0.5, 0.0], [0.8, 2.0], [0.9, 4.0]])?;
    let f = PowerSeries::new(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, -0.5),
        Complex64::new(0.25, 0.0),
        Complex64::new(0.0, 0.1),
    ]);
    let c = carleson_check(&zs, &f)?;
    println!("D(f)           {:.15}", c.dirichlet_f);
    println!("boundary term  {:.15}", c.boundary_term);
    println!("D(Bf)          {:.15}", c.lhs);
    println!("relative error {:.2e} (grid {}, {} coefficients)", c.rel_error, c.grid, c.truncation);

    let one = carleson_check(&zs, &PowerSeries::constant(Complex64::new(1.0, 0.0)))?;
    println!("D(B) = {:.12} for 3 zeros", one.lhs);
    Ok(())
}
