//! Zeros accumulating at a countable set: the Blaschke sum and the
//! `exp(-2/d^γ)` sum converge while the argument-distance sum diverges.
//!
//! `cargo run --release --example accumulating_zeros`

use dzeros::blaschke::blaschke_sum;
use dzeros::zerosets::{corollary1_sum, corollary2_sum, example2_sequence, t_gamma_integral};

fn main() -> dzeros::Result<()> {
    let n = 1 << 20;
    let (gamma, alpha) = (0.9, 0.75);
    let ex = example2_sequence(gamma, n)?;
    let tg = t_gamma_integral(&ex.set, gamma)?;
    println!("E has {} points; ∫ |E_t| t^(-1-γ) dt = {:.6}", ex.n_max + 2, tg.integral);
    for (name, s) in [
        ("Σ (1 - |z_n|)", blaschke_sum(&ex.sequence, n)?),
        ("Σ exp(-2/d(z_n,E)^γ)", corollary2_sum(&ex.sequence, &ex.set, gamma, n)?),
        ("Σ d(e^{iθ_n},E)^{2α}", corollary1_sum(&ex.sequence, &ex.set, alpha, n)?),
    ] {
        println!("{name:<24} {:<10} {:.6} at N = {}", s.verdict.to_string(), s.total(), s.terms_used());
    }
    Ok(())
}
