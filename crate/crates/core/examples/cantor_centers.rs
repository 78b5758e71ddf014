//! Zeros at the interval centers of a positive-capacity Cantor set: Blaschke
//! but not Shapiro-Shields, and the Frostman sums blow up on `E`.
//!
//! `cargo run --release --example cantor_centers`

use dzeros::circle_sets::perfect_symmetric;
use dzeros::zerosets::prop2_report;

fn main() -> dzeros::Result<()> {
    let spec = perfect_symmetric(1.0 / 3.0, 40)?;
    let r = prop2_report(&spec, 20, 1 << 20, 8)?;
    println!("levels {}..{}, {} zeros, sup ℓ_k/ℓ_(k-1) = {:.4}", r.k_min, r.levels, r.terms, r.sup_ratio);
    for (name, s) in [
        ("capacity series", &r.capacity_series),
        ("Σ 1/log(1/ℓ_k)", &r.log_series),
        ("Blaschke", &r.blaschke),
        ("Shapiro-Shields", &r.shapiro_shields),
        ("Σ ω(2d), ω = t²", &r.theorem1),
    ] {
        println!("{name:<18} {}", s.verdict);
    }
    println!("λ₀ = {:.6}", r.lambda0);
    for p in &r.probes {
        println!("θ = {:.6}: sum {:.3e} after {} levels", p.theta, p.sum, p.levels_used);
    }
    Ok(())
}
