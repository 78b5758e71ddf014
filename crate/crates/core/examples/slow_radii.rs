//! Radii with `|log(1 - r_n)| = √n log²(n+2)` over a capacity-zero Cantor
//! level: the modulus condition holds although Shapiro-Shields fails.
//!
//! `cargo run --release --example slow_radii`

use dzeros::zerosets::{remark_report, remark_sequence};

fn main() -> dzeros::Result<()> {
    let (zs, e) = remark_sequence(1.0, 4)?;
    let r = remark_report(&zs, &e, 1 << 20)?;
    let b = &r.omega_bound;
    println!(
        "exp(-(log log 1/t)²) ≤ (log 1/t)^(-2) on [{:.0e}, {:.4e}]: {} (max ratio {:.6})",
        b.t_lo, b.t_star, b.holds, b.max_ratio
    );
    println!("blas condition    {} ({:.6})", r.blas.verdict, r.blas.total());
    println!("Shapiro-Shields   {} ({:.3})", r.shapiro_shields.verdict, r.shapiro_shields.total());
    println!("Σ 1/log²(1 - r_n) {} ({:.6})", r.log_square.verdict, r.log_square.total());
    for h in &r.hausdorff {
        println!("Hausdorff distance of first {} arguments to E: {:.3e}", h.prefix, h.distance);
    }
    Ok(())
}
