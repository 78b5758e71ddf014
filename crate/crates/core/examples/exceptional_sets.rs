//! Level sets of the Frostman sum `Σ P_{z_n}` on a boundary grid and the
//! capacity cover bound for their tails.
//!
//! `cargo run --release --example exceptional_sets`

use dzeros::blaschke::{exceptional_cover_bound, exceptional_level_set, lambda0, Zero, ZeroSequence};

fn main() -> dzeros::Result<()> {
    // 1 - r_n = e^{-n²}, so Σ 1/|log(1 - r_n)| converges; golden-angle arguments
    let zs = ZeroSequence::generated("1 - r_n = e^-n^2", None, |i| {
        let n = (i + 1) as f64;
        Zero::from_log_depth(-n * n, 2.399_963_229_728_653 * i as f64)
    });
    let n = 40;
    println!("λ₀ = {:.6}", lambda0(&zs, n));
    for lambda in [1.0, 10.0, 100.0, 1000.0] {
        let l = exceptional_level_set(&zs, lambda, 1 << 14, n)?;
        println!("|{{Σ P ≥ {lambda}}}| ≈ {:.6e}", l.measure);
    }
    for b in exceptional_cover_bound(&zs, &[1, 4, 16], n)? {
        println!("tail from {}: {:.6e} (vacuous {})", b.n_start, b.value, b.vacuous);
    }
    Ok(())
}
