//! Measure, capacity and Carleson criteria for three Cantor families.
//!
//! `cargo run --release --example cantor_criteria`

use dzeros::circle_sets::{cantor_criteria, perfect_symmetric, CantorFamily, CantorSpec};

fn main() -> dzeros::Result<()> {
    let specs = [
        ("triadic", perfect_symmetric(1.0 / 3.0, 40)?),
        ("ratio 0.45", perfect_symmetric(0.45, 40)?),
        (
            "ℓ_n = 2π e^{-2^n/n}",
            CantorSpec::exp_power_valid(1.0, 40)?,
        ),
    ];
    for (name, spec) in &specs {
        let c = cantor_criteria(spec, 1 << 16)?;
        println!("{name}");
        if let CantorFamily::Ratio(r) = spec.family {
            println!("  ratio {r}");
        }
        println!("  |E| = 0: {:?}", c.measure_zero);
        println!("  cap(E) = 0: {:?} (capacity series {})", c.capacity_zero, c.capacity.verdict);
        if let Some(carleson) = &c.carleson {
            println!("  Carleson series {} (partial sum {:.6})", carleson.verdict, carleson.total());
        }
    }
    Ok(())
}
