//! Moduli `ω`, the summability conditions built on them, and the explicit
//! zero-sequence constructions.
//!
//! Distances are Euclidean in the plane: `d(z, E) = min_{ζ ∈ E} |z - ζ|`.
//! They are carried as `ln d` so that zeros with `1 - r` far below the
//! smallest double still have meaningful terms.

mod conditions;
mod constructions;
mod omega;

pub use conditions::{
    blas_condition, condition_ii_check, corollary1_sum, corollary2_sum, corollary3_sum,
    lemma_sum, log_inverse_measure_integrals, log_square_sum, t_gamma_integral, theorem1_sum,
    ConditionII, ConditionReport, TGamma,
};
pub use constructions::{
    assign_arguments, example2_sequence, hausdorff_diagnostic, prop2_depth, prop2_report,
    prop2_sequence, remark_radii, remark_report, remark_sequence, Example2, FrostmanProbe, Hausdorff, Prop2Report,
    RemarkReport,
};
pub use omega::{
    capacity_omega, default_delta_grid, omega_regularity, remark_omega_bound, remark_threshold,
    DecayProfile, ModulusOmega, Regularity, RemarkBound,
};

use crate::blaschke::Zero;
use crate::circle_sets::CircleSubset;

/// `ln(e^a + e^b)`.
pub(crate) fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln d(z, E)` from `d² = ρ² + 4(1 - ρ) sin²(δ/2)`, `ρ = 1 - r`, `δ` the
/// angular distance of the argument to `E`.
pub fn log_distance(z: &Zero, e: &dyn CircleSubset) -> f64 {
    let delta = e.angular_distance(z.theta);
    let a = 2.0 * z.log_depth;
    if delta == 0.0 {
        return z.log_depth;
    }
    let b = (4.0 * (1.0 - z.depth())).ln() + 2.0 * (0.5 * delta).sin().ln();
    0.5 * ln_add_exp(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_sets::{polar_distance, CircleSet};

    #[test]
    fn log_distance_matches_direct() {
        let e = CircleSet::point(0.5);
        for (ld, th) in [(-1.0, 0.5), (-2.0, 1.5), (-0.1, 3.0), (-30.0, 0.5 + 1e-9)] {
            let z = Zero::from_log_depth(ld, th);
            let direct = polar_distance(z.depth(), (th - 0.5f64).abs());
            assert!((log_distance(&z, &e) - direct.ln()).abs() < 1e-12);
        }
        let deep = Zero::from_log_depth(-1e5, 0.5);
        assert_eq!(log_distance(&deep, &e), -1e5);
        assert!((ln_add_exp(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
    }
}
