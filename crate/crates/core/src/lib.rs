//! Numerical toolkit for zero sets of the Dirichlet space.
//!
//! The crate covers closed subsets of the unit circle and Cantor
//! constructions ([`circle_sets`]), logarithmic energy and capacity
//! ([`capacity`]), Dirichlet integrals and outer functions ([`dirichlet`]),
//! Blaschke products and Frostman sums ([`blaschke`]), and the summability
//! conditions that decide whether a sequence of disk points is a zero set
//! ([`zerosets`]). [`cli`] drives everything from JSON configs.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blaschke;
pub mod capacity;
pub mod circle_sets;
pub mod cli;
pub mod dirichlet;
pub mod error;
pub mod quadrature;
pub mod series;
pub mod summation;
pub mod zerosets;

pub use blaschke::{Zero, ZeroSequence};
pub use capacity::{Capacity, DiscreteMeasure};
pub use circle_sets::{Arc, CantorSet, CantorSpec, CircleSet, CircleSubset};
pub use dirichlet::PowerSeries;
pub use error::{Error, Result};
pub use series::{PartialSumSeries, Verdict};
pub use zerosets::{DecayProfile, ModulusOmega};

/// Formats a float with 17 significant digits (round-trippable), `inf`/`-inf`
/// for infinities.
pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}
