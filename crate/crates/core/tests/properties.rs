//! Invariants checked on random inputs.

use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;

use dzeros::blaschke::{evaluate_product, Zero, ZeroSequence};
use dzeros::capacity::{Capacity, CurvePoint, DiscreteMeasure};
use dzeros::circle_sets::{Arc, CircleSet, CircleSubset};
use dzeros::dirichlet::PowerSeries;
use dzeros::series::{PartialSumSeries, Verdict};
use dzeros::summation::{pairwise, par_pairwise, sum};
use dzeros::zerosets::{assign_arguments, capacity_omega, log_distance, DecayProfile, ModulusOmega};

fn arcs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..TAU, 0.0..2.0f64), 1..8)
}

fn set_of(pairs: &[(f64, f64)]) -> CircleSet {
    CircleSet::from_arcs(pairs.iter().map(|(s, l)| Arc::new(*s, *l).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn merged_arcs_are_disjoint_and_measure_bounded(pairs in arcs()) {
        let e = set_of(&pairs);
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        prop_assert!(e.measure() <= TAU + 1e-12);
        prop_assert!(e.measure() <= total + 1e-12);
        let a = e.arcs();
        for w in a.windows(2) {
            prop_assert!(w[0].start + w[0].length < w[1].start);
        }
    }

    #[test]
    fn neighborhoods_grow_and_contain_the_set(pairs in arcs(), t in 1e-6..1.0f64, s in 1e-6..1.0f64) {
        let e = set_of(&pairs);
        let (lo, hi) = if t < s { (t, s) } else { (s, t) };
        let a = e.neighborhood(lo).unwrap();
        let b = e.neighborhood(hi).unwrap();
        prop_assert!(e.is_subset_of(&a));
        prop_assert!(a.is_subset_of(&b));
        prop_assert!(a.measure() <= b.measure() + 1e-12);
    }

    #[test]
    fn points_of_the_set_have_zero_distance(pairs in arcs(), u in 0.0..1.0f64) {
        let e = set_of(&pairs);
        let arc = e.arcs()[0];
        let theta = arc.start + u * arc.length;
        prop_assert!(e.contains(theta));
        prop_assert_eq!(e.angular_distance(theta), 0.0);
    }

    #[test]
    fn assigned_zeros_sit_at_their_depth(ld in prop::collection::vec(-50.0..-0.01f64, 1..20), pts in prop::collection::vec(0.0..TAU, 1..5)) {
        let radii = ZeroSequence::finite(ld.iter().map(|l| Zero::from_log_depth(*l, 0.0)).collect(), "radii");
        let e = CircleSet::points(&pts);
        let zs = assign_arguments(&radii, &e).unwrap();
        for (i, l) in ld.iter().enumerate() {
            let d = log_distance(&zs.get(i), &e);
            prop_assert!((d - l).abs() <= 1e-9 * l.abs().max(1.0), "{} vs {}", d, l);
        }
    }

    #[test]
    fn capacity_modulus_is_monotone(caps in prop::collection::vec(0.01..0.5f64, 2..12)) {
        let mut sorted = caps.clone();
        sorted.sort_by(f64::total_cmp);
        let curve: Vec<CurvePoint> = sorted
            .iter()
            .enumerate()
            .map(|(i, c)| CurvePoint {
                t: 10f64.powi(i as i32 - 12),
                capacity: Capacity::Finite(*c),
                upper_bound: Capacity::Infinite,
                kkt_residual: 0.0,
            })
            .collect();
        let omega = capacity_omega(&curve, &DecayProfile::Power { p: 3.0 }).unwrap();
        let mut last = 0.0;
        for k in 0..60 {
            let t = 10f64.powf(-13.0 + 0.2 * k as f64);
            let w = omega.eval(t);
            prop_assert!(w >= last);
            last = w;
        }
    }

    #[test]
    fn power_modulus_tail_decreases(p in 0.1..3.0f64, x in 1e-8..1.0f64, y in 1e-8..1.0f64) {
        let omega = ModulusOmega::power(p).unwrap();
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        prop_assert!(omega.tail_integral(lo) >= omega.tail_integral(hi));
        prop_assert!(omega.eval(lo) <= omega.eval(hi));
    }

    #[test]
    fn fourier_energy_is_nonnegative(widths in prop::collection::vec(0.05..0.5f64, 1..6), w in prop::collection::vec(0.1..1.0f64, 6)) {
        let mut start = 0.0;
        let total_w: f64 = w[..widths.len()].iter().sum();
        let cells = widths
            .iter()
            .zip(&w)
            .map(|(h, wt)| {
                let c = dzeros::capacity::Cell { center: start + h, half_width: *h, weight: wt / total_w };
                start += 2.0 * h + 0.01;
                c
            })
            .collect();
        let m = DiscreteMeasure::new(cells).unwrap();
        prop_assert!(m.energy_fourier(512).unwrap().value >= 0.0);
    }

    #[test]
    fn blaschke_product_is_unimodular_on_the_circle(
        zeros in prop::collection::vec((0.0..0.95f64, 0.0..TAU), 1..6),
        phi in 0.0..TAU,
        r in 0.0..0.99f64,
    ) {
        let zs = ZeroSequence::finite(
            zeros.iter().map(|(r, t)| Zero::from_polar(*r, *t).unwrap()).collect(),
            "random",
        );
        // the product is only defined inside the disk; approach the circle
        let on = evaluate_product(&zs, Complex64::from_polar(1.0 - 1e-13, phi), 8).unwrap();
        prop_assert!((on.norm() - 1.0).abs() < 1e-9);
        let inside = evaluate_product(&zs, Complex64::from_polar(r, phi), 8).unwrap();
        prop_assert!(inside.norm() < 1.0);
    }

    #[test]
    fn dirichlet_partial_sums_are_monotone(c in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..40)) {
        let f = PowerSeries::new(c.iter().map(|(a, b)| Complex64::new(*a, *b)).collect());
        let sums = f.dirichlet_partial_sums();
        for w in sums.windows(2) {
            prop_assert!(w[1] >= w[0]);
        }
        prop_assert!((sums.last().copied().unwrap_or(0.0) - f.dirichlet_norm()).abs() <= 1e-12 * f.dirichlet_norm().max(1.0));
    }

    #[test]
    fn summation_orders_agree(xs in prop::collection::vec(-1e3..1e3f64, 0..5000)) {
        let a = pairwise(&xs);
        let b = sum(xs.iter().copied());
        let scale: f64 = xs.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        prop_assert!((a - b).abs() <= 1e-12 * scale);
        prop_assert_eq!(par_pairwise(&xs), par_pairwise(&xs));
    }

    #[test]
    fn geometric_series_converge(q in 0.05..0.6f64) {
        let s = PartialSumSeries::from_fn(1 << 12, |i| q.powi(i as i32)).unwrap();
        prop_assert_eq!(s.verdict, Verdict::Converges);
        prop_assert!((s.total() - 1.0 / (1.0 - q)).abs() < 1e-12);
    }

    #[test]
    fn slowly_decaying_series_diverge(p in 0.3..1.0f64) {
        let s = PartialSumSeries::from_fn(1 << 16, |i| ((i + 1) as f64).powf(-p)).unwrap();
        prop_assert_eq!(s.verdict, Verdict::Diverges);
    }
}
