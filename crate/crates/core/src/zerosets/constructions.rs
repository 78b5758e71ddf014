//! Explicit zero sequences: rays through the endpoints of a set, the
//! two-parameter family accumulating at a countable set, the slowly
//! approaching sequence over a capacity-zero Cantor set, and the sequence
//! over interval centers of a positive-capacity Cantor set whose Frostman
//! sums blow up on the whole set.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

use super::conditions::{blas_condition, log_square_sum, theorem1_sum};
use super::omega::{remark_omega_bound, RemarkBound};
use super::ModulusOmega;
use crate::blaschke::{blaschke_sum, frostman_sum, shapiro_shields, Zero, ZeroSequence};
use crate::circle_sets::{
    cantor_criteria, cantor_level, chord, normalize_angle, CantorSet, CantorSpec, CircleSet,
    CircleSubset,
};
use crate::error::{domain, Result};
use crate::series::PartialSumSeries;

/// Places the `i`-th radius of `radii` on the ray through the
/// `(i mod K)`-th of the `K` endpoints of `E`, so `d(z_i, E) = 1 - r_i`.
pub fn assign_arguments(radii: &ZeroSequence, e: &CircleSet) -> Result<ZeroSequence> {
    if e.is_full() || e.is_empty() {
        return Err(domain(
            "assign_arguments",
            "the set must be nonempty and proper to have endpoints",
        ));
    }
    let ends = e.endpoints();
    let k = ends.len();
    let radii = radii.clone();
    let prov = format!("{} on {} endpoint rays", radii.provenance(), k);
    Ok(ZeroSequence::generated(prov, radii.len(), move |i| {
        Zero::from_log_depth(radii.get(i).log_depth, ends[i % k])
    }))
}

/// Chordal Hausdorff distance between the arguments of a prefix and `E`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Hausdorff {
    pub prefix: usize,
    pub distance: f64,
}

pub fn hausdorff_diagnostic(zs: &ZeroSequence, e: &CircleSet, prefixes: &[usize]) -> Vec<Hausdorff> {
    prefixes
        .iter()
        .map(|&p| {
            let mut args: Vec<f64> = zs.materialize(p).iter().map(|z| z.theta).collect();
            args.sort_by(f64::total_cmp);
            args.dedup();
            Hausdorff {
                prefix: p,
                distance: hausdorff(&args, e),
            }
        })
        .collect()
}

fn hausdorff(args: &[f64], e: &CircleSet) -> f64 {
    if args.is_empty() || e.is_empty() {
        return f64::INFINITY;
    }
    let to_e = args.iter().map(|t| e.angular_distance(*t)).fold(0.0, f64::max);
    let to_args = |t: f64| {
        let i = args.partition_point(|a| *a < t);
        let n = args.len();
        [args[i % n], args[(i + n - 1) % n]]
            .iter()
            .map(|a| {
                let d = (t - a).rem_euclid(TAU);
                d.min(TAU - d)
            })
            .fold(f64::INFINITY, f64::min)
    };
    // d(·, args) peaks at arc endpoints or midway between consecutive args
    let mut from_e = 0.0f64;
    for a in e.arcs() {
        from_e = from_e.max(to_args(a.start)).max(to_args(a.end()));
    }
    for w in 0..args.len() {
        let a = args[w];
        let b = if w + 1 < args.len() { args[w + 1] } else { args[0] + TAU };
        let mid = normalize_angle(0.5 * (a + b));
        if e.contains(mid) {
            from_e = from_e.max(to_args(mid));
        }
    }
    chord(to_e.max(from_e))
}

/// The doubly indexed sequence `z_{n,k}`, `n, k ≥ 2`, with
/// `1 - r_{n,k} = n^{-n} k^{-k}` and
/// `θ_{n,k} = ε_n + (ε_{n-1} - ε_n)/(2 (ln k)^{2/γ})`, `ε_n = n^{-(1+γ)/(1-γ)}`,
/// enumerated along anti-diagonals `n + k = 4, 5, …`; and
/// `E = {e^{iε_n} : n ≤ n_max + 1} ∪ {1}`.
#[derive(Debug, Clone)]
pub struct Example2 {
    pub sequence: ZeroSequence,
    pub set: CircleSet,
    pub gamma: f64,
    pub n_max: usize,
}

/// `(n, k)` of the `i`-th term in anti-diagonal order.
pub(crate) fn anti_diagonal(i: usize) -> (usize, usize) {
    let mut d = (((8 * i + 1) as f64).sqrt() as usize).saturating_sub(1) / 2;
    while d * (d + 1) / 2 > i {
        d -= 1;
    }
    while (d + 1) * (d + 2) / 2 <= i {
        d += 1;
    }
    let j = i - d * (d + 1) / 2;
    (2 + j, d + 2 - j)
}

fn epsilon(n: usize, exponent: f64) -> f64 {
    (n as f64).powf(-exponent)
}

pub fn example2_sequence(gamma: f64, count: usize) -> Result<Example2> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(domain("example2_sequence", format!("γ = {gamma} must lie in (0, 1)")));
    }
    if count == 0 {
        return Err(domain("example2_sequence", "count must be >= 1"));
    }
    let ex = (1.0 + gamma) / (1.0 - gamma);
    let n_max = (0..count).map(|i| anti_diagonal(i).0).max().unwrap_or(2);
    let mut points: Vec<f64> = (1..=n_max + 1).map(|n| epsilon(n, ex)).collect();
    points.push(0.0);
    let set = CircleSet::points(&points);
    let sequence = ZeroSequence::generated(format!("example2(γ={gamma})"), Some(count), move |i| {
        let (n, k) = anti_diagonal(i);
        let (nf, kf) = (n as f64, k as f64);
        let (en, em) = (epsilon(n, ex), epsilon(n - 1, ex));
        let theta = en + (em - en) / (2.0 * kf.ln().powf(2.0 / gamma));
        Zero::from_log_depth(-nf * nf.ln() - kf * kf.ln(), theta)
    });
    Ok(Example2 {
        sequence,
        set,
        gamma,
        n_max,
    })
}

/// Radii of the slowly approaching sequence: `|ln(1 - r_n)| = √n (ln(n + 2))²`.
pub fn remark_radii() -> ZeroSequence {
    ZeroSequence::generated("remark radii", None, |i| {
        let n = (i + 1) as f64;
        let l = (n + 2.0).ln();
        Zero::from_log_depth(-n.sqrt() * l * l, 0.0)
    })
}

/// Remark radii on rays through the endpoints of level `depth` of the Cantor
/// set with `ℓ_n = 2π e^{-2ⁿ/n^s}` (shifted to be valid), `s ∈ (0, 1]`.
pub fn remark_sequence(s: f64, depth: usize) -> Result<(ZeroSequence, CircleSet)> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(domain("remark_sequence", format!("s = {s} must lie in (0, 1]")));
    }
    let spec = CantorSpec::exp_power_valid(s, depth)?;
    let e = cantor_level(&spec, depth)?;
    Ok((assign_arguments(&remark_radii(), &e)?, e))
}

#[derive(Debug, Clone, Serialize)]
pub struct RemarkReport {
    /// `Σ (1 - r_n) ∫_{2(1-r_n)}^2 ω(t)/t² dt` with `ω = (ln 1/t)^{-2}`.
    pub blas: PartialSumSeries,
    pub shapiro_shields: PartialSumSeries,
    pub log_square: PartialSumSeries,
    pub omega_bound: RemarkBound,
    pub hausdorff: Vec<Hausdorff>,
}

pub fn remark_report(zs: &ZeroSequence, e: &CircleSet, n: usize) -> Result<RemarkReport> {
    let prefixes: Vec<usize> = [16usize, 256, 4096].into_iter().filter(|p| *p <= n).collect();
    Ok(RemarkReport {
        blas: blas_condition(zs, &ModulusOmega::LogSquare, n)?,
        shapiro_shields: shapiro_shields(zs, n)?,
        log_square: log_square_sum(zs, n)?,
        omega_bound: remark_omega_bound(1e-12, 4000)?,
        hausdorff: hausdorff_diagnostic(zs, e, &prefixes),
    })
}

/// `ln ρ` for the root `ρ < e^{-1}` of `ρ ln(1/ρ) = e^{log_target}`, by
/// bisection in `u = ln(1/ρ)` on `u - ln u = -log_target`.
pub fn prop2_depth(log_target: f64) -> Result<f64> {
    let c = -log_target;
    if !(c > 1.0) || !c.is_finite() {
        return Err(domain(
            "prop2_depth",
            format!("target e^{log_target} must lie in (0, e^-1)"),
        ));
    }
    let (mut lo, mut hi) = (1.0f64, 2.0 * c + 2.0);
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if mid - mid.ln() < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(-0.5 * (lo + hi))
}

/// Zeros at the centers of the level-`k` arcs, `k_min ≤ k ≤ K`, with
/// `(1-r) ln(1/(1-r)) = ℓ_k²`; levels with `ℓ_k² ≥ e^{-1}` are skipped.
/// Returns the sequence and `k_min`.
pub fn prop2_sequence(spec: &CantorSpec, levels: usize) -> Result<(ZeroSequence, usize)> {
    if levels > 40 {
        return Err(domain("prop2_sequence", "at most 40 levels are supported"));
    }
    if !spec.available(levels) {
        return Err(domain("prop2_sequence", format!("ℓ_{levels} is not defined")));
    }
    CantorSpec {
        depth: levels.max(1),
        ..spec.clone()
    }
    .validate()?;
    let k_min = (0..=levels)
        .find(|k| 2.0 * spec.log_ell(*k) < -1.0)
        .ok_or_else(|| domain("prop2_sequence", "no level has ℓ_k² < e^-1"))?;
    let depths: Vec<f64> = (0..=levels)
        .map(|k| if k < k_min { 0.0 } else { prop2_depth(2.0 * spec.log_ell(k)).unwrap_or(0.0) })
        .collect();
    let len = (1usize << (levels + 1)) - (1usize << k_min);
    let spec = spec.clone();
    let zs = ZeroSequence::generated(
        format!("interval centers, levels {k_min}..={levels}"),
        Some(len),
        move |i| {
            let j = i + (1usize << k_min);
            let k = (usize::BITS - 1 - j.leading_zeros()) as usize;
            let l = j - (1usize << k);
            Zero::from_log_depth(depths[k], spec.arc_center(k, l))
        },
    );
    Ok((zs, k_min))
}

/// Frostman sums at one point of the set, accumulated level by level.
#[derive(Debug, Clone, Serialize)]
pub struct FrostmanProbe {
    pub theta: f64,
    pub levels_used: usize,
    pub sum: f64,
    pub exceeds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Prop2Report {
    /// `sup ℓ_{k+1}/ℓ_k`, required below 1/2.
    pub sup_ratio: f64,
    pub ratio_holds: bool,
    /// `Σ 2^{-k} ln(1/ℓ_k)`, finite for positive capacity.
    pub capacity_series: PartialSumSeries,
    /// `Σ 1/ln(1/ℓ_k)`, required to diverge.
    pub log_series: PartialSumSeries,
    pub k_min: usize,
    pub levels: usize,
    pub terms: usize,
    pub blaschke: PartialSumSeries,
    /// `Σ_k 2^k ℓ_k²` over the used levels, which dominates the Blaschke sum.
    pub blaschke_majorant: PartialSumSeries,
    pub blaschke_dominated: bool,
    pub shapiro_shields: PartialSumSeries,
    /// `Σ (2 d(z, E))²` against the Cantor set itself.
    pub theorem1: PartialSumSeries,
    /// `(1/4) Σ (1 - r²)` over all levels up to `K`.
    pub lambda0: f64,
    /// Frostman partial sums over the terms used, at the first probe.
    pub frostman: PartialSumSeries,
    pub probes: Vec<FrostmanProbe>,
}

/// Verdicts of the positive-capacity construction with `levels = K` levels,
/// generic sums over the first `n` zeros and `probes` points of `E`.
pub fn prop2_report(spec: &CantorSpec, levels: usize, n: usize, probes: usize) -> Result<Prop2Report> {
    let (zs, k_min) = prop2_sequence(spec, levels)?;
    let top = 64.min(if spec.available(64) { 64 } else { spec.depth });
    let sup_ratio = (0..top)
        .map(|k| (spec.log_ell(k + 1) - spec.log_ell(k)).exp())
        .fold(0.0, f64::max);
    let crit = cantor_criteria(spec, crate::circle_sets::CANTOR_SERIES_TERMS)?;
    let log_terms: Vec<f64> = (1..=crate::circle_sets::CANTOR_SERIES_TERMS)
        .take_while(|k| spec.available(*k))
        .map(|k| spec.log_ell(k))
        .filter(|l| *l < 0.0)
        .map(|l| -1.0 / l)
        .collect();
    let log_series = PartialSumSeries::from_terms(log_terms.iter().copied(), log_terms.len())?;

    let terms = zs.count(n);
    let blaschke = blaschke_sum(&zs, n)?;
    let majorant: Vec<f64> = (k_min..=levels)
        .map(|k| (k as f64 * 2f64.ln() + 2.0 * spec.log_ell(k)).exp())
        .collect();
    let depth_of = |k: usize| prop2_depth(2.0 * spec.log_ell(k)).map(f64::exp);
    let mut dominated = true;
    let mut lam = crate::summation::CompensatedSum::new();
    for k in k_min..=levels {
        let rho = depth_of(k)?;
        dominated &= rho <= spec.ell(k).powi(2);
        lam.add((1u64 << k) as f64 * rho * (2.0 - rho));
    }
    let lambda0 = 0.25 * lam.value();
    let blaschke_majorant = PartialSumSeries::from_terms(majorant.iter().copied(), majorant.len())?;

    let deep = if spec.available(levels + 6) { levels + 6 } else { levels };
    let set = CantorSet::new(&CantorSpec {
        depth: deep,
        ..spec.clone()
    })?;
    let theorem1 = theorem1_sum(&zs, &set, &ModulusOmega::power(2.0)?, n)?;

    let probe_angles: Vec<f64> = (0..probes)
        .map(|j| spec.arc_start(levels, j * (1usize << levels) / probes.max(1)))
        .collect();
    let probes = frostman_probes(spec, k_min, levels, &probe_angles, 10.0 * lambda0);
    let frostman = frostman_sum(&zs, probe_angles.first().copied().unwrap_or(0.0), n)?;
    Ok(Prop2Report {
        sup_ratio,
        ratio_holds: sup_ratio < 0.5,
        capacity_series: crit.capacity,
        log_series,
        k_min,
        levels,
        terms,
        blaschke,
        blaschke_majorant,
        blaschke_dominated: dominated,
        shapiro_shields: shapiro_shields(&zs, n)?,
        theorem1,
        lambda0,
        frostman,
        probes,
    })
}

/// Exact level-by-level Frostman sums at each angle, stopping once a sum
/// exceeds `threshold`.
fn frostman_probes(spec: &CantorSpec, k_min: usize, levels: usize, angles: &[f64], threshold: f64) -> Vec<FrostmanProbe> {
    let mut out: Vec<FrostmanProbe> = angles
        .iter()
        .map(|t| FrostmanProbe {
            theta: *t,
            levels_used: 0,
            sum: 0.0,
            exceeds: false,
        })
        .collect();
    let mut starts = vec![0.0f64];
    for k in 1..=levels {
        let lk = spec.ell(k);
        let shift = spec.ell(k - 1) - lk;
        starts = starts.iter().flat_map(|a| [*a, a + shift]).collect();
        if k < k_min {
            continue;
        }
        if out.iter().all(|p| p.exceeds) {
            break;
        }
        let ld = match prop2_depth(2.0 * spec.log_ell(k)) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let half = 0.5 * lk;
        out.par_iter_mut().filter(|p| !p.exceeds).for_each(|p| {
            let level: f64 = crate::summation::pairwise(
                &starts
                    .iter()
                    .map(|a| Zero::from_log_depth(ld, a + half).poisson(p.theta))
                    .collect::<Vec<_>>(),
            );
            p.sum += level;
            p.levels_used = k;
            p.exceeds = p.sum > threshold;
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_sets::perfect_symmetric;
    use crate::series::Verdict;

    #[test]
    fn anti_diagonal_order() {
        let first: Vec<(usize, usize)> = (0..6).map(anti_diagonal).collect();
        assert_eq!(first, vec![(2, 2), (2, 3), (3, 2), (2, 4), (3, 3), (4, 2)]);
        for i in [1000usize, 123_456, 1 << 20] {
            let (n, k) = anti_diagonal(i);
            let d = n + k - 4;
            assert_eq!(d * (d + 1) / 2 + (n - 2), i);
        }
    }

    #[test]
    fn example2_values() {
        let ex = example2_sequence(0.3, 10).unwrap();
        let z = ex.sequence.get(0);
        assert!((z.depth() - 1.0 / 16.0).abs() < 1e-15);
        let e2 = 2f64.powf(-13.0 / 7.0);
        assert!(ex.set.contains(e2));
        assert!(example2_sequence(1.0, 10).is_err());
    }

    #[test]
    fn assigned_zeros_sit_over_endpoints() {
        let e = CircleSet::points(&[0.0, std::f64::consts::PI]);
        let zs = assign_arguments(&remark_radii(), &e).unwrap();
        for i in 0..50 {
            let z = zs.get(i);
            assert!(e.contains(z.theta));
            let d = super::super::log_distance(&z, &e);
            assert!((d - z.log_depth).abs() < 1e-12);
        }
        let h = hausdorff_diagnostic(&zs, &e, &[1, 1000]);
        assert!(h[0].distance > 1.9 && h[1].distance < 1e-12);
        assert!(assign_arguments(&remark_radii(), &CircleSet::full()).is_err());
    }

    #[test]
    fn prop2_root() {
        let ld = prop2_depth(1e-6f64.ln()).unwrap();
        let rho = ld.exp();
        assert!((rho * (1.0 / rho).ln() - 1e-6).abs() < 1e-18);
        assert!(rho > 5.9e-8 && rho < 6.1e-8);
        assert!(prop2_depth(-0.5).is_err());
    }

    #[test]
    fn prop2_small() {
        let spec = perfect_symmetric(1.0 / 3.0, 12).unwrap();
        let (zs, k_min) = prop2_sequence(&spec, 6).unwrap();
        assert_eq!(k_min, 3);
        assert_eq!(zs.len(), Some(128 - 8));
        let z = zs.get(8);
        assert!((z.theta - spec.arc_center(4, 0)).abs() < 1e-15);
        let r = prop2_report(&spec, 8, 1 << 9, 5).unwrap();
        assert!(r.ratio_holds && r.blaschke_dominated);
        assert_eq!(r.log_series.verdict, Verdict::Diverges);
        assert!(r.probes.iter().all(|p| p.exceeds));
    }
}
