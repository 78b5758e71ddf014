//! Zero sequences in the disk, Blaschke products, Frostman sums and
//! Carleson's formula for the Dirichlet integral of `B·f`.
//!
//! A zero is stored as an angle and `ln(1 - r)` so that points with
//! `1 - r` far below machine epsilon keep their depth.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;
use std::sync::Arc as Shared;

use crate::capacity::ARC_CAPACITY_C1;
use crate::circle_sets::{chord_angle, normalize_angle, polar_distance, Arc, CircleSet};
use crate::dirichlet::{BoundaryGrid, PowerSeries};
use crate::error::{domain, numeric, Error, Result};
use crate::series::{PartialSumSeries, Verdict};
use crate::summation::pairwise;

/// Cover constant `c₂ = 4c₁` in `cap(I_z) ≤ c₂ / |log(1-|z|)|`.
pub const COVER_C2: f64 = 4.0 * ARC_CAPACITY_C1;

/// Grid rule for boundary integrals against Poisson kernels:
/// `M ≥ GRID_FACTOR / (1 - max r)`.
pub const GRID_FACTOR: f64 = 64.0;

/// A point `r e^{iθ}` of the open disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub theta: f64,
    /// `ln(1 - r)`, in `(-∞, 0]`.
    pub log_depth: f64,
}

impl Zero {
    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) || !theta.is_finite() {
            return Err(domain("Zero", format!("r = {r} must lie in [0, 1)")));
        }
        Ok(Self {
            theta: normalize_angle(theta),
            log_depth: (-r).ln_1p(),
        })
    }

    /// Zero with `1 - r = e^{log_depth}`.
    pub fn from_log_depth(log_depth: f64, theta: f64) -> Self {
        debug_assert!(log_depth <= 0.0);
        Self {
            theta: normalize_angle(theta),
            log_depth: log_depth.min(0.0),
        }
    }

    pub fn origin() -> Self {
        Self {
            theta: 0.0,
            log_depth: 0.0,
        }
    }

    /// `1 - r`.
    pub fn depth(&self) -> f64 {
        self.log_depth.exp()
    }

    pub fn r(&self) -> f64 {
        -self.log_depth.exp_m1()
    }

    /// `1 - r²`.
    pub fn one_minus_r2(&self) -> f64 {
        let d = self.depth();
        d * (2.0 - d)
    }

    pub fn point(&self) -> Complex64 {
        Complex64::from_polar(self.r(), self.theta)
    }

    /// `(1 - |z|²)/|e^{iφ} - z|²`.
    pub fn poisson(&self, phi: f64) -> f64 {
        let d = self.depth();
        let dist = polar_distance(d, phi - self.theta);
        d * (2.0 - d) / (dist * dist)
    }

    /// Blaschke factor `(|a|/a)(a - z)/(1 - ā z)`, or `z` at the origin.
    pub fn factor(&self, z: Complex64) -> Complex64 {
        let r = self.r();
        if r == 0.0 {
            return z;
        }
        let a = Complex64::from_polar(r, self.theta);
        let unit = Complex64::from_polar(1.0, -self.theta);
        unit * (a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z)
    }
}

type ZeroFn = dyn Fn(usize) -> Zero + Send + Sync;

/// An ordered sequence `z_1, z_2, …` of disk points, finite or generated on
/// demand. Indices are 0-based.
#[derive(Clone)]
pub struct ZeroSequence {
    generator: Shared<ZeroFn>,
    len: Option<usize>,
    provenance: String,
}

impl std::fmt::Debug for ZeroSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ZeroSequence")
            .field("len", &self.len)
            .field("provenance", &self.provenance)
            .finish()
    }
}

/// JSON form of a materialized prefix.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroSequenceJson {
    pub provenance: String,
    /// `[r, θ]` pairs.
    pub zeros: Vec<[f64; 2]>,
    /// `ln(1 - r)`, exact even where `r` rounds to 1.
    pub log_depth: Vec<f64>,
}

impl ZeroSequence {
    pub fn finite(zeros: Vec<Zero>, provenance: impl Into<String>) -> Self {
        let len = zeros.len();
        let zeros = Shared::new(zeros);
        Self {
            generator: Shared::new(move |n| zeros[n]),
            len: Some(len),
            provenance: provenance.into(),
        }
    }

    /// Finite sequence from `[r, θ]` pairs.
    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        let zeros = pairs
            .iter()
            .map(|[r, t]| Zero::from_polar(*r, *t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::finite(zeros, "explicit"))
    }

    pub fn generated<F>(provenance: impl Into<String>, len: Option<usize>, f: F) -> Self
    where
        F: Fn(usize) -> Zero + Send + Sync + 'static,
    {
        Self {
            generator: Shared::new(f),
            len,
            provenance: provenance.into(),
        }
    }

    pub fn get(&self, n: usize) -> Zero {
        (self.generator)(n)
    }

    /// `None` for an infinite sequence.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Option<usize> {
        self.len
    }

    pub fn is_finite(&self) -> bool {
        self.len.is_some()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Number of terms available among the first `n`.
    pub fn count(&self, n: usize) -> usize {
        self.len.map_or(n, |l| l.min(n))
    }

    pub fn materialize(&self, n: usize) -> Vec<Zero> {
        (0..self.count(n)).into_par_iter().map(|i| self.get(i)).collect()
    }

    pub fn to_json(&self, n: usize) -> ZeroSequenceJson {
        let zs = self.materialize(n);
        ZeroSequenceJson {
            provenance: self.provenance.clone(),
            zeros: zs.iter().map(|z| [z.r(), z.theta]).collect(),
            log_depth: zs.iter().map(|z| z.log_depth).collect(),
        }
    }

    /// Partial sums of `term(z_n)` over the first `n` zeros.
    pub fn series<F>(&self, n: usize, term: F) -> Result<PartialSumSeries>
    where
        F: Fn(&Zero) -> f64 + Sync,
    {
        let count = self.count(n);
        let values: Vec<f64> = (0..count)
            .into_par_iter()
            .map(|i| term(&self.get(i)))
            .collect();
        PartialSumSeries::from_terms(values, n)
    }
}

/// `Σ (1 - r_n)`.
pub fn blaschke_sum(z: &ZeroSequence, n: usize) -> Result<PartialSumSeries> {
    if n == 0 {
        return Err(domain("blaschke_sum", "N must be >= 1"));
    }
    z.series(n, Zero::depth)
}

/// `Σ 1/|log(1 - r_n)|`.
pub fn shapiro_shields(z: &ZeroSequence, n: usize) -> Result<PartialSumSeries> {
    let count = z.count(n);
    let terms: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| z.get(i).log_depth)
        .collect::<Vec<_>>()
        .into_iter()
        .map(|l| 1.0 / l.abs())
        .collect();
    if let Some(i) = terms.iter().position(|t| !t.is_finite()) {
        return Err(domain(
            "shapiro_shields",
            format!("zero {i} has r = 0, so log(1 - r) = 0"),
        ));
    }
    PartialSumSeries::from_terms(terms, n)
}

/// `Π_{n ≤ N} b_{z_n}(z)` for `|z| < 1`.
pub fn evaluate_product(zs: &ZeroSequence, z: Complex64, n: usize) -> Result<Complex64> {
    if !(z.norm() < 1.0) {
        return Err(domain("evaluate_product", format!("|z| = {} >= 1", z.norm())));
    }
    Ok(zs
        .materialize(n)
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, a| acc * a.factor(z)))
}

/// `Σ (1 - |z_n|²)/|ζ - z_n|²` at `ζ = e^{iφ}`.
pub fn frostman_sum(zs: &ZeroSequence, phi: f64, n: usize) -> Result<PartialSumSeries> {
    zs.series(n, |z| z.poisson(phi))
}

/// `(1/4) Σ_{n ≤ N} (1 - r_n²)`, a lower bound for the Frostman sum at every
/// boundary point.
pub fn lambda0(zs: &ZeroSequence, n: usize) -> f64 {
    let terms: Vec<f64> = zs.materialize(n).iter().map(Zero::one_minus_r2).collect();
    0.25 * pairwise(&terms)
}

/// Frostman partial sums over the first `n` zeros at `e^{2πij/M}`.
pub fn frostman_on_grid(zs: &ZeroSequence, m: usize, n: usize) -> Vec<f64> {
    let zeros = zs.materialize(n);
    (0..m)
        .into_par_iter()
        .map(|j| {
            let phi = TAU * j as f64 / m as f64;
            let terms: Vec<f64> = zeros.iter().map(|z| z.poisson(phi)).collect();
            pairwise(&terms)
        })
        .collect()
}

/// Grid estimate of `𝓔_λ(Z) = {ζ : Σ (1-|z_n|²)/|ζ-z_n|² ≥ λ}`.
#[derive(Debug, Clone, Serialize)]
pub struct LevelSet {
    pub lambda: f64,
    pub measure: f64,
    pub grid_points: usize,
    #[serde(skip)]
    pub flagged: CircleSet,
}

pub fn exceptional_level_set(zs: &ZeroSequence, lambda: f64, m: usize, n: usize) -> Result<LevelSet> {
    if !(lambda > 0.0) {
        return Err(domain("exceptional_level_set", format!("λ = {lambda} must be > 0")));
    }
    let sums = frostman_on_grid(zs, m, n);
    Ok(level_set_from_grid(&sums, lambda))
}

/// [`LevelSet`] from precomputed grid sums.
pub fn level_set_from_grid(sums: &[f64], lambda: f64) -> LevelSet {
    let m = sums.len();
    let h = TAU / m as f64;
    let hits: Vec<usize> = (0..m).filter(|j| sums[*j] >= lambda).collect();
    let flagged = CircleSet::from_arcs(hits.iter().map(|j| Arc {
        start: normalize_angle((*j as f64 - 0.5) * h),
        length: h,
    }));
    LevelSet {
        lambda,
        measure: h * hits.len() as f64,
        grid_points: m,
        flagged,
    }
}

fn required_grid(zeros: &[Zero]) -> usize {
    let min_depth = zeros.iter().map(|z| z.depth()).fold(1.0, f64::min);
    (GRID_FACTOR / min_depth).ceil() as usize
}

/// `(1/2π) ∫ Σ_n P_{z_n}(ζ) |f(ζ)|² |dζ|` by the trapezoid rule, where the
/// grid holds `f(e^{2πij/M})` (only the modulus is used).
pub fn carleson_rhs(zs: &ZeroSequence, f_boundary: &BoundaryGrid, n: usize) -> Result<f64> {
    let zeros = zs.materialize(n);
    let m = f_boundary.len();
    let required = required_grid(&zeros);
    if m < required {
        return Err(Error::Resolution {
            op: "carleson_rhs",
            required,
            actual: m,
        });
    }
    let vals = f_boundary.values();
    let terms: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|j| {
            let phi = TAU * j as f64 / m as f64;
            let p: Vec<f64> = zeros.iter().map(|z| z.poisson(phi)).collect();
            pairwise(&p) * vals[j] * vals[j]
        })
        .collect();
    Ok(pairwise(&terms) / m as f64)
}

/// Taylor coefficients of the finite Blaschke product up to degree `t`.
fn product_series(zeros: &[Zero], t: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); t + 1];
    c[0] = Complex64::new(1.0, 0.0);
    for z in zeros {
        let r = z.r();
        if r == 0.0 {
            c.rotate_right(1);
            c[0] = Complex64::new(0.0, 0.0);
            continue;
        }
        let a = Complex64::from_polar(r, z.theta);
        let ac = a.conj();
        // divide by (1 - ā z)
        for k in 1..=t {
            let prev = c[k - 1];
            c[k] += ac * prev;
        }
        // multiply by (a - z), then by |a|/a
        let unit = Complex64::from_polar(1.0, -z.theta);
        for k in (0..=t).rev() {
            let lower = if k > 0 { c[k - 1] } else { Complex64::new(0.0, 0.0) };
            c[k] = unit * (a * c[k] - lower);
        }
    }
    c
}

/// Both sides of Carleson's formula `D(Bf) = D(f) + (1/2π)∫ Σ P_{z_n} |f|²`.
#[derive(Debug, Clone, Serialize)]
pub struct CarlesonCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_error: f64,
    pub dirichlet_f: f64,
    pub boundary_term: f64,
    pub truncation: usize,
    pub grid: usize,
}

pub fn carleson_check(zs: &ZeroSequence, f: &PowerSeries) -> Result<CarlesonCheck> {
    carleson_check_on_grid(zs, f, None)
}

/// [`carleson_check`] with the boundary grid size `m` fixed instead of
/// chosen from the zeros and the degree of `f`.
pub fn carleson_check_on_grid(zs: &ZeroSequence, f: &PowerSeries, m: Option<usize>) -> Result<CarlesonCheck> {
    let n = zs
        .len()
        .ok_or_else(|| domain("carleson_check", "the zero sequence must be finite"))?;
    let zeros = zs.materialize(n);
    let r_max = zeros.iter().map(Zero::r).fold(0.0, f64::max);
    let b_len = if r_max == 0.0 {
        zeros.len() + 1
    } else {
        ((1e-18f64).ln() / r_max.ln()).ceil() as usize + zeros.len() + 16
    };
    let mut t = b_len.max(16).next_power_of_two();
    let b = loop {
        let b = product_series(&zeros, t);
        let max = b.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tail = b[t.saturating_sub(16)..].iter().map(|c| c.norm()).fold(0.0, f64::max);
        if tail <= 1e-18 * max || r_max == 0.0 {
            break b;
        }
        t *= 2;
        if t > 1 << 22 {
            return Err(numeric(
                "carleson_check",
                "Blaschke coefficients do not decay within 2^22 terms",
            ));
        }
    };
    let bf = PowerSeries::new(b).mul_truncated(f, t + f.order());
    let lhs = bf.dirichlet_norm();
    let dirichlet_f = f.dirichlet_norm();
    let m = m.unwrap_or_else(|| {
        required_grid(&zeros)
            .max(8 * (f.order() + 1))
            .max(256)
            .next_power_of_two()
    });
    let grid = BoundaryGrid::from_fn(m, |phi| {
        f.evaluate(Complex64::from_polar(1.0, phi))
            .map(|v| v.norm())
            .unwrap_or(f64::NAN)
    })?;
    let boundary_term = carleson_rhs(zs, &grid, n)?;
    let rhs = dirichlet_f + boundary_term;
    let rel_error = if lhs > 0.0 {
        (lhs - rhs).abs() / lhs
    } else {
        (lhs - rhs).abs()
    };
    Ok(CarlesonCheck {
        lhs,
        rhs,
        rel_error,
        dirichlet_f,
        boundary_term,
        truncation: t,
        grid: m,
    })
}

/// Arc centered at `z/|z|` with chord length `((1-|z|) log 1/(1-|z|))^{1/2}`.
pub fn frostman_arc(z: &Zero) -> Result<Arc> {
    if !(z.log_depth < 0.0) {
        return Err(domain("frostman_arc", "z = 0 has no direction"));
    }
    let rho_log = z.depth() * (-z.log_depth);
    if rho_log > 4.0 {
        return Err(domain("frostman_arc", "chord length would exceed 2"));
    }
    let angle = chord_angle(rho_log.sqrt());
    Arc::new(z.theta - 0.5 * angle, angle)
}

/// Tail of the capacity cover `Σ_{N_start ≤ n < N} c₂/|log(1 - r_n)|`.
#[derive(Debug, Clone, Serialize)]
pub struct CoverBound {
    pub n_start: usize,
    pub n_end: usize,
    pub value: f64,
    pub shapiro_shields: Verdict,
    /// Without a convergent Shapiro–Shields sum the bound says nothing.
    pub vacuous: bool,
}

/// Cover bounds for each start index in `starts`, over the first `n` zeros.
pub fn exceptional_cover_bound(zs: &ZeroSequence, starts: &[usize], n: usize) -> Result<Vec<CoverBound>> {
    let ss = shapiro_shields(zs, n)?;
    let count = zs.count(n);
    let terms: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| COVER_C2 / zs.get(i).log_depth.abs())
        .collect();
    // suffix sums, accumulated from the small end
    let mut suffix = vec![0.0; count + 1];
    let mut acc = crate::summation::CompensatedSum::new();
    for i in (0..count).rev() {
        acc.add(terms[i]);
        suffix[i] = acc.value();
    }
    let vacuous = ss.verdict != Verdict::Converges;
    Ok(starts
        .iter()
        .map(|&s| CoverBound {
            n_start: s,
            n_end: count,
            value: suffix[s.min(count)],
            shapiro_shields: ss.verdict,
            vacuous,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric() -> ZeroSequence {
        ZeroSequence::generated("geometric", None, |i| {
            Zero::from_log_depth(-((i + 1) as f64) * std::f64::consts::LN_2, 0.7 * i as f64)
        })
    }

    #[test]
    fn zero_accessors() {
        let z = Zero::from_polar(0.75, 1.0).unwrap();
        assert!((z.depth() - 0.25).abs() < 1e-15);
        assert!((z.r() - 0.75).abs() < 1e-15);
        assert!(Zero::from_polar(1.0, 0.0).is_err());
        let deep = Zero::from_log_depth(-100.0, 0.0);
        assert_eq!(deep.r(), 1.0);
        assert!(deep.depth() > 0.0);
    }

    #[test]
    fn blaschke_sums() {
        let s = blaschke_sum(&geometric(), 1 << 12).unwrap();
        assert!((s.total() - 1.0).abs() < 1e-12);
        assert_eq!(s.verdict, Verdict::Converges);
        let harmonic = ZeroSequence::generated("harmonic", None, |i| {
            Zero::from_polar(1.0 - 1.0 / (i + 1) as f64, 0.0).unwrap()
        });
        assert_eq!(blaschke_sum(&harmonic, 1 << 16).unwrap().verdict, Verdict::Diverges);
    }

    #[test]
    fn product_examples() {
        let a = Zero::from_polar(0.5, 0.3).unwrap();
        let z = ZeroSequence::finite(vec![a], "one");
        assert!(evaluate_product(&z, a.point(), 1).unwrap().norm() < 1e-15);
        assert!((evaluate_product(&z, Complex64::new(0.0, 0.0), 1).unwrap().norm() - 0.5).abs() < 1e-15);
        let origin = ZeroSequence::finite(vec![Zero::origin()], "origin");
        let w = Complex64::new(0.2, -0.4);
        assert_eq!(evaluate_product(&origin, w, 1).unwrap(), w);
        assert!(evaluate_product(&z, Complex64::new(1.0, 0.0), 1).is_err());
    }

    #[test]
    fn frostman_examples() {
        let origin = ZeroSequence::finite(vec![Zero::origin()], "origin");
        assert!((frostman_sum(&origin, 2.0, 1).unwrap().total() - 1.0).abs() < 1e-15);
        let r = 0.9;
        let aligned = ZeroSequence::finite(vec![Zero::from_polar(r, 1.0).unwrap()], "aligned");
        let v = frostman_sum(&aligned, 1.0, 1).unwrap().total();
        assert!((v - (1.0 + r) / (1.0 - r)).abs() < 1e-12);
        assert!((lambda0(&origin, 1) - 0.25).abs() < 1e-16);
        let l = lambda0(&geometric(), 200);
        assert!(l > 0.25 && l < 0.5);
    }

    #[test]
    fn level_sets_for_origin() {
        let origin = ZeroSequence::finite(vec![Zero::origin()], "origin");
        let a = exceptional_level_set(&origin, 0.5, 64, 1).unwrap();
        assert!((a.measure - TAU).abs() < 1e-12);
        let b = exceptional_level_set(&origin, 2.0, 64, 1).unwrap();
        assert_eq!(b.measure, 0.0);
    }

    #[test]
    fn carleson_rhs_counts_zeros() {
        let zs = ZeroSequence::from_pairs(&[[0.0, 0.0], [0.6, 1.0], [0.8, 4.0]]).unwrap();
        let ones = BoundaryGrid::from_fn(1024, |_| 1.0).unwrap();
        assert!((carleson_rhs(&zs, &ones, 3).unwrap() - 3.0).abs() < 1e-12);
        let coarse = BoundaryGrid::from_fn(64, |_| 1.0).unwrap();
        assert!(matches!(carleson_rhs(&zs, &coarse, 3), Err(Error::Resolution { required: 320, .. })));
    }

    #[test]
    fn carleson_check_examples() {
        let origin = ZeroSequence::finite(vec![Zero::origin()], "origin");
        let c = carleson_check(&origin, &PowerSeries::monomial(1)).unwrap();
        assert!((c.lhs - 2.0).abs() < 1e-14 && (c.rhs - 2.0).abs() < 1e-12);
        let zs = ZeroSequence::from_pairs(&[
            [0.5, 0.0],
            [0.3, std::f64::consts::FRAC_PI_2],
            [0.7, std::f64::consts::PI],
        ])
        .unwrap();
        let one = carleson_check(&zs, &PowerSeries::from_real(&[1.0])).unwrap();
        assert!((one.lhs - 3.0).abs() < 1e-8);
        let chk = carleson_check(&zs, &PowerSeries::from_real(&[1.0, 0.0, 1.0])).unwrap();
        assert!(chk.rel_error <= 1e-6, "{chk:?}");
    }

    #[test]
    fn frostman_arc_lengths() {
        let z = Zero::from_log_depth(-4.0, 1.0);
        let arc = frostman_arc(&z).unwrap();
        assert!((arc.chord_length() - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!((arc.midpoint() - 1.0).abs() < 1e-15);
        let w = Zero::from_log_depth(-16.0, 0.0);
        assert!((frostman_arc(&w).unwrap().chord_length() - 4.0 * (-8.0f64).exp()).abs() < 1e-17);
        assert!(frostman_arc(&Zero::origin()).is_err());
    }

    #[test]
    fn cover_bound_tails() {
        let zs = ZeroSequence::generated("exp_square", None, |i| {
            let n = (i + 1) as f64;
            Zero::from_log_depth(-n * n, 0.0)
        });
        let b = exceptional_cover_bound(&zs, &[0, 10, 100, 1000], 1 << 12).unwrap();
        assert!(!b[0].vacuous);
        for w in b.windows(2) {
            assert!(w[1].value < w[0].value);
        }
        // Σ_{n > 100} c₂/n² < c₂/100
        assert!(b[2].value < COVER_C2 / 100.0);
        let harmonic = ZeroSequence::generated("exp_linear", None, |i| {
            Zero::from_log_depth(-((i + 1) as f64), 0.0)
        });
        assert!(exceptional_cover_bound(&harmonic, &[0], 1 << 14).unwrap()[0].vacuous);
    }

    #[test]
    fn shapiro_shields_examples() {
        let zs = ZeroSequence::generated("exp_square", None, |i| {
            let n = (i + 1) as f64;
            Zero::from_log_depth(-n * n, 0.0)
        });
        let s = shapiro_shields(&zs, 1 << 16).unwrap();
        assert!((s.total() - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-4);
        assert_eq!(s.verdict, Verdict::Converges);
        let origin = ZeroSequence::finite(vec![Zero::origin()], "origin");
        assert!(shapiro_shields(&origin, 1).is_err());
    }
}
