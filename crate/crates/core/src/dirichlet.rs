//! Analytic functions on the disk as truncated power series.
//!
//! `D(f) = ∫_𝔻 |f'|² dA/π = Σ n|a_n|²`. Boundary data live on [`BoundaryGrid`]s
//! of `M = 2^k` equally spaced points `e^{2πij/M}`.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::{PI, TAU};

use crate::circle_sets::{chord, CircleSubset};
use crate::error::{domain, numeric, Error, Result};
use crate::quadrature::GaussLegendre;
use crate::summation::{pairwise, CompensatedSum};

/// `sup_{x ≥ 0} x² e^{-x}`, attained at `x = 2`.
pub const SATURATION_CONSTANT: f64 = 4.0 / (std::f64::consts::E * std::f64::consts::E);

/// Truncated Taylor series `Σ_{n ≤ N} a_n zⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
    /// Known radius of analyticity beyond the unit circle, if any.
    pub radius_hint: Option<f64>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let coeffs = if coeffs.is_empty() {
            vec![Complex64::new(0.0, 0.0)]
        } else {
            coeffs
        };
        Self {
            coeffs,
            radius_hint: None,
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|c| Complex64::new(*c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
        c[k] = Complex64::new(1.0, 0.0);
        Self::new(c)
    }

    pub fn with_radius_hint(mut self, r: f64) -> Self {
        self.radius_hint = Some(r);
        self
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Index of the last stored coefficient.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// `Σ n|a_n|²`.
    pub fn dirichlet_norm(&self) -> f64 {
        crate::summation::sum(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, a)| n as f64 * a.norm_sqr()),
        )
    }

    /// Partial sums `Σ_{n ≤ N} n|a_n|²` for `N = 0..=order`.
    pub fn dirichlet_partial_sums(&self) -> Vec<f64> {
        let mut acc = CompensatedSum::new();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| {
                acc.add(n as f64 * a.norm_sqr());
                acc.value()
            })
            .collect()
    }

    /// Horner evaluation of the truncated series on the closed disk.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() > 1.0 + 1e-12 {
            return Err(domain("evaluate", format!("|z| = {} > 1", z.norm())));
        }
        Ok(self.eval_unchecked(z))
    }

    fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
    }

    pub fn derivative(&self) -> PowerSeries {
        if self.coeffs.len() == 1 {
            return PowerSeries::constant(Complex64::new(0.0, 0.0));
        }
        PowerSeries::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, a)| a * n as f64)
                .collect(),
        )
    }

    pub fn scale(&self, c: Complex64) -> PowerSeries {
        PowerSeries::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Product truncated at degree `n`.
    pub fn mul_truncated(&self, other: &PowerSeries, n: usize) -> PowerSeries {
        let out: Vec<Complex64> = (0..=n)
            .into_par_iter()
            .map(|k| {
                let lo = k.saturating_sub(other.order());
                let hi = k.min(self.order());
                let mut s = Complex64::new(0.0, 0.0);
                for i in lo..=hi {
                    s += self.coeffs[i] * other.coeffs[k - i];
                }
                s
            })
            .collect();
        PowerSeries::new(out)
    }

    /// `exp(g)` truncated at degree `n`, from `m f_m = Σ_{k=1}^m k g_k f_{m-k}`.
    pub fn exp(&self, n: usize) -> Result<PowerSeries> {
        let g = &self.coeffs;
        let mut f = vec![Complex64::new(0.0, 0.0); n + 1];
        f[0] = g[0].exp();
        if !f[0].is_finite() {
            return Err(numeric("series exp", format!("exp(a_0) overflows for a_0 = {}", g[0])));
        }
        let kg: Vec<Complex64> = (0..=n.min(g.len() - 1)).map(|k| g[k] * k as f64).collect();
        for m in 1..=n {
            let top = m.min(kg.len() - 1);
            let mut s = Complex64::new(0.0, 0.0);
            for k in 1..=top {
                s += kg[k] * f[m - k];
            }
            f[m] = s / m as f64;
            if !f[m].is_finite() {
                return Err(numeric(
                    "series exp",
                    format!("coefficient {m} is not finite (partial sum {s})"),
                ));
            }
        }
        Ok(PowerSeries::new(f))
    }
}

impl Serialize for PowerSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PowerSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(PowerSeries::new(
            pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
        ))
    }
}

/// `∫_{|z|<radius} |h(z)|² dA/π` by Gauss–Legendre in the radius (weight r)
/// and the trapezoid rule in the angle.
pub fn area_integral<F>(h: F, radius: f64, radial_nodes: usize, angular_nodes: usize) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    if radial_nodes < 4 || angular_nodes < 4 {
        return Err(domain("dirichlet_area", "quadrature sizes must be >= 4"));
    }
    if !(radius > 0.0 && radius <= 1.0) {
        return Err(domain("dirichlet_area", format!("radius {radius} must lie in (0, 1]")));
    }
    let rule = GaussLegendre::new(radial_nodes);
    let nodes: Vec<(f64, f64)> = rule.mapped(0.0, radius).collect();
    let rings: Vec<f64> = nodes
        .par_iter()
        .map(|&(r, w)| {
            let vals: Vec<f64> = (0..angular_nodes)
                .map(|j| {
                    let z = Complex64::from_polar(r, TAU * j as f64 / angular_nodes as f64);
                    h(z).norm_sqr()
                })
                .collect();
            // (1/π) · 2π · mean · r dr
            2.0 * pairwise(&vals) / angular_nodes as f64 * r * w
        })
        .collect();
    Ok(pairwise(&rings))
}

/// Area form of the Dirichlet integral over the disk of radius `radius ≤ 1`.
pub fn dirichlet_area_radius(
    f: &PowerSeries,
    radius: f64,
    radial_nodes: usize,
    angular_nodes: usize,
) -> Result<f64> {
    let d = f.derivative();
    area_integral(|z| d.eval_unchecked(z), radius, radial_nodes, angular_nodes)
}

/// Area form of `D(f)` over the unit disk.
pub fn dirichlet_area(f: &PowerSeries, radial_nodes: usize, angular_nodes: usize) -> Result<f64> {
    dirichlet_area_radius(f, 1.0, radial_nodes, angular_nodes)
}

/// Samples at `e^{2πij/M}`, `M` a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGrid {
    values: Vec<f64>,
}

impl BoundaryGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let m = values.len();
        if m < 4 || !m.is_power_of_two() {
            return Err(domain("BoundaryGrid", format!("size {m} must be a power of two >= 4")));
        }
        Ok(Self { values })
    }

    pub fn from_fn<F: Fn(f64) -> f64 + Sync>(m: usize, f: F) -> Result<Self> {
        Self::new((0..m).into_par_iter().map(|j| f(TAU * j as f64 / m as f64)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn theta(&self, j: usize) -> f64 {
        TAU * j as f64 / self.values.len() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,value\n");
        for (j, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", crate::fmt_f64(self.theta(j)), crate::fmt_f64(*v)));
        }
        out
    }

    /// Discrete Fourier coefficients `ĉ_k = (1/M) Σ_j v_j e^{-2πijk/M}`.
    pub fn fourier_coefficients(&self) -> Vec<Complex64> {
        let m = self.values.len();
        let mut buf: Vec<Complex64> = self.values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        buf.into_iter().map(|c| c / m as f64).collect()
    }
}

/// `log σ(d(ζ_j, E))` for `σ(t) = t^α`, with distances below `2π/M` raised to
/// `2π/M`.
#[derive(Debug, Clone)]
pub struct ClippedLogModulus {
    pub grid: BoundaryGrid,
    pub clip: f64,
    pub clipped: usize,
    pub distances: Vec<f64>,
}

pub fn power_log_modulus<E: CircleSubset>(e: &E, m: usize, alpha: f64) -> Result<ClippedLogModulus> {
    if !(alpha > 0.0) {
        return Err(domain("power_log_modulus", format!("α = {alpha} must be > 0")));
    }
    let clip = TAU / m as f64;
    let distances: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|j| chord(e.angular_distance(TAU * j as f64 / m as f64)))
        .collect();
    let clipped = distances.iter().filter(|d| **d < clip).count();
    let grid = BoundaryGrid::new(distances.iter().map(|d| alpha * d.max(clip).ln()).collect())?;
    Ok(ClippedLogModulus {
        grid,
        clip,
        clipped,
        distances,
    })
}

/// Outer function with boundary log-modulus sampled on the grid:
/// `exp(ĉ_0 + 2 Σ_{n=1}^{N} ĉ_n zⁿ)` truncated at degree `N < M/2`.
pub fn outer_function(log_modulus: &BoundaryGrid, n: usize) -> Result<PowerSeries> {
    if let Some(j) = log_modulus.values.iter().position(|v| !v.is_finite()) {
        return Err(domain(
            "outer_function",
            format!("log-modulus sample {j} is not finite"),
        ));
    }
    let m = log_modulus.len();
    if 2 * n >= m {
        return Err(Error::Resolution {
            op: "outer_function",
            required: 2 * n + 2,
            actual: m,
        });
    }
    let c = log_modulus.fourier_coefficients();
    let mut g = Vec::with_capacity(n + 1);
    g.push(Complex64::new(c[0].re, 0.0));
    g.extend(c[1..=n].iter().map(|x| x * 2.0));
    PowerSeries::new(g).exp(n)
}

/// Output of [`saturating_composition`].
#[derive(Debug, Clone, Serialize)]
pub struct SaturatingComposition {
    pub series: PowerSeries,
    pub radius: f64,
    pub dirichlet_f: f64,
    pub dirichlet_phi: f64,
    /// `(4/e²) D(φ)`.
    pub bound: f64,
    pub holds: bool,
    /// `max |Im φ|` over the quadrature grid; the inequality is guaranteed
    /// when it is at most π/4.
    pub max_abs_im_phi: f64,
    pub hypothesis_holds: bool,
}

/// `f = exp(-(√2/2) e^φ)` with the check `D(f) ≤ (4/e²) D(φ)`, both sides in
/// area form over the disk of radius `radius`.
pub fn saturating_composition(
    phi: &PowerSeries,
    n: usize,
    radius: f64,
    slack: f64,
) -> Result<SaturatingComposition> {
    let c = -std::f64::consts::FRAC_1_SQRT_2;
    let series = phi.exp(n)?.scale(Complex64::new(c, 0.0)).exp(n)?;
    let dphi = phi.derivative();
    let (radial, angular) = (48, 4 * (phi.order() + 1).next_power_of_two().max(64));
    let fprime = |z: Complex64| {
        let p = phi.eval_unchecked(z);
        let e = p.exp();
        c * e * dphi.eval_unchecked(z) * (c * e).exp()
    };
    let dirichlet_f = area_integral(fprime, radius, radial, angular)?;
    let dirichlet_phi = area_integral(|z| dphi.eval_unchecked(z), radius, radial, angular)?;
    if !dirichlet_f.is_finite() {
        return Err(numeric("saturating_composition", "D(f) is not finite"));
    }
    let max_abs_im_phi = (0..=radial)
        .flat_map(|i| {
            let r = radius * i as f64 / radial as f64;
            (0..angular).map(move |j| Complex64::from_polar(r, TAU * j as f64 / angular as f64))
        })
        .map(|z| phi.eval_unchecked(z).im.abs())
        .fold(0.0, f64::max);
    let bound = SATURATION_CONSTANT * dirichlet_phi;
    Ok(SaturatingComposition {
        series,
        radius,
        dirichlet_f,
        dirichlet_phi,
        bound,
        holds: dirichlet_f <= bound + slack,
        max_abs_im_phi,
        hypothesis_holds: max_abs_im_phi <= PI / 4.0,
    })
}

/// `m_f(λ) = (2π/M) #{j : |v_j| > λ}`.
pub fn distribution_function(values: &BoundaryGrid, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(domain("distribution_function", format!("λ = {lambda} must be >= 0")));
    }
    let count = values.values.iter().filter(|v| v.abs() > lambda).count();
    Ok(TAU * count as f64 / values.len() as f64)
}

/// Both sides of `∫ log|f| |dζ| = ∫_1^∞ m_f(λ)/λ dλ` for `|f| ≥ 1`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LogIntegralCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Left side by the trapezoid rule on the grid; right side by integrating the
/// step function `m_f(λ)/λ` exactly between consecutive jump values.
pub fn log_integral_identity_check(values: &BoundaryGrid, lambda_max: f64) -> Result<LogIntegralCheck> {
    let m = values.len();
    let mut mods: Vec<f64> = values.values.iter().map(|v| v.abs()).collect();
    if let Some(v) = mods.iter().find(|v| !(**v >= 1.0)) {
        return Err(domain(
            "log_integral_identity_check",
            format!("|f| = {v} < 1 violates the hypothesis |f| >= 1"),
        ));
    }
    let top = mods.iter().copied().fold(1.0, f64::max);
    if lambda_max < top {
        return Err(domain(
            "log_integral_identity_check",
            format!("λ_max = {lambda_max} is below max |f| = {top}"),
        ));
    }
    let h = TAU / m as f64;
    let lhs = h * pairwise(&mods.iter().map(|v| v.ln()).collect::<Vec<_>>());
    mods.sort_by(f64::total_cmp);
    // on (mods[k-1], mods[k]) exactly m - k samples exceed λ
    let mut pieces = Vec::with_capacity(m);
    let mut prev = 1.0f64;
    for (k, v) in mods.iter().enumerate() {
        if *v > prev {
            pieces.push(h * (m - k) as f64 * (v / prev).ln());
            prev = *v;
        }
    }
    let rhs = pairwise(&pieces);
    Ok(LogIntegralCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn dirichlet_norm_examples() {
        assert_eq!(PowerSeries::monomial(7).dirichlet_norm(), 7.0);
        assert_eq!(PowerSeries::constant(c(3.0)).dirichlet_norm(), 0.0);
        let n = 1000;
        let mut a = vec![c(0.0)];
        a.extend((1..=n).map(|k| c(1.0 / k as f64)));
        let h: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
        assert!((PowerSeries::new(a).dirichlet_norm() - h).abs() < 1e-12);
    }

    #[test]
    fn area_form_matches_coefficients() {
        assert!((dirichlet_area(&PowerSeries::monomial(1), 8, 8).unwrap() - 1.0).abs() < 1e-14);
        assert!((dirichlet_area(&PowerSeries::monomial(2), 8, 8).unwrap() - 2.0).abs() < 1e-8);
        let f = PowerSeries::new(
            (0..=10)
                .map(|k| Complex64::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos()))
                .collect(),
        );
        let area = dirichlet_area(&f, 16, 64).unwrap();
        assert!((area - f.dirichlet_norm()).abs() < 1e-6);
        assert!(dirichlet_area(&f, 3, 64).is_err());
    }

    #[test]
    fn evaluation() {
        let f = PowerSeries::from_real(&[1.0, 1.0, 1.0]);
        assert_eq!(f.evaluate(c(0.0)).unwrap(), c(1.0));
        assert!(f.evaluate(c(1.5)).is_err());
        let e = PowerSeries::from_real(&[1.0, 1.0]).exp(30).unwrap();
        let ez = PowerSeries::monomial(1).exp(30).unwrap();
        assert!((ez.evaluate(c(1.0)).unwrap().re - std::f64::consts::E).abs() < 1e-14);
        assert!((e.coeff(0).re - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn outer_function_of_cosine_is_exponential() {
        let grid = BoundaryGrid::from_fn(256, f64::cos).unwrap();
        let f = outer_function(&grid, 32).unwrap();
        let mut fact = 1.0;
        for n in 0..=32 {
            if n > 0 {
                fact *= n as f64;
            }
            assert!((f.coeff(n) - c(1.0 / fact)).norm() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn outer_function_constant_and_errors() {
        let grid = BoundaryGrid::from_fn(64, |_| 3f64.ln()).unwrap();
        let f = outer_function(&grid, 10).unwrap();
        assert!((f.coeff(0) - c(3.0)).norm() < 1e-14);
        assert!(f.coeffs()[1..].iter().all(|a| a.norm() < 1e-14));
        assert!(matches!(outer_function(&grid, 32), Err(Error::Resolution { .. })));
        let bad = BoundaryGrid::new(vec![0.0, f64::NEG_INFINITY, 0.0, 0.0]).unwrap();
        assert!(outer_function(&bad, 1).is_err());
        assert!(BoundaryGrid::new(vec![0.0; 12]).is_err());
    }

    #[test]
    fn saturating_composition_constant_and_linear() {
        let zero = saturating_composition(&PowerSeries::constant(c(0.0)), 16, 0.999, 1e-8).unwrap();
        assert!((zero.series.coeff(0).re - (-std::f64::consts::FRAC_1_SQRT_2).exp()).abs() < 1e-15);
        assert!(zero.dirichlet_f.abs() < 1e-20);
        assert!(zero.holds);
        let lin = PowerSeries::new(vec![c(0.0), Complex64::new(0.3, 0.4)]);
        let s = saturating_composition(&lin, 64, 0.999, 1e-8).unwrap();
        assert!(s.hypothesis_holds);
        assert!(s.holds);
        assert!((s.dirichlet_phi - 0.25 * 0.999f64.powi(2)).abs() < 1e-10);
        assert!((SATURATION_CONSTANT - 4.0 * (-2.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn distribution_function_examples() {
        let two = BoundaryGrid::from_fn(64, |_| 2.0).unwrap();
        assert!((distribution_function(&two, 1.0).unwrap() - TAU).abs() < 1e-15);
        assert_eq!(distribution_function(&two, 3.0).unwrap(), 0.0);
        let half = BoundaryGrid::from_fn(64, |t| if t < PI { 2.0 } else { 1.0 }).unwrap();
        assert!((distribution_function(&half, 1.5).unwrap() - PI).abs() <= TAU / 64.0);
    }

    #[test]
    fn log_integral_identity() {
        let m = 1 << 14;
        let half = BoundaryGrid::from_fn(m, |t| if t < PI { 2.0 } else { 1.0 }).unwrap();
        let chk = log_integral_identity_check(&half, 2.0).unwrap();
        assert!((chk.lhs - PI * 2f64.ln()).abs() < 1e-12);
        assert!(chk.gap <= 1e-6);
        let one = BoundaryGrid::from_fn(m, |_| 1.0).unwrap();
        let z = log_integral_identity_check(&one, 1.0).unwrap();
        assert_eq!((z.lhs, z.rhs), (0.0, 0.0));
        let small = BoundaryGrid::from_fn(16, |_| 0.5).unwrap();
        assert!(log_integral_identity_check(&small, 1.0).is_err());
    }
}
