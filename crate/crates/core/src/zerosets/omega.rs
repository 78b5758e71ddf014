//! Moduli of continuity `ω: [0, 2] → [0, ∞)` and the decay profiles `ψ`
//! that turn capacity curves into moduli.
//!
//! Every modulus is handled through `ln ω̃(u) = ln ω(e^{-u})`, which stays
//! finite where `ω` itself underflows.

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::capacity::{Capacity, CurvePoint};
use crate::error::{domain, Result};
use crate::quadrature::{adaptive, AdaptiveOptions};

/// `u = -ln 2`, the top of the domain `t ≤ 2`.
const U_TOP: f64 = -LN_2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModulusOmega {
    /// `t^p`.
    Power { exponent: f64 },
    /// `exp(-2/t^γ)`.
    ExpInv { gamma: f64 },
    /// `exp(-(ln ln 1/t)²)` for `t < 1/e`, `1` above.
    ExpExpEta,
    /// `(ln 1/t)^{-2}` for `t < 1/e`, `1` above.
    LogSquare,
    /// Piecewise linear through `(0, 0)` and the samples, constant past the
    /// last sample.
    Tabulated { t: Vec<f64>, omega: Vec<f64> },
    /// `exp(-e^{η(t)})` with `η = ψ^{-1}(cap(E_t))`, `cap` interpolated
    /// linearly (and linearly down to 0 below the first sample).
    CapacityDerived {
        t: Vec<f64>,
        cap: Vec<f64>,
        psi: DecayProfile,
    },
}

impl ModulusOmega {
    pub fn power(exponent: f64) -> Result<Self> {
        Self::Power { exponent }.validated()
    }

    pub fn exp_inv(gamma: f64) -> Result<Self> {
        Self::ExpInv { gamma }.validated()
    }

    pub fn tabulated(t: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        Self::Tabulated { t, omega }.validated()
    }

    /// Checks parameters, then monotonicity on a logarithmic grid of `[1e-300, 2]`.
    pub fn validated(self) -> Result<Self> {
        let op = "ModulusOmega";
        match &self {
            Self::Power { exponent } if !(*exponent > 0.0 && exponent.is_finite()) => {
                return Err(domain(op, format!("exponent {exponent} must be positive")));
            }
            Self::ExpInv { gamma } if !(*gamma > 0.0 && gamma.is_finite()) => {
                return Err(domain(op, format!("γ = {gamma} must be positive")));
            }
            Self::Tabulated { t, omega } => {
                check_samples(op, t, omega)?;
                if !omega.windows(2).all(|w| w[0] <= w[1]) {
                    return Err(domain(op, "tabulated ω must be nondecreasing"));
                }
            }
            Self::CapacityDerived { t, cap, psi } => {
                check_samples(op, t, cap)?;
                psi.validate()?;
            }
            _ => {}
        }
        let mut prev = 0.0;
        for i in 0..=300 {
            let t = 2.0 * 10f64.powf(-(300 - i) as f64);
            let w = self.eval(t);
            if !(w >= prev * (1.0 - 1e-12)) || !w.is_finite() {
                return Err(domain(op, format!("ω is not nondecreasing near t = {t:e}")));
            }
            prev = w;
        }
        Ok(self)
    }

    /// `ln ω(e^{-u})`, with `u` clipped to `u ≥ -ln 2`.
    pub fn ln_omega_u(&self, u: f64) -> f64 {
        let u = u.max(U_TOP);
        match self {
            Self::Power { exponent } => -exponent * u,
            Self::ExpInv { gamma } => -2.0 * (gamma * u).exp(),
            Self::ExpExpEta => {
                if u > 1.0 {
                    let l = u.ln();
                    -l * l
                } else {
                    0.0
                }
            }
            Self::LogSquare => {
                if u > 1.0 {
                    -2.0 * u.ln()
                } else {
                    0.0
                }
            }
            Self::Tabulated { t, omega } => ln_interp(t, omega, u),
            Self::CapacityDerived { t, cap, psi } => {
                let eta = psi.inverse_ln(ln_interp(t, cap, u));
                -eta.exp()
            }
        }
    }

    /// `ω(t)` with `t` clipped to `[0, 2]`.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.ln_omega_u(-t.ln()).exp()
    }

    /// Kinks of `ω̃` in `u`.
    fn u_breakpoints(&self) -> Vec<f64> {
        match self {
            Self::ExpExpEta | Self::LogSquare => vec![1.0],
            Self::Tabulated { t, .. } | Self::CapacityDerived { t, .. } => {
                t.iter().map(|x| -x.ln()).collect()
            }
            _ => Vec::new(),
        }
    }

    /// `∫_x^2 ω(t)/t² dt`.
    pub fn tail_integral(&self, x: f64) -> f64 {
        self.scaled_tail_integrals(&[(0.0, x.ln())])[0]
    }

    /// For each `(ln s, ln x)` returns `s ∫_x^2 ω(t)/t² dt`.
    ///
    /// With `u = ln(1/t)` and `U = ln(1/x)` the integral is `e^U G(U)` where
    /// `G(U) = ∫_{-ln 2}^{U} e^{u-U} ω̃(u) du`. `G` is carried as `ln G`, so
    /// nothing underflows even when `x` and `ω(x)` do, and is advanced once
    /// over each gap between sorted `U`s:
    /// `G(U') = e^{U-U'} G(U) + ∫_U^{U'} e^{u-U'} ω̃(u) du`.
    pub fn scaled_tail_integrals(&self, items: &[(f64, f64)]) -> Vec<f64> {
        let mut order: Vec<usize> = (0..items.len()).collect();
        let big_u = |i: usize| (-items[i].1).max(U_TOP);
        order.sort_by(|&i, &j| big_u(i).total_cmp(&big_u(j)));
        let mut bps = self.u_breakpoints();
        bps.sort_by(f64::total_cmp);
        let opts = AdaptiveOptions {
            abs_tol: 1e-300,
            rel_tol: 1e-11,
            max_intervals: 400,
        };
        let mut out = vec![0.0; items.len()];
        let (mut u_prev, mut ln_g) = (U_TOP, f64::NEG_INFINITY);
        for &i in &order {
            let u = big_u(i);
            if u > u_prev {
                let expo = |v: f64| v - u + self.ln_omega_u(v);
                // scale by the larger endpoint exponent to keep the piece in range
                let c = expo(u_prev).max(expo(u));
                let lo = bps.partition_point(|b| *b <= u_prev);
                let hi = bps.partition_point(|b| *b < u);
                let piece = if c == f64::NEG_INFINITY {
                    0.0
                } else {
                    adaptive(|v| (expo(v) - c).exp(), u_prev, u, &bps[lo..hi.max(lo)], opts).value
                };
                ln_g = super::ln_add_exp(ln_g + u_prev - u, c + piece.ln());
                u_prev = u;
            }
            let (ls, _) = items[i];
            out[i] = (ls + u + ln_g).exp();
        }
        out
    }
}

fn check_samples(op: &'static str, t: &[f64], v: &[f64]) -> Result<()> {
    if t.is_empty() || t.len() != v.len() {
        return Err(domain(op, "sample arrays must be nonempty and of equal length"));
    }
    if !t.windows(2).all(|w| w[0] < w[1]) || !(t[0] > 0.0) || t[t.len() - 1] > 2.0 {
        return Err(domain(op, "sample abscissae must increase within (0, 2]"));
    }
    if v.iter().any(|x| !(*x >= 0.0)) {
        return Err(domain(op, "sample values must be >= 0"));
    }
    Ok(())
}

/// `ln f(e^{-u})` for the piecewise linear `f` through `(0, 0)` and `(t_i, v_i)`.
fn ln_interp(t: &[f64], v: &[f64], u: f64) -> f64 {
    let n = t.len();
    if u >= -t[0].ln() {
        // f(x) = v_0 x / t_0, exact in log form for tiny x
        return (v[0] / t[0]).ln() - u;
    }
    let x = (-u).exp();
    if x >= t[n - 1] {
        return v[n - 1].ln();
    }
    let k = t.partition_point(|s| *s <= x);
    let (t0, t1, v0, v1) = (t[k - 1], t[k], v[k - 1], v[k]);
    (v0 + (v1 - v0) * (x - t0) / (t1 - t0)).ln()
}

/// A positive, strictly decreasing `ψ` on `[1, ∞)` with `∫^∞ ψ(x) x dx < ∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DecayProfile {
    /// `x^{-p}`, `p > 2`.
    Power { p: f64 },
    /// `x^{-p} (1 + ln x)^{-q}`, with `p > 2`, or `p = 2` and `q > 1`.
    PowerLog { p: f64, q: f64 },
}

impl DecayProfile {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Power { p } => p > 2.0 && p.is_finite(),
            Self::PowerLog { p, q } => q >= 0.0 && (p > 2.0 || (p == 2.0 && q > 1.0)) && p.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(domain("DecayProfile", format!("{self:?} has ∫ ψ(x) x dx = ∞")))
        }
    }

    fn ln_psi(&self, x: f64) -> f64 {
        match *self {
            Self::Power { p } => -p * x.ln(),
            Self::PowerLog { p, q } => -p * x.ln() - q * (1.0 + x.ln()).ln(),
        }
    }

    pub fn psi(&self, x: f64) -> f64 {
        self.ln_psi(x).exp()
    }

    /// `ψ^{-1}(e^{ly})`; values at or above `ψ(1) = 1` map to 1.
    pub fn inverse_ln(&self, ly: f64) -> f64 {
        if ly >= 0.0 {
            return 1.0;
        }
        if ly == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        match *self {
            Self::Power { p } => (-ly / p).exp(),
            Self::PowerLog { p, .. } => {
                // ψ ≤ x^{-p} brackets the root below (-ly/p).exp()
                let mut lo = 0.0f64;
                let mut hi = -ly / p;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.ln_psi(mid.exp()) > ly {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-15 * hi.max(1.0) {
                        break;
                    }
                }
                (0.5 * (lo + hi)).exp()
            }
        }
    }

    pub fn inverse(&self, y: f64) -> f64 {
        self.inverse_ln(y.ln())
    }

    /// `∫_1^∞ ψ(x) x dx`.
    pub fn first_moment(&self) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            Self::Power { p } => 1.0 / (p - 2.0),
            Self::PowerLog { p: 2.0, q } => 1.0 / (q - 1.0),
            Self::PowerLog { .. } => {
                // x = e^v: ∫_0^∞ e^{2v} ψ(e^v) dv, integrand decays like e^{(2-p)v}
                let f = |v: f64| (2.0 * v + self.ln_psi(v.exp())).exp();
                let cut = 60.0;
                let head = adaptive(f, 0.0, cut, &[], AdaptiveOptions::default()).value;
                head + f(cut) / (self.p() - 2.0)
            }
        })
    }

    fn p(&self) -> f64 {
        match *self {
            Self::Power { p } | Self::PowerLog { p, .. } => p,
        }
    }
}

/// Outcome of [`omega_regularity`].
#[derive(Debug, Clone, Serialize)]
pub struct Regularity {
    pub deltas: Vec<f64>,
    /// `R(δ) = ∫_δ^2 ω/t² / (1 + ω(δ)/δ)`.
    pub ratios: Vec<f64>,
    pub sup_ratio: f64,
    /// Least-squares slope of `R` against `ln(1/δ)` over the last two decades.
    pub slope: f64,
    pub pass: bool,
}

/// Default grid `10^{-1}, 10^{-1.25}, …, 10^{-8}`.
pub fn default_delta_grid() -> Vec<f64> {
    (4..=32).map(|k| 10f64.powf(-(k as f64) / 4.0)).collect()
}

/// Tests `∫_δ^2 ω(t)/t² dt = O(1 + ω(δ)/δ)` on a decreasing grid: passes when
/// `R` shows no growth trend in `ln(1/δ)` over the last two decades
/// (slope at most `0.01 · max(R, 1)`).
pub fn omega_regularity(omega: &ModulusOmega, deltas: &[f64]) -> Result<Regularity> {
    let op = "omega_regularity";
    if deltas.len() < 3 || !deltas.windows(2).all(|w| w[0] > w[1]) || !(deltas[deltas.len() - 1] > 0.0) {
        return Err(domain(op, "δ grid must be positive, strictly decreasing, with >= 3 points"));
    }
    let last = deltas[deltas.len() - 1];
    if last > 1e-6 || deltas[0] > 2.0 {
        return Err(domain(op, "δ grid must lie in (0, 2] and reach 1e-6"));
    }
    let items: Vec<(f64, f64)> = deltas.iter().map(|d| (0.0, d.ln())).collect();
    let tails = omega.scaled_tail_integrals(&items);
    let ratios: Vec<f64> = deltas
        .iter()
        .zip(&tails)
        .map(|(d, j)| j / (1.0 + omega.eval(*d) / d))
        .collect();
    let sup_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let (xs, ys): (Vec<f64>, Vec<f64>) = deltas
        .iter()
        .zip(&ratios)
        .filter(|(d, _)| **d <= 100.0 * last)
        .map(|(d, r)| (-d.ln(), *r))
        .unzip();
    let slope = if xs.len() >= 2 { ls_slope(&xs, &ys) } else { 0.0 };
    let r_last = ratios[ratios.len() - 1];
    Ok(Regularity {
        deltas: deltas.to_vec(),
        ratios,
        sup_ratio,
        slope,
        pass: sup_ratio.is_finite() && slope <= 0.01 * r_last.max(1.0),
    })
}

pub(crate) fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// `ω(t) = exp(-e^{ψ^{-1}(cap(E_t))})` from a sampled capacity curve.
///
/// The curve must be nondecreasing in `t`; an infinite capacity (the full
/// circle) maps to `ψ^{-1} = 1`.
pub fn capacity_omega(curve: &[CurvePoint], psi: &DecayProfile) -> Result<ModulusOmega> {
    let op = "capacity_omega";
    if curve.is_empty() {
        return Err(domain(op, "empty capacity curve"));
    }
    let t: Vec<f64> = curve.iter().map(|p| p.t).collect();
    let cap: Vec<f64> = curve
        .iter()
        .map(|p| match p.capacity {
            Capacity::Finite(c) => c,
            Capacity::Infinite => 1.0,
        })
        .collect();
    let tol = 1e-9;
    if let Some(w) = cap.windows(2).position(|w| w[1] < w[0] * (1.0 - tol) - tol) {
        return Err(domain(
            op,
            format!("capacity curve decreases between t = {} and t = {}", t[w], t[w + 1]),
        ));
    }
    // tolerate solver jitter inside the tolerance
    let mut running = 0.0f64;
    let cap = cap
        .into_iter()
        .map(|c| {
            running = running.max(c);
            running
        })
        .collect();
    ModulusOmega::CapacityDerived {
        t,
        cap,
        psi: psi.clone(),
    }
    .validated()
}

/// `t* = e^{-e²}`, below which `exp(-(ln ln 1/t)²) ≤ (ln 1/t)^{-2}`.
pub fn remark_threshold() -> f64 {
    (-(2f64).exp()).exp()
}

/// Grid check of `exp(-(ln ln 1/t)²) ≤ (ln 1/t)^{-2}` on `[t_lo, t*]`.
#[derive(Debug, Clone, Serialize)]
pub struct RemarkBound {
    pub t_lo: f64,
    pub t_star: f64,
    /// Largest grid point up to which the inequality holds everywhere.
    pub t_star_located: f64,
    pub max_ratio: f64,
    pub holds: bool,
}

pub fn remark_omega_bound(t_lo: f64, points: usize) -> Result<RemarkBound> {
    let t_star = remark_threshold();
    if !(t_lo > 0.0 && t_lo < t_star) || points < 2 {
        return Err(domain("remark_omega_bound", format!("t_lo = {t_lo} must lie in (0, t*)")));
    }
    let a = ModulusOmega::ExpExpEta;
    let b = ModulusOmega::LogSquare;
    let ratio = |t: f64| (a.ln_omega_u(-t.ln()) - b.ln_omega_u(-t.ln())).exp();
    let (l0, l1) = (t_lo.ln(), (0.5f64).ln());
    let mut max_ratio = 0.0f64;
    let mut located = t_lo;
    let mut broken = false;
    for i in 0..points {
        let t = (l0 + (l1 - l0) * i as f64 / (points - 1) as f64).exp();
        let r = ratio(t);
        if t <= t_star {
            max_ratio = max_ratio.max(r);
        }
        if r <= 1.0 + 1e-12 && !broken {
            located = t;
        } else {
            broken = true;
        }
    }
    let r_star = ratio(t_star);
    max_ratio = max_ratio.max(r_star);
    Ok(RemarkBound {
        t_lo,
        t_star,
        t_star_located: located,
        max_ratio,
        holds: max_ratio <= 1.0 + 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_tail_matches_closed_form() {
        let w = ModulusOmega::power(1.5).unwrap();
        for x in [1.0, 1e-3, 1e-9, 1e-40] {
            let exact = 2.0 * (2f64.sqrt() - f64::sqrt(x));
            assert!((w.tail_integral(x) - exact).abs() < 1e-10 * exact, "x={x}");
        }
        let w = ModulusOmega::power(2.0).unwrap();
        assert!((w.tail_integral(0.25) - 1.75).abs() < 1e-12);
        assert_eq!(w.tail_integral(2.5), 0.0);
    }

    #[test]
    fn scaled_tails_survive_underflow() {
        // ω = t: δ ∫_δ^2 dt/t = δ ln(2/δ)
        let w = ModulusOmega::power(1.0).unwrap();
        let ld = -5000.0f64;
        let v = w.scaled_tail_integrals(&[(0.0, ld), (ld, ld)]);
        assert!((v[0] - (LN_2 - ld)).abs() < 1e-9 * (LN_2 - ld));
        assert_eq!(v[1], 0.0);
        // log-square: δ ∫_{2δ}^2 (ln 1/t)^{-2} dt/t² ~ (1/2)(ln 1/δ)^{-2}
        let l = ModulusOmega::LogSquare;
        let u = 1e5f64;
        let got = l.scaled_tail_integrals(&[(-u, LN_2 - u)])[0];
        let approx = 0.5 / (u - LN_2).powi(2);
        assert!((got / approx - 1.0).abs() < 1e-3, "{got} vs {approx}");
    }

    #[test]
    fn moduli_validate() {
        assert!(ModulusOmega::power(0.0).is_err());
        assert!(ModulusOmega::exp_inv(0.3).is_ok());
        assert!(ModulusOmega::ExpExpEta.validated().is_ok());
        assert!(ModulusOmega::LogSquare.validated().is_ok());
        assert!(ModulusOmega::tabulated(vec![0.5, 1.0], vec![1.0, 0.5]).is_err());
        let z = ModulusOmega::tabulated(vec![1.0], vec![0.0]).unwrap();
        assert_eq!(z.eval(0.5), 0.0);
        assert_eq!(ModulusOmega::power(2.0).unwrap().eval(4.0), 4.0);
    }

    #[test]
    fn regularity_borderline() {
        let g = default_delta_grid();
        let good = omega_regularity(&ModulusOmega::power(1.5).unwrap(), &g).unwrap();
        assert!(good.pass);
        assert!(good.sup_ratio < 2.0 * 2f64.sqrt());
        let lin = omega_regularity(&ModulusOmega::power(1.0).unwrap(), &g).unwrap();
        assert!(!lin.pass);
        assert!((lin.slope - 0.5).abs() < 1e-6);
        for (d, r) in lin.deltas.iter().zip(&lin.ratios) {
            assert!((r - (2.0 / d).ln() / 2.0).abs() < 1e-9);
        }
        let zero = ModulusOmega::tabulated(vec![2.0], vec![0.0]).unwrap();
        let z = omega_regularity(&zero, &g).unwrap();
        assert!(z.pass && z.sup_ratio == 0.0);
    }

    #[test]
    fn decay_profile_inverse() {
        let p = DecayProfile::Power { p: 3.0 };
        assert!((p.inverse(0.125) - 2.0).abs() < 1e-14);
        assert_eq!(p.inverse(2.0), 1.0);
        let pl = DecayProfile::PowerLog { p: 2.0, q: 2.0 };
        let x = pl.inverse(1e-6);
        assert!((pl.psi(x) / 1e-6 - 1.0).abs() < 1e-10);
        assert!((pl.first_moment().unwrap() - 1.0).abs() < 1e-15);
        assert!(DecayProfile::Power { p: 2.0 }.validate().is_err());
        let pl3 = DecayProfile::PowerLog { p: 3.0, q: 0.0 };
        assert!((pl3.first_moment().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn remark_inequality() {
        let b = remark_omega_bound(1e-12, 2000).unwrap();
        assert!(b.holds);
        assert!(b.t_star_located >= b.t_star * 0.98);
        assert!((b.t_star - (-(2f64).exp()).exp()).abs() < 1e-18);
    }
}
