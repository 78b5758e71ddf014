//! Summability conditions on zero sequences, each returned as partial sums at
//! dyadic cutoffs with a verdict.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{LN_2, TAU};

use super::{ln_add_exp, log_distance, ModulusOmega};
use crate::blaschke::ZeroSequence;
use crate::circle_sets::{chord, inverse_measure_integrals, CircleSet, CircleSubset};
use crate::error::{domain, Result};
use crate::quadrature::{adaptive_log, AdaptiveOptions, GaussLegendre};
use crate::series::PartialSumSeries;

/// A named condition with its partial sums, as written to JSON reports.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub formula: String,
    #[serde(flatten)]
    pub series: PartialSumSeries,
    pub params: serde_json::Value,
}

impl ConditionReport {
    pub fn new(
        condition: &str,
        formula: &str,
        series: PartialSumSeries,
        params: serde_json::Value,
    ) -> Self {
        Self {
            condition: condition.to_string(),
            formula: formula.to_string(),
            series,
            params,
        }
    }
}

fn log_distances(zs: &ZeroSequence, e: &dyn CircleSubset, n: usize) -> Vec<(f64, f64)> {
    (0..zs.count(n))
        .into_par_iter()
        .map(|i| {
            let z = zs.get(i);
            (z.log_depth, log_distance(&z, e))
        })
        .collect()
}

/// `Σ ω(2d(z_n, E))`, arguments above 2 clipped to 2.
pub fn theorem1_sum(zs: &ZeroSequence, e: &dyn CircleSubset, omega: &ModulusOmega, n: usize) -> Result<PartialSumSeries> {
    zs.series(n, |z| omega.ln_omega_u(-LN_2 - log_distance(z, e)).exp())
}

/// `Σ ( ω(2d_n) + (1 - r_n) ∫_{2d_n}^2 ω(t)/t² dt )` with `d_n = d(z_n, E)`.
pub fn lemma_sum(zs: &ZeroSequence, e: &dyn CircleSubset, omega: &ModulusOmega, n: usize) -> Result<PartialSumSeries> {
    let lds = log_distances(zs, e, n);
    let items: Vec<(f64, f64)> = lds.iter().map(|(ls, ld)| (*ls, LN_2 + ld)).collect();
    let tails = omega.scaled_tail_integrals(&items);
    let terms = lds
        .iter()
        .zip(tails)
        .map(|((_, ld), tail)| omega.ln_omega_u(-LN_2 - ld).exp() + tail);
    PartialSumSeries::from_terms(terms, n)
}

/// `Σ (1 - r_n) ∫_{2(1-r_n)}^2 ω(t)/t² dt`; only the radii of `radii` matter.
pub fn blas_condition(radii: &ZeroSequence, omega: &ModulusOmega, n: usize) -> Result<PartialSumSeries> {
    let items: Vec<(f64, f64)> = (0..radii.count(n))
        .into_par_iter()
        .map(|i| {
            let ld = radii.get(i).log_depth;
            (ld, LN_2 + ld)
        })
        .collect();
    PartialSumSeries::from_terms(omega.scaled_tail_integrals(&items), n)
}

/// `Σ 1/log²(1 - r_n)`.
pub fn log_square_sum(radii: &ZeroSequence, n: usize) -> Result<PartialSumSeries> {
    radii.series(n, |z| 1.0 / (z.log_depth * z.log_depth))
}

/// `Σ d(e^{iθ_n}, E)^{2α}`, chordal distance from the arguments.
pub fn corollary1_sum(zs: &ZeroSequence, e: &dyn CircleSubset, alpha: f64, n: usize) -> Result<PartialSumSeries> {
    if !(alpha > 0.0) {
        return Err(domain("corollary1_sum", format!("α = {alpha} must be positive")));
    }
    let s = zs.series(n, |z| {
        let d = chord(e.angular_distance(z.theta));
        if d == 0.0 {
            0.0
        } else {
            (2.0 * alpha * d.ln()).exp()
        }
    })?;
    Ok(if alpha <= 0.5 {
        s.with_note(format!("α = {alpha} <= 1/2 is outside the range of the corollary"))
    } else {
        s
    })
}

/// `Σ exp(-2/d(z_n, E)^γ)`.
pub fn corollary2_sum(zs: &ZeroSequence, e: &dyn CircleSubset, gamma: f64, n: usize) -> Result<PartialSumSeries> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(domain("corollary2_sum", format!("γ = {gamma} must lie in (0, 1)")));
    }
    zs.series(n, |z| (-2.0 * (-gamma * log_distance(z, e)).exp()).exp())
}

/// Both sides of `∫_𝕋 |dζ|/d(ζ, E)^γ < ∞ ⇔ Σ |I_n|^{1-γ} < ∞`.
#[derive(Debug, Clone, Serialize)]
pub struct TGamma {
    pub gamma: f64,
    pub integral: f64,
    pub series: f64,
    pub intervals: usize,
}

/// Each complementary interval of length `L` contributes
/// `2 ∫_0^{L/2} chord(s)^{-γ} ds`; the substitution `s = (L/2) v^{1/(1-γ)}`
/// removes the endpoint singularity.
pub fn t_gamma_integral(e: &CircleSet, gamma: f64) -> Result<TGamma> {
    let op = "t_gamma_integral";
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(domain(op, format!("γ = {gamma} must lie in (0, 1)")));
    }
    if e.is_empty() {
        return Err(domain(op, "the set is empty"));
    }
    if e.measure() > 1e-12 * TAU {
        return Err(domain(op, format!("|E| = {} must be 0", e.measure())));
    }
    let rule = GaussLegendre::new(24);
    let p = 1.0 / (1.0 - gamma);
    let gaps = e.complementary_intervals();
    let mut integral = crate::summation::CompensatedSum::new();
    let mut series = crate::summation::CompensatedSum::new();
    for gap in &gaps {
        let a = 0.5 * gap.length;
        // ∫_0^a chord(s)^{-γ} ds = a^{1-γ}/(1-γ) ∫_0^1 (s/chord(s))^γ dv
        let inner = rule.integrate(0.0, 1.0, |v| {
            let s = a * v.powf(p);
            if s == 0.0 {
                1.0
            } else {
                (s / chord(s)).powf(gamma)
            }
        });
        integral.add(2.0 * a.powf(1.0 - gamma) * p * inner);
        series.add(gap.length.powf(1.0 - gamma));
    }
    Ok(TGamma {
        gamma,
        integral: integral.value(),
        series: series.value(),
        intervals: gaps.len(),
    })
}

/// `x ↦ ∫_x^2 ds/|E_s|` for many `ln x` at once, exact in log form below the
/// smallest gap scale where `|E_s| = |E| + 2G·2arcsin(s/2) ≈ |E| + 2Gs`.
pub fn log_inverse_measure_integrals(e: &CircleSet, log_lowers: &[f64]) -> Result<Vec<f64>> {
    if e.is_empty() {
        return Err(domain("inverse_measure_integral", "the set is empty"));
    }
    if e.is_full() {
        return Ok(log_lowers.iter().map(|l| (2.0 - l.exp().min(2.0)) / TAU).collect());
    }
    let gaps = e.complementary_intervals();
    let g = gaps.len() as f64;
    let min_gap = gaps.iter().map(|a| a.length).fold(f64::INFINITY, f64::min);
    let x0 = (1e-6f64).min(0.25 * 2.0 * (0.25 * min_gap).sin());
    let m = e.measure();
    let uppers: Vec<f64> = log_lowers.iter().map(|l| l.exp().clamp(x0, 2.0)).collect();
    let base = inverse_measure_integrals(e, &uppers, 2.0)?;
    let ln_top = ln_add_exp(m.ln(), (2.0 * g * x0).ln());
    Ok(log_lowers
        .iter()
        .zip(base)
        .map(|(l, b)| {
            if l.exp() >= x0 {
                b
            } else {
                b + (ln_top - ln_add_exp(m.ln(), (2.0 * g).ln() + l)) / (2.0 * g)
            }
        })
        .collect())
}

/// `Σ exp(-(∫_{2d(z_n,E)}^2 ds/|E_s|)^α)` for `α ∈ (0, 1/2)`.
pub fn corollary3_sum(zs: &ZeroSequence, e: &CircleSet, alpha: f64, n: usize) -> Result<PartialSumSeries> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(domain("corollary3_sum", format!("α = {alpha} must lie in (0, 1/2)")));
    }
    let lds = log_distances(zs, e, n);
    let lowers: Vec<f64> = lds.iter().map(|(_, ld)| LN_2 + ld).collect();
    let inner = log_inverse_measure_integrals(e, &lowers)?;
    PartialSumSeries::from_terms(inner.into_iter().map(|f| (-f.max(0.0).powf(alpha)).exp()), n)
}

/// Outcome of [`condition_ii_check`].
#[derive(Debug, Clone, Serialize)]
pub struct ConditionII {
    pub beta: f64,
    pub t: Vec<f64>,
    /// `∫_t^1 ds / (|E_s| F(s)^{1+β})` by quadrature, `F(s) = ∫_s^2 dt/|E_t|`.
    pub values: Vec<f64>,
    /// The same integral as `(F(1)^{-β} - F(t)^{-β})/β`.
    pub closed_form: Vec<f64>,
    pub increments: Vec<f64>,
    /// `F(t)` keeps growing: decade increments do not shrink by more than half.
    pub precondition_holds: bool,
    pub pass: bool,
}

pub fn condition_ii_check(e: &CircleSet, beta: f64, t_grid: &[f64]) -> Result<ConditionII> {
    let op = "condition_ii_check";
    if !(beta > 0.0) {
        return Err(domain(op, format!("β = {beta} must be positive")));
    }
    if t_grid.len() < 3 || !t_grid.windows(2).all(|w| w[0] > w[1]) || !(t_grid[t_grid.len() - 1] > 0.0) || t_grid[0] > 1.0 {
        return Err(domain(op, "t grid must be strictly decreasing in (0, 1] with >= 3 points"));
    }
    if e.is_empty() || e.is_full() {
        return Err(domain(op, "the set must be nonempty and proper"));
    }
    let profile = e.neighborhood_measure_profile();
    let big_f = |s: f64| log_inverse_measure_integrals(e, &[s.ln()]).map(|v| v[0]);
    let f1 = big_f(1.0)?;
    let logs: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let ft = log_inverse_measure_integrals(e, &logs)?;
    let closed_form: Vec<f64> = ft.iter().map(|f| (f1.powf(-beta) - f.powf(-beta)) / beta).collect();
    let opts = AdaptiveOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-8,
        max_intervals: 400,
    };
    let integrand = |s: f64| {
        let f = big_f(s).unwrap_or(f64::NAN);
        1.0 / (profile.measure_at(s) * f.powf(1.0 + beta))
    };
    let mut values = Vec::with_capacity(t_grid.len());
    let mut acc = 0.0;
    let mut prev = 1.0;
    let bps = profile.breakpoints();
    for t in t_grid {
        acc += adaptive_log(integrand, *t, prev, &bps, opts).value;
        prev = *t;
        values.push(acc);
    }
    let increments: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let f_inc: Vec<f64> = ft.windows(2).map(|w| w[1] - w[0]).collect();
    let precondition_holds = f_inc.windows(2).all(|w| w[1] >= 0.5 * w[0]);
    let pass = precondition_holds
        && values.iter().all(|v| v.is_finite())
        && increments.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    Ok(ConditionII {
        beta,
        t: t_grid.to_vec(),
        values,
        closed_form,
        increments,
        precondition_holds,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::Zero;
    use crate::series::Verdict;

    fn radial(log_depths: impl Iterator<Item = f64>) -> ZeroSequence {
        ZeroSequence::finite(log_depths.map(|l| Zero::from_log_depth(l, 0.0)).collect(), "test")
    }

    #[test]
    fn lemma_sum_radial_squares() {
        // d = 1 - r_n = 2^{-n}, ω = t²: term = 4δ² + δ(2 - 2δ)
        let zs = radial((1..=40).map(|n| -(n as f64) * LN_2));
        let e = CircleSet::point(0.0);
        let w = ModulusOmega::power(2.0).unwrap();
        let s = lemma_sum(&zs, &e, &w, 40).unwrap();
        let exact: f64 = (1..=40)
            .map(|n| {
                let d = 0.5f64.powi(n);
                4.0 * d * d + d * (2.0 - 2.0 * d)
            })
            .sum();
        assert!((s.total() - exact).abs() < 1e-12);
        assert_eq!(s.verdict, Verdict::Converges);
        let zero = ModulusOmega::tabulated(vec![2.0], vec![0.0]).unwrap();
        assert_eq!(lemma_sum(&zs, &e, &zero, 40).unwrap().total(), 0.0);
    }

    #[test]
    fn theorem1_clips_far_zeros() {
        let zs = ZeroSequence::finite(vec![Zero::origin()], "o");
        let e = CircleSet::point(0.0);
        let w = ModulusOmega::power(2.0).unwrap();
        let s = theorem1_sum(&zs, &e, &w, 1).unwrap();
        assert!((s.total() - 4.0).abs() < 1e-12);
        let z = ZeroSequence::from_pairs(&[[0.5, std::f64::consts::PI]]).unwrap();
        assert!((theorem1_sum(&z, &e, &w, 1).unwrap().total() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn blas_with_squares_is_blaschke() {
        let zs = radial((1..=30).map(|n| -(n as f64)));
        let w = ModulusOmega::power(2.0).unwrap();
        let s = blas_condition(&zs, &w, 30).unwrap();
        let exact: f64 = (1..=30).map(|n| (-(n as f64)).exp()).map(|d| d * (2.0 - 2.0 * d)).sum();
        assert!((s.total() - exact).abs() < 1e-12);
    }

    #[test]
    fn corollary_sums() {
        // d(e^{iθ_n}, E) = 1/n², α = 3/4 → Σ n^{-3}
        let zs = ZeroSequence::generated("t", None, |i| {
            let n = (i + 1) as f64;
            Zero::from_log_depth(-1.0, crate::circle_sets::chord_angle(1.0 / (n * n)))
        });
        let e = CircleSet::point(0.0);
        let s = corollary1_sum(&zs, &e, 0.75, 1 << 14).unwrap();
        assert!((s.total() - 1.2020569031595942).abs() < 1e-6);
        assert_eq!(s.verdict, Verdict::Converges);
        let on = ZeroSequence::finite(vec![Zero::from_log_depth(-3.0, 0.0); 8], "on");
        assert_eq!(corollary1_sum(&on, &e, 0.75, 8).unwrap().total(), 0.0);
        assert!(!corollary1_sum(&on, &e, 0.5, 8).unwrap().notes.is_empty());
        // d = (1/ln n)^{1/γ} → terms 1/n², from n = 3 where d < 1
        let gamma = 0.5;
        let zs = ZeroSequence::generated("t", None, move |i| {
            let n = (i + 3) as f64;
            Zero::from_log_depth((1.0 / n.ln()).powf(1.0 / gamma).ln(), 0.0)
        });
        let s = corollary2_sum(&zs, &e, gamma, 1 << 12).unwrap();
        let exact: f64 = (3..(3 + (1 << 12))).map(|n| 1.0 / (n as f64).powi(2)).sum();
        assert!((s.total() - exact).abs() < 1e-12);
        assert!(corollary2_sum(&zs, &e, 1.0, 4).is_err());
    }

    #[test]
    fn t_gamma_single_point() {
        let e = CircleSet::point(1.0);
        let r = t_gamma_integral(&e, 0.5).unwrap();
        // ∫_0^{2π} (2 sin(s/2))^{-1/2} ds = 2 ∫_0^π (2 sin(s/2))^{-1/2} ds
        let check = crate::quadrature::adaptive(
            |s: f64| (2.0 * (0.5 * s).sin()).powf(-0.5),
            0.0,
            TAU,
            &[std::f64::consts::PI],
            AdaptiveOptions::default(),
        );
        assert!((r.integral - check.value).abs() < 1e-6 * check.value, "{} {}", r.integral, check.value);
        assert!((r.series - TAU.sqrt()).abs() < 1e-14);
        assert!(t_gamma_integral(&e, 1.0).is_err());
        let arcs = CircleSet::from_pairs(&[[0.0, 1.0]]).unwrap();
        assert!(t_gamma_integral(&arcs, 0.5).is_err());
    }

    #[test]
    fn inverse_measure_log_form_is_continuous() {
        let e = CircleSet::point(0.0);
        let lows: Vec<f64> = [1e-5, 1e-6, 1e-7, 1e-300].iter().map(|x: &f64| x.ln()).collect();
        let v = log_inverse_measure_integrals(&e, &lows).unwrap();
        let direct = inverse_measure_integrals(&e, &[1e-5, 1e-7], 2.0).unwrap();
        assert!((v[0] - direct[0]).abs() < 1e-9);
        assert!((v[2] - direct[1]).abs() < 1e-9);
        // |E_s| ≈ 2s near 0
        assert!((v[3] - v[2] - 0.5 * (1e-7f64 / 1e-300).ln()).abs() < 1e-9);
        let deep = log_inverse_measure_integrals(&e, &[-1e6]).unwrap()[0];
        assert!((deep - v[2] - 0.5 * (1e6 + 1e-7f64.ln())).abs() < 1e-6);
    }

    #[test]
    fn corollary3_point_set() {
        let e = CircleSet::point(0.0);
        let zs = radial((1..=16).map(|n| -(n as f64) * 10.0));
        let s = corollary3_sum(&zs, &e, 0.4, 16).unwrap();
        assert!(s.total() > 0.0 && s.total() < 16.0);
        assert!(corollary3_sum(&zs, &e, 0.5, 16).is_err());
    }

    #[test]
    fn condition_ii_point() {
        let e = CircleSet::point(0.0);
        let grid: Vec<f64> = (1..=12).map(|k| 10f64.powi(-k)).collect();
        let a = condition_ii_check(&e, 1.0, &grid).unwrap();
        let b = condition_ii_check(&e, 0.1, &grid).unwrap();
        assert!(a.pass && a.precondition_holds);
        for (v, c) in a.values.iter().zip(&a.closed_form) {
            assert!((v - c).abs() < 1e-6 * c.abs().max(1e-3), "{v} vs {c}");
        }
        assert!(a.values.last().unwrap() < b.values.last().unwrap());
        let fat = CircleSet::from_pairs(&[[0.0, 1.0]]).unwrap();
        let c = condition_ii_check(&fat, 1.0, &grid).unwrap();
        assert!(!c.precondition_holds && !c.pass);
    }
}
