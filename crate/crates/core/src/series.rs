//! Partial sums at dyadic cutoffs and the convergence verdict attached to them.
//!
//! A verdict is desk-scale evidence, not a proof. The rule looks at the
//! increments `Δ_j = S(2^j) - S(2^{j-1})` over the last few doublings:
//!
//! * converges when the last two increments are below `eps_conv`, when the
//!   increments shrink geometrically (ratio at most `ratio_conv`), or when
//!   they decay like `j^{-q}` with `q >= log_decay_conv`;
//! * diverges when the last increment is at least `eps_div` and the fitted
//!   growth exponent `1 - q` exceeds `-growth_slack`;
//! * otherwise inconclusive.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{domain, Result};
use crate::summation::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converges,
    Diverges,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Converges => "converges",
            Verdict::Diverges => "diverges",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// Thresholds of the verdict rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictRule {
    pub eps_conv: f64,
    pub eps_div: f64,
    pub ratio_conv: f64,
    pub log_decay_conv: f64,
    pub growth_slack: f64,
    /// Number of trailing increments used by the fits.
    pub window: usize,
}

impl Default for VerdictRule {
    fn default() -> Self {
        Self {
            eps_conv: 1e-9,
            eps_div: 1e-3,
            ratio_conv: 0.75,
            log_decay_conv: 3.0,
            growth_slack: 0.15,
            window: 4,
        }
    }
}

/// Growth diagnostics behind a verdict.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Increments between consecutive dyadic cutoffs.
    pub increments: Vec<f64>,
    /// Mean ratio of the trailing increments.
    pub increment_ratio: Option<f64>,
    /// Fitted `q` in `Δ_j ~ j^{-q}`.
    pub log_decay: Option<f64>,
    /// Tail estimate implied by the decay model, when converging.
    pub tail_estimate: Option<f64>,
}

/// Partial sums of a nonnegative series at dyadic cutoffs `1, 2, 4, …` (plus
/// the final count), with a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialSumSeries {
    pub cutoffs: Vec<usize>,
    pub sums: Vec<f64>,
    pub verdict: Verdict,
    pub diagnostics: Diagnostics,
    /// The series had fewer terms than requested, so the last sum is exact.
    pub exhausted: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl PartialSumSeries {
    /// Sums the first `n` terms produced by `terms` (fewer if it runs out).
    pub fn from_terms<I>(terms: I, n: usize) -> Result<Self>
    where
        I: IntoIterator<Item = f64>,
    {
        Self::build(terms, n, 0, &VerdictRule::default())
    }

    /// Like [`from_terms`](Self::from_terms) but the first `signed_prefix`
    /// terms may be negative; the verdict only looks at the tail.
    pub fn from_terms_with_prefix<I>(terms: I, n: usize, signed_prefix: usize) -> Result<Self>
    where
        I: IntoIterator<Item = f64>,
    {
        Self::build(terms, n, signed_prefix, &VerdictRule::default())
    }

    /// Terms `term(0..count)` evaluated in parallel and summed in index order.
    pub fn from_fn<F>(count: usize, term: F) -> Result<Self>
    where
        F: Fn(usize) -> f64 + Sync,
    {
        use rayon::prelude::*;
        let values: Vec<f64> = (0..count).into_par_iter().map(&term).collect();
        Self::from_terms(values, count)
    }

    pub fn build<I>(terms: I, n: usize, signed_prefix: usize, rule: &VerdictRule) -> Result<Self>
    where
        I: IntoIterator<Item = f64>,
    {
        let mut acc = CompensatedSum::new();
        let mut cutoffs = Vec::new();
        let mut sums = Vec::new();
        let mut next = 1usize;
        let mut count = 0usize;
        for (i, t) in terms.into_iter().take(n).enumerate() {
            if t.is_nan() || (t < 0.0 && i >= signed_prefix) {
                return Err(domain(
                    "partial sums",
                    format!("term {i} is {t}; terms must be nonnegative"),
                ));
            }
            acc.add(t);
            count = i + 1;
            if count == next {
                cutoffs.push(count);
                sums.push(acc.value());
                next = next.saturating_mul(2);
            }
        }
        if cutoffs.last() != Some(&count) && count > 0 {
            cutoffs.push(count);
            sums.push(acc.value());
        }
        let exhausted = count < n;
        let mut series = Self {
            cutoffs,
            sums,
            verdict: Verdict::Inconclusive,
            diagnostics: Diagnostics::default(),
            exhausted,
            notes: Vec::new(),
        };
        let (verdict, diag) = judge(&series, signed_prefix, rule);
        series.verdict = verdict;
        series.diagnostics = diag;
        Ok(series)
    }

    /// Last partial sum (0 for an empty series).
    pub fn total(&self) -> f64 {
        self.sums.last().copied().unwrap_or(0.0)
    }

    pub fn terms_used(&self) -> usize {
        self.cutoffs.last().copied().unwrap_or(0)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// CSV with header `cutoff,sum`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cutoff,sum\n");
        for (c, s) in self.cutoffs.iter().zip(&self.sums) {
            let _ = writeln!(out, "{c},{}", crate::fmt_f64(*s));
        }
        out
    }
}

/// Verdict for partial sums already computed at dyadic cutoffs.
///
/// `sums[j]` must be the sum of the first `2^j` terms.
pub fn verdict(dyadic_sums: &[f64], rule: &VerdictRule) -> Result<Verdict> {
    if dyadic_sums.windows(2).any(|w| w[1] < w[0]) {
        return Err(domain("verdict", "partial sums decrease: negative term"));
    }
    let cutoffs: Vec<usize> = (0..dyadic_sums.len()).map(|j| 1usize << j).collect();
    let s = PartialSumSeries {
        cutoffs,
        sums: dyadic_sums.to_vec(),
        verdict: Verdict::Inconclusive,
        diagnostics: Diagnostics::default(),
        exhausted: false,
        notes: Vec::new(),
    };
    Ok(judge(&s, 0, rule).0)
}

fn judge(s: &PartialSumSeries, signed_prefix: usize, rule: &VerdictRule) -> (Verdict, Diagnostics) {
    let mut diag = Diagnostics::default();
    // dyadic cutoffs only; the trailing non-dyadic cutoff is ignored
    let dyadic: Vec<(usize, f64)> = s
        .cutoffs
        .iter()
        .zip(&s.sums)
        .filter(|(c, _)| c.is_power_of_two())
        .map(|(c, v)| (*c, *v))
        .collect();
    let mut incs = Vec::new();
    for w in dyadic.windows(2) {
        // exponent j of the upper cutoff 2^j
        let j = w[1].0.trailing_zeros() as usize;
        incs.push((j, w[0].0, w[1].1 - w[0].1));
    }
    diag.increments = incs.iter().map(|x| x.2).collect();

    if s.exhausted {
        return (Verdict::Converges, diag);
    }
    // only increments whose window lies past the signed prefix
    let tail: Vec<(usize, f64)> = incs
        .iter()
        .filter(|(_, lo, _)| *lo >= signed_prefix)
        .map(|(j, _, d)| (*j, *d))
        .collect();
    if tail.len() < rule.window {
        return (Verdict::Inconclusive, diag);
    }
    let last = &tail[tail.len() - rule.window..];
    let n = last.len();
    let d_last = last[n - 1].1;
    if last[n - 1].1.abs() < rule.eps_conv && last[n - 2].1.abs() < rule.eps_conv {
        diag.tail_estimate = Some(d_last);
        return (Verdict::Converges, diag);
    }
    if last.iter().any(|(_, d)| *d <= 0.0) {
        return (Verdict::Inconclusive, diag);
    }

    let ratios: Vec<f64> = last[n - 3..].windows(2).map(|w| w[1].1 / w[0].1).collect();
    let ratio = (ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp();
    diag.increment_ratio = Some(ratio);

    let xs: Vec<f64> = last.iter().map(|(j, _)| (*j as f64).ln()).collect();
    let ys: Vec<f64> = last.iter().map(|(_, d)| -d.ln()).collect();
    let q = slope(&xs, &ys);
    diag.log_decay = Some(q);

    if ratio <= rule.ratio_conv {
        diag.tail_estimate = Some(d_last * ratio / (1.0 - ratio));
        return (Verdict::Converges, diag);
    }
    if q >= rule.log_decay_conv {
        let j = last[n - 1].0 as f64;
        diag.tail_estimate = Some(d_last * j / (q - 1.0));
        return (Verdict::Converges, diag);
    }
    let growth = 1.0 - q;
    if d_last >= rule.eps_div && growth > -rule.growth_slack {
        return (Verdict::Diverges, diag);
    }
    (Verdict::Inconclusive, diag)
}

/// Least-squares slope of `ys` against `xs`.
pub(crate) fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series<F: Fn(f64) -> f64>(f: F, n: usize) -> PartialSumSeries {
        PartialSumSeries::from_terms((1..).map(|k| f(k as f64)), n).unwrap()
    }

    #[test]
    fn geometric_terms_converge() {
        let s = series(|k| 0.5f64.powf(k), 1 << 12);
        assert_eq!(s.verdict, Verdict::Converges);
        assert!((s.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn harmonic_terms_diverge() {
        let s = series(|k| 1.0 / k, 1 << 16);
        assert_eq!(s.verdict, Verdict::Diverges);
    }

    #[test]
    fn inverse_squares_converge() {
        let s = series(|k| 1.0 / (k * k), 1 << 16);
        assert_eq!(s.verdict, Verdict::Converges);
    }

    #[test]
    fn slowly_converging_log_series_is_not_called_divergent() {
        // 1/(n log^2 n) converges but is indistinguishable at desk scale
        let s = series(|k| 1.0 / ((k + 1.0) * (k + 1.0).ln().powi(2)), 1 << 18);
        assert_ne!(s.verdict, Verdict::Diverges);
    }

    #[test]
    fn square_root_growth_diverges() {
        let s = series(|k| 1.0 / k.sqrt(), 1 << 14);
        assert_eq!(s.verdict, Verdict::Diverges);
    }

    #[test]
    fn cutoffs_are_dyadic_plus_final() {
        let s = series(|_| 1.0, 10);
        assert_eq!(s.cutoffs, vec![1, 2, 4, 8, 10]);
        assert_eq!(s.sums, vec![1.0, 2.0, 4.0, 8.0, 10.0]);
    }

    #[test]
    fn finite_series_is_exact() {
        let s = PartialSumSeries::from_terms(vec![0.5, 0.25], 100).unwrap();
        assert!(s.exhausted);
        assert_eq!(s.verdict, Verdict::Converges);
        assert_eq!(s.total(), 0.75);
    }

    #[test]
    fn negative_terms_are_rejected() {
        assert!(PartialSumSeries::from_terms(vec![1.0, -1.0], 2).is_err());
        assert!(PartialSumSeries::from_terms_with_prefix(vec![-1.0, 1.0], 2, 1).is_ok());
    }

    #[test]
    fn verdict_on_raw_sums() {
        let sums: Vec<f64> = (0..20).map(|j| (j as f64 + 1.0) * 0.7).collect();
        assert_eq!(verdict(&sums, &VerdictRule::default()).unwrap(), Verdict::Diverges);
        assert!(verdict(&[1.0, 0.5], &VerdictRule::default()).is_err());
    }
}
