//! Closed subsets of the unit circle as finite unions of arcs, and
//! generalized Cantor constructions.
//!
//! Angles are radians. A [`CircleSet`] stores its arcs inside `[0, 2π]`,
//! sorted and pairwise disjoint; an arc that crosses angle 0 is stored as two
//! pieces `[x, 2π]` and `[0, y]`. Distances are Euclidean (chordal) in the
//! plane.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{domain, Error, Result};
use crate::quadrature::{self, AdaptiveOptions};
use crate::series::PartialSumSeries;

/// Tolerance used when snapping angles and deciding that two arcs touch.
const ANGLE_EPS: f64 = 1e-14;

/// Chord length between two circle points separated by angle `delta`.
pub fn chord(delta: f64) -> f64 {
    2.0 * (0.5 * delta).sin().abs()
}

/// Angle subtended by a chord of length `c ∈ [0, 2]`.
pub fn chord_angle(c: f64) -> f64 {
    2.0 * (0.5 * c.clamp(0.0, 2.0)).asin()
}

/// Euclidean distance from `(1 - depth) e^{iθ}` to `e^{i(θ+delta)}`.
///
/// Written in terms of `depth = 1 - r` so that points extremely close to the
/// circle keep full relative precision.
pub fn polar_distance(depth: f64, delta: f64) -> f64 {
    let s = (0.5 * delta).sin();
    (depth * depth + 4.0 * (1.0 - depth) * s * s).sqrt()
}

/// Reduces an angle to `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// A closed arc `{e^{iθ} : start ≤ θ ≤ start + length}` traversed
/// counterclockwise. `length = 0` is a single point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub length: f64,
}

impl Arc {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        if !start.is_finite() || !length.is_finite() || length < 0.0 {
            return Err(domain("Arc::new", format!("invalid arc ({start}, {length})")));
        }
        Ok(Self {
            start: normalize_angle(start),
            length: length.min(TAU),
        })
    }

    /// Arc from two endpoint angles, counterclockwise from `start` to `end`.
    pub fn from_endpoints(start: f64, end: f64) -> Result<Self> {
        let d = end - start;
        let length = if (0.0..=TAU).contains(&d) {
            d
        } else {
            d.rem_euclid(TAU)
        };
        Self::new(start, length)
    }

    pub fn point(theta: f64) -> Self {
        Self {
            start: normalize_angle(theta),
            length: 0.0,
        }
    }

    /// Angle of the end point (may exceed 2π).
    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    pub fn midpoint(&self) -> f64 {
        normalize_angle(self.start + 0.5 * self.length)
    }

    /// Chordal length between the endpoints.
    pub fn chord_length(&self) -> f64 {
        if self.length >= PI {
            // the chord between endpoints is not monotone past a half circle
            chord(self.length.min(PI))
        } else {
            chord(self.length)
        }
    }

    pub fn contains(&self, theta: f64) -> bool {
        let d = (normalize_angle(theta) - self.start).rem_euclid(TAU);
        d <= self.length + ANGLE_EPS || TAU - d <= ANGLE_EPS
    }
}

/// Something with a well-defined angular distance to angles on the circle.
pub trait CircleSubset: Sync {
    /// Smallest angular separation (in `[0, π]`) between `theta` and the set.
    fn angular_distance(&self, theta: f64) -> f64;

    /// Euclidean distance from the disk point `(1 - depth) e^{iθ}` to the set.
    fn polar_distance(&self, depth: f64, theta: f64) -> f64 {
        polar_distance(depth, self.angular_distance(theta))
    }
}

/// Finite union of closed arcs of the unit circle.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CircleSet {
    arcs: Vec<Arc>,
}

impl CircleSet {
    pub fn empty() -> Self {
        Self { arcs: Vec::new() }
    }

    pub fn full() -> Self {
        Self {
            arcs: vec![Arc {
                start: 0.0,
                length: TAU,
            }],
        }
    }

    pub fn point(theta: f64) -> Self {
        Self::from_arcs([Arc::point(theta)])
    }

    pub fn points(thetas: &[f64]) -> Self {
        Self::from_arcs(thetas.iter().map(|t| Arc::point(*t)))
    }

    /// Normalizes arbitrary arcs: splits at angle 0, sorts, merges any that
    /// overlap or touch.
    pub fn from_arcs<I: IntoIterator<Item = Arc>>(arcs: I) -> Self {
        let mut pieces: Vec<(f64, f64)> = Vec::new();
        for a in arcs {
            if a.length >= TAU - ANGLE_EPS {
                return Self::full();
            }
            let s = normalize_angle(a.start);
            let e = s + a.length;
            if e > TAU {
                pieces.push((s, TAU));
                pieces.push((0.0, e - TAU));
            } else {
                pieces.push((s, e));
            }
        }
        pieces.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
        for (s, e) in pieces {
            match merged.last_mut() {
                Some(last) if s <= last.1 => {
                    last.1 = last.1.max(e);
                }
                _ => merged.push((s, e)),
            }
        }
        if merged.len() == 2 && merged[0].0 <= ANGLE_EPS && merged[1].1 >= TAU - ANGLE_EPS {
            let covered = merged[0].1 - merged[0].0 + merged[1].1 - merged[1].0;
            if covered >= TAU - ANGLE_EPS {
                return Self::full();
            }
        }
        if merged.len() == 1 && merged[0].0 <= ANGLE_EPS && merged[0].1 >= TAU - ANGLE_EPS {
            return Self::full();
        }
        Self {
            arcs: merged
                .into_iter()
                .map(|(s, e)| Arc {
                    start: s,
                    length: (e - s).max(0.0),
                })
                .collect(),
        }
    }

    /// Builds a set from `[start, end]` radian pairs.
    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        let arcs = pairs
            .iter()
            .map(|[s, e]| Arc::from_endpoints(*s, *e))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_arcs(arcs))
    }

    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.arcs.iter().map(|a| [a.start, a.end()]).collect()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].length >= TAU
    }

    /// Total arclength.
    pub fn measure(&self) -> f64 {
        crate::summation::sum(self.arcs.iter().map(|a| a.length)).min(TAU)
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.angular_distance(theta) <= ANGLE_EPS
    }

    /// Euclidean distance from a point of the closed disk to the set.
    pub fn distance(&self, z: num_complex::Complex64) -> Result<f64> {
        if self.is_empty() {
            return Err(domain("distance", "the set is empty"));
        }
        let r = z.norm();
        if r > 1.0 + 1e-12 {
            return Err(domain("distance", format!("|z| = {r} > 1")));
        }
        let theta = if r == 0.0 { 0.0 } else { z.arg() };
        Ok(CircleSubset::polar_distance(self, (1.0 - r).max(0.0), theta))
    }

    /// `{ζ : d(ζ, E) ≤ t}`: every arc widened by the angle `2 arcsin(t/2)` on
    /// both sides.
    pub fn neighborhood(&self, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(domain("neighborhood", format!("t = {t} must be >= 0")));
        }
        if t == 0.0 {
            return Ok(self.clone());
        }
        if t >= 2.0 && !self.is_empty() {
            return Ok(Self::full());
        }
        let rho = chord_angle(t);
        Ok(Self::from_arcs(self.arcs.iter().map(|a| Arc {
            start: normalize_angle(a.start - rho),
            length: a.length + 2.0 * rho,
        })))
    }

    /// Open arcs of the complement, sorted by start angle.
    pub fn complementary_intervals(&self) -> Vec<Arc> {
        if self.is_full() {
            return Vec::new();
        }
        if self.is_empty() {
            return vec![Arc {
                start: 0.0,
                length: TAU,
            }];
        }
        let mut gaps = Vec::with_capacity(self.arcs.len());
        for w in self.arcs.windows(2) {
            let len = w[1].start - w[0].end();
            if len > 0.0 {
                gaps.push(Arc {
                    start: normalize_angle(w[0].end()),
                    length: len,
                });
            }
        }
        let first = self.arcs[0];
        let last = self.arcs[self.arcs.len() - 1];
        let wrap = first.start + TAU - last.end();
        if wrap > 0.0 {
            gaps.push(Arc {
                start: normalize_angle(last.end()),
                length: wrap,
            });
        }
        gaps.sort_by(|a, b| a.start.total_cmp(&b.start));
        gaps
    }

    /// Distinct endpoint angles of the arcs (points count once).
    pub fn endpoints(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.arcs.len());
        for a in &self.arcs {
            out.push(normalize_angle(a.start));
            if a.length > 0.0 {
                out.push(normalize_angle(a.end()));
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= ANGLE_EPS);
        if out.len() > 1 && TAU - out[out.len() - 1] + out[0] <= ANGLE_EPS {
            out.pop();
        }
        out
    }

    /// Fast evaluator of `|E_s|` as a function of `s`.
    pub fn neighborhood_measure_profile(&self) -> NeighborhoodProfile {
        NeighborhoodProfile::new(self)
    }

    /// Is every arc of `self` contained in some arc of `other`?
    pub fn is_subset_of(&self, other: &CircleSet) -> bool {
        self.arcs.iter().all(|a| {
            other.arcs.iter().any(|b| {
                let d = a.start - b.start;
                d >= -1e-12 && a.end() <= b.end() + 1e-12
            }) || (other.is_full())
        })
    }
}

impl CircleSubset for CircleSet {
    fn angular_distance(&self, theta: f64) -> f64 {
        if self.arcs.is_empty() {
            return f64::INFINITY;
        }
        let t = normalize_angle(theta);
        let n = self.arcs.len();
        // last arc whose start is <= t
        let idx = self.arcs.partition_point(|a| a.start <= t);
        let mut best = f64::INFINITY;
        let mut consider = |k: usize| {
            let a = self.arcs[k];
            let d0 = (t - a.start).rem_euclid(TAU);
            if d0 <= a.length {
                best = 0.0;
                return;
            }
            let to_end = (t - a.end()).rem_euclid(TAU);
            let to_start = (a.start - t).rem_euclid(TAU);
            best = best.min(to_end.min(TAU - to_end)).min(to_start.min(TAU - to_start));
        };
        consider((idx + n - 1) % n);
        consider(idx % n);
        best.min(PI)
    }
}

/// `s ↦ |E_s|` evaluated from the sorted complementary gap lengths.
///
/// `|E_s| = |E| + Σ_i min(g_i, 2ρ(s))` with `ρ(s) = 2 arcsin(s/2)`.
#[derive(Debug, Clone)]
pub struct NeighborhoodProfile {
    base: f64,
    gaps: Vec<f64>,
    prefix: Vec<f64>,
    full: bool,
}

impl NeighborhoodProfile {
    fn new(set: &CircleSet) -> Self {
        let mut gaps: Vec<f64> = set
            .complementary_intervals()
            .iter()
            .map(|a| a.length)
            .collect();
        gaps.sort_by(f64::total_cmp);
        let mut prefix = Vec::with_capacity(gaps.len() + 1);
        let mut acc = crate::summation::CompensatedSum::new();
        prefix.push(0.0);
        for g in &gaps {
            acc.add(*g);
            prefix.push(acc.value());
        }
        Self {
            base: set.measure(),
            gaps,
            prefix,
            full: set.is_full(),
        }
    }

    pub fn measure_at(&self, s: f64) -> f64 {
        if self.full {
            return TAU;
        }
        let w = 2.0 * chord_angle(s.min(2.0));
        let k = self.gaps.partition_point(|g| *g < w);
        (self.base + self.prefix[k] + w * (self.gaps.len() - k) as f64).min(TAU)
    }

    /// Values of `s` where a gap closes, i.e. where the profile has a kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut bps: Vec<f64> = self
            .gaps
            .iter()
            .map(|g| 2.0 * (0.25 * g).sin())
            .filter(|s| *s > 0.0 && *s < 2.0)
            .collect();
        bps.dedup();
        bps
    }
}

/// `∫_t^{t_max} ds / |E_s|`.
pub fn inverse_measure_integral(e: &CircleSet, t: f64, t_max: f64) -> Result<f64> {
    Ok(inverse_measure_integrals(e, &[t], t_max)?[0])
}

/// [`inverse_measure_integral`] for many lower limits at once.
pub fn inverse_measure_integrals(e: &CircleSet, lowers: &[f64], t_max: f64) -> Result<Vec<f64>> {
    if e.is_empty() {
        return Err(domain("inverse_measure_integral", "the set is empty"));
    }
    if !(t_max > 0.0 && t_max <= 2.0) {
        return Err(domain(
            "inverse_measure_integral",
            format!("t_max = {t_max} must lie in (0, 2]"),
        ));
    }
    if let Some(t) = lowers.iter().find(|t| !(**t > 0.0 && **t <= t_max)) {
        return Err(domain(
            "inverse_measure_integral",
            format!("lower limit {t} must lie in (0, t_max]"),
        ));
    }
    let profile = e.neighborhood_measure_profile();
    let bps = profile.breakpoints();
    Ok(quadrature::integrals_to_upper(
        |s| 1.0 / profile.measure_at(s),
        lowers,
        t_max,
        &bps,
        true,
        AdaptiveOptions::default(),
    ))
}

/// Partial sums of `Σ |I_n| log(1/|I_n|)` over the complementary intervals,
/// largest first.
pub fn carleson_criterion(e: &CircleSet) -> Result<PartialSumSeries> {
    let mut lens: Vec<f64> = e
        .complementary_intervals()
        .iter()
        .map(|a| a.length)
        .collect();
    lens.sort_by(|a, b| b.total_cmp(a));
    let signed = lens.iter().take_while(|l| **l > 1.0).count();
    let n = lens.len();
    PartialSumSeries::from_terms_with_prefix(
        lens.into_iter().map(|l| l * (1.0 / l).ln()),
        n + 1,
        signed,
    )
}

/// Level lengths of a generalized Cantor construction.
#[derive(Debug, Clone, PartialEq)]
pub enum CantorFamily {
    /// Perfect symmetric set, `ℓ_n = 2π rⁿ`.
    Ratio(f64),
    /// Explicit `ℓ_1, …, ℓ_K`.
    Lengths(Vec<f64>),
    /// `ℓ_n = 2π exp(-(2^{n+m}/(n+m)^s - 2^m/m^s))`; with `m = 0` this is
    /// `2π exp(-2ⁿ/n^s)`.
    ExpPower { s: f64, shift: u32 },
}

/// A generalized Cantor construction truncated at `depth` levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CantorSpecJson", into = "CantorSpecJson")]
pub struct CantorSpec {
    pub family: CantorFamily,
    pub depth: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct CantorSpecJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ell: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exp_power: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shift: Option<u32>,
    depth: usize,
}

impl TryFrom<CantorSpecJson> for CantorSpec {
    type Error = Error;

    fn try_from(j: CantorSpecJson) -> Result<Self> {
        let family = match (j.ratio, j.ell, j.exp_power) {
            (Some(r), None, None) => CantorFamily::Ratio(r),
            (None, Some(mut ell), None) => {
                if ell.first().is_some_and(|v| (v - TAU).abs() < 1e-12) {
                    ell.remove(0);
                }
                CantorFamily::Lengths(ell)
            }
            (None, None, Some(s)) => CantorFamily::ExpPower {
                s,
                shift: j.shift.unwrap_or(0),
            },
            _ => {
                return Err(domain(
                    "CantorSpec",
                    "exactly one of `ratio`, `ell`, `exp_power` is required",
                ))
            }
        };
        let spec = CantorSpec {
            family,
            depth: j.depth,
        };
        if let CantorFamily::Ratio(r) = spec.family {
            return perfect_symmetric(r, spec.depth);
        }
        if let CantorFamily::Lengths(ref l) = spec.family {
            if l.len() < spec.depth {
                return Err(domain(
                    "CantorSpec",
                    format!("{} lengths given for depth {}", l.len(), spec.depth),
                ));
            }
        }
        Ok(spec)
    }
}

impl From<CantorSpec> for CantorSpecJson {
    fn from(s: CantorSpec) -> Self {
        let mut j = CantorSpecJson {
            depth: s.depth,
            ..Default::default()
        };
        match s.family {
            CantorFamily::Ratio(r) => j.ratio = Some(r),
            CantorFamily::Lengths(l) => j.ell = Some(l),
            CantorFamily::ExpPower { s, shift } => {
                j.exp_power = Some(s);
                j.shift = Some(shift);
            }
        }
        j
    }
}

/// Perfect symmetric Cantor set with constant ratio `ratio ∈ (0, 1/2)`.
pub fn perfect_symmetric(ratio: f64, depth: usize) -> Result<CantorSpec> {
    if !(ratio > 0.0 && ratio < 0.5) {
        return Err(domain(
            "perfect_symmetric",
            format!("ratio {ratio} must lie in (0, 1/2)"),
        ));
    }
    if depth < 1 {
        return Err(domain("perfect_symmetric", "depth must be >= 1"));
    }
    Ok(CantorSpec {
        family: CantorFamily::Ratio(ratio),
        depth,
    })
}

impl CantorSpec {
    /// `ℓ_n = 2π e^{-2ⁿ/n^s}` shifted by the smallest `m` that makes every
    /// level valid (`2ℓ_n < ℓ_{n-1}`).
    pub fn exp_power_valid(s: f64, depth: usize) -> Result<Self> {
        if !(s > 0.0) {
            return Err(domain("exp_power_valid", format!("s = {s} must be > 0")));
        }
        for shift in 0..64 {
            let spec = CantorSpec {
                family: CantorFamily::ExpPower { s, shift },
                depth: depth.max(1),
            };
            let probe = CantorSpec {
                depth: 60.max(depth),
                ..spec.clone()
            };
            if probe.validate().is_ok() {
                return Ok(spec);
            }
        }
        Err(domain("exp_power_valid", "no valid shift found"))
    }

    /// Whether `ℓ_n` is defined for this family.
    pub fn available(&self, n: usize) -> bool {
        match &self.family {
            CantorFamily::Lengths(l) => n <= l.len(),
            _ => true,
        }
    }

    /// `ln ℓ_n`.
    pub fn log_ell(&self, n: usize) -> f64 {
        if n == 0 {
            return TAU.ln();
        }
        match &self.family {
            CantorFamily::Ratio(r) => TAU.ln() + n as f64 * r.ln(),
            CantorFamily::Lengths(l) => l.get(n - 1).map_or(f64::NAN, |v| v.ln()),
            CantorFamily::ExpPower { s, shift } => {
                let m = *shift as i32;
                let k = n as i32 + m;
                let head = 2f64.powi(k) / (k as f64).powf(*s);
                let base = if m == 0 {
                    0.0
                } else {
                    2f64.powi(m) / (m as f64).powf(*s)
                };
                TAU.ln() - (head - base)
            }
        }
    }

    pub fn ell(&self, n: usize) -> f64 {
        self.log_ell(n).exp()
    }

    /// `ln λ_n` with `λ_n = ℓ_{n-1} - 2ℓ_n`; NaN when `λ_n <= 0`.
    pub fn log_lambda(&self, n: usize) -> f64 {
        assert!(n >= 1, "gaps are indexed from 1");
        if let CantorFamily::Ratio(r) = self.family {
            return TAU.ln() + (n as f64 - 1.0) * r.ln() + (1.0 - 2.0 * r).ln();
        }
        let a = self.log_ell(n - 1);
        if a == f64::NEG_INFINITY {
            // ℓ_{n-1} underflowed, so the gap is below the smallest double
            return a;
        }
        let b = self.log_ell(n);
        let inner = 1.0 - 2.0 * (b - a).exp();
        if inner > 0.0 {
            a + inner.ln()
        } else {
            f64::NAN
        }
    }

    pub fn lambda(&self, n: usize) -> f64 {
        if let CantorFamily::Ratio(r) = self.family {
            return TAU * r.powi(n as i32 - 1) * (1.0 - 2.0 * r);
        }
        self.ell(n - 1) - 2.0 * self.ell(n)
    }

    /// Problems with the spec up to its depth (empty when valid).
    pub fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.depth < 1 {
            out.push("depth must be >= 1".to_string());
        }
        for n in 1..=self.depth {
            if !self.available(n) {
                out.push(format!("ℓ_{n} is not defined"));
                break;
            }
            let le = self.log_ell(n);
            if !le.is_finite() && le != f64::NEG_INFINITY {
                out.push(format!("ℓ_{n} is not finite"));
            } else if le >= self.log_ell(n - 1) {
                out.push(format!("ℓ_{n} >= ℓ_{}", n - 1));
            } else if !(self.log_lambda(n) > f64::NEG_INFINITY) && self.lambda(n) <= 0.0 {
                out.push(format!("λ_{n} <= 0 (2ℓ_{n} >= ℓ_{})", n - 1));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(domain("CantorSpec", issues.join("; ")))
        }
    }

    /// Start angle of the `l`-th arc (from angle 0) of level `k`.
    pub fn arc_start(&self, k: usize, l: usize) -> f64 {
        let mut a = 0.0;
        for j in 1..=k {
            if (l >> (k - j)) & 1 == 1 {
                a += self.ell(j - 1) - self.ell(j);
            }
        }
        a
    }

    /// Center angle of the `l`-th arc of level `k`.
    pub fn arc_center(&self, k: usize, l: usize) -> f64 {
        self.arc_start(k, l) + 0.5 * self.ell(k)
    }
}

/// Level `k` of the construction: `2^k` arcs of length `ℓ_k`.
pub fn cantor_level(spec: &CantorSpec, k: usize) -> Result<CircleSet> {
    if k > spec.depth {
        return Err(Error::Range {
            op: "cantor_level",
            msg: format!("level {k} exceeds depth {}", spec.depth),
        });
    }
    let truncated = CantorSpec {
        depth: k,
        ..spec.clone()
    };
    if k > 0 {
        truncated.validate()?;
    }
    let mut starts = vec![0.0];
    for j in 1..=k {
        let lj = spec.ell(j);
        let shift = spec.ell(j - 1) - lj;
        let mut next = Vec::with_capacity(starts.len() * 2);
        for a in &starts {
            next.push(*a);
            next.push(a + shift);
        }
        starts = next;
    }
    let lk = spec.ell(k);
    if k == 0 {
        return Ok(CircleSet::full());
    }
    // already sorted and separated by positive gaps
    Ok(CircleSet {
        arcs: starts
            .into_iter()
            .map(|s| Arc {
                start: s,
                length: lk,
            })
            .collect(),
    })
}

/// The Cantor set itself, approximated by level `spec.depth`, with exact
/// distances obtained by descending through the levels.
#[derive(Debug, Clone)]
pub struct CantorSet {
    ell: Vec<f64>,
}

impl CantorSet {
    pub fn new(spec: &CantorSpec) -> Result<Self> {
        spec.validate()?;
        let ell = (0..=spec.depth).map(|n| spec.ell(n)).collect();
        Ok(Self { ell })
    }

    pub fn depth(&self) -> usize {
        self.ell.len() - 1
    }
}

impl CircleSubset for CantorSet {
    fn angular_distance(&self, theta: f64) -> f64 {
        let t = normalize_angle(theta);
        let mut a = 0.0;
        for j in 1..self.ell.len() {
            let lj = self.ell[j];
            let gap_lo = a + lj;
            let gap_hi = a + self.ell[j - 1] - lj;
            if t < gap_lo {
                continue;
            }
            if t > gap_hi {
                a = gap_hi;
                continue;
            }
            return (t - gap_lo).min(gap_hi - t);
        }
        0.0
    }
}

/// Measure, capacity and Carleson series of a Cantor construction.
#[derive(Debug, Clone, Serialize)]
pub struct CantorCriteria {
    pub valid: bool,
    pub issues: Vec<String>,
    /// `Σ 2^{n-1} λ_n`; tends to 2π exactly when the set has measure zero.
    pub measure: Option<PartialSumSeries>,
    pub measure_zero: Option<bool>,
    /// `Σ 2^{-n} log 1/ℓ_n`; divergence means capacity zero.
    pub capacity: PartialSumSeries,
    pub capacity_zero: Option<bool>,
    /// `Σ 2^n λ_n log 1/λ_n`; convergence means a Carleson set.
    pub carleson: Option<PartialSumSeries>,
}

/// Number of terms used by the Cantor series when the family is unbounded.
pub const CANTOR_SERIES_TERMS: usize = 1 << 16;

pub fn cantor_criteria(spec: &CantorSpec, n: usize) -> Result<CantorCriteria> {
    let issues = spec.issues();
    let valid = issues.is_empty();
    let avail = |k: usize| spec.available(k);
    let ln2 = std::f64::consts::LN_2;

    let capacity_terms = (1..=n).take_while(|k| avail(*k)).map(|k| {
        let l = -spec.log_ell(k);
        if let CantorFamily::ExpPower { s, shift } = spec.family {
            // 2^{-k}(2^{k+m}/(k+m)^s - 2^m/m^s - ln 2π) without overflow
            let m = shift as i32;
            let head = 2f64.powi(m) / ((k as i32 + m) as f64).powf(s);
            let base = if m == 0 {
                0.0
            } else {
                2f64.powi(m) / (m as f64).powf(s)
            };
            head - (base + TAU.ln()) * 2f64.powi(-(k as i32))
        } else {
            l * (-(k as f64) * ln2).exp()
        }
    });
    let signed = (1..=n.min(4096))
        .take_while(|k| avail(*k))
        .filter(|k| spec.log_ell(*k) > 0.0)
        .last()
        .unwrap_or(0);
    let capacity = PartialSumSeries::from_terms_with_prefix(capacity_terms, n, signed)?;
    let capacity_zero = match capacity.verdict {
        crate::series::Verdict::Diverges => Some(true),
        crate::series::Verdict::Converges => Some(false),
        crate::series::Verdict::Inconclusive => None,
    };

    let (measure, measure_zero, carleson) = if valid {
        let mass = |k: usize| (k as f64 * ln2 + spec.log_ell(k)).exp();
        let limit = if matches!(spec.family, CantorFamily::Lengths(_)) {
            spec.depth
        } else {
            n
        };
        let mterms = (1..=limit.min(n)).map(|k| (mass(k - 1) - mass(k)).max(0.0));
        let measure = PartialSumSeries::from_terms(mterms, n)?;
        let gap = TAU - measure.total();
        let mz = gap.abs() <= 1e-9 * TAU;

        let cterms = (1..=limit.min(n)).map(|k| {
            let ll = spec.log_lambda(k);
            let lam = (k as f64 * ln2 + ll).exp();
            // x log(1/x) → 0
            if lam == 0.0 {
                0.0
            } else {
                lam * (-ll)
            }
        });
        let signed = (1..=limit.min(n).min(4096))
            .rev()
            .find(|k| spec.log_lambda(*k) > 0.0)
            .unwrap_or(0);
        let carleson = PartialSumSeries::from_terms_with_prefix(cterms, n, signed)?;
        (Some(measure), Some(mz), Some(carleson))
    } else {
        (None, None, None)
    };

    Ok(CantorCriteria {
        valid,
        issues,
        measure,
        measure_zero,
        capacity,
        capacity_zero,
        carleson,
    })
}

/// `Σ 2ⁿ λ_n^{1-γ}`, finite exactly when `∫ |dζ|/d(ζ,E)^γ` is.
pub fn cantor_t_gamma_series(spec: &CantorSpec, gamma: f64, n: usize) -> Result<PartialSumSeries> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(domain("cantor_t_gamma_series", format!("γ = {gamma} must lie in (0,1)")));
    }
    spec.validate()?;
    let ln2 = std::f64::consts::LN_2;
    let terms = (1..=n)
        .take_while(|k| spec.available(*k))
        .map(|k| (k as f64 * ln2 + (1.0 - gamma) * spec.log_lambda(k)).exp());
    PartialSumSeries::from_terms(terms, n)
}

/// Critical exponent `1 + log 2 / log ℓ` for a perfect symmetric set.
pub fn t_gamma_threshold(ratio: f64) -> f64 {
    1.0 + std::f64::consts::LN_2 / ratio.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn perfect_symmetric_lengths() {
        let s = perfect_symmetric(1.0 / 3.0, 6).unwrap();
        assert!(close(s.ell(1), TAU / 3.0, 1e-15));
        assert!(close(s.lambda(1), TAU / 3.0, 1e-15));
        let q = perfect_symmetric(0.25, 4).unwrap();
        assert!(close(q.lambda(2), PI / 4.0, 1e-15));
        for n in 1..=6 {
            assert!(close(2.0 * s.ell(n) + s.lambda(n), s.ell(n - 1), 1e-12));
        }
        assert!(perfect_symmetric(0.5, 3).is_err());
        assert!(perfect_symmetric(0.0, 3).is_err());
        assert!(perfect_symmetric(0.3, 0).is_err());
    }

    #[test]
    fn cantor_levels_nest() {
        let s = perfect_symmetric(1.0 / 3.0, 8).unwrap();
        let e0 = cantor_level(&s, 0).unwrap();
        assert!(e0.is_full());
        let e2 = cantor_level(&s, 2).unwrap();
        assert_eq!(e2.arcs().len(), 4);
        for a in e2.arcs() {
            assert!(close(a.length, TAU / 9.0, 1e-14));
        }
        for k in 1..=8 {
            let ek = cantor_level(&s, k).unwrap();
            let prev = cantor_level(&s, k - 1).unwrap();
            assert_eq!(ek.arcs().len(), 1 << k);
            assert!(close(ek.measure(), 2f64.powi(k as i32) * s.ell(k), 1e-12));
            assert!(ek.is_subset_of(&prev));
        }
        assert!(matches!(cantor_level(&s, 9), Err(Error::Range { .. })));
    }

    #[test]
    fn distance_examples() {
        let e = CircleSet::point(0.0);
        assert!(close(e.distance(Complex64::new(-1.0, 0.0)).unwrap(), 2.0, 1e-15));
        assert!(close(e.distance(Complex64::new(0.5, 0.0)).unwrap(), 0.5, 1e-15));
        for k in 0..50 {
            let th = k as f64 * 0.13;
            let z = Complex64::from_polar(1.0, th);
            assert!(close(e.distance(z).unwrap(), 2.0 * (th / 2.0).sin().abs(), 1e-14));
        }
        assert!(CircleSet::empty().distance(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn neighborhood_of_point() {
        let e = CircleSet::point(0.0);
        for t in [0.01, 0.3, 1.0, 1.9] {
            let nb = e.neighborhood(t).unwrap();
            assert!(close(nb.measure(), 4.0 * (t / 2.0).asin(), 1e-13));
        }
        assert_eq!(e.neighborhood(0.0).unwrap(), e);
        assert!(e.neighborhood(2.0).unwrap().is_full());
        assert!(e.neighborhood(-1.0).is_err());
    }

    #[test]
    fn complementary_intervals_bookkeeping() {
        let half = CircleSet::from_arcs([Arc::new(0.3, PI).unwrap()]);
        let gaps = half.complementary_intervals();
        assert_eq!(gaps.len(), 1);
        assert!(close(gaps[0].length, PI, 1e-14));

        let s = perfect_symmetric(1.0 / 3.0, 3).unwrap();
        let e1 = cantor_level(&s, 1).unwrap();
        let g1 = e1.complementary_intervals();
        let total: f64 = g1.iter().map(|a| a.length).sum();
        assert!(close(total, TAU - 2.0 * s.ell(1), 1e-14));

        let pt = CircleSet::point(0.0);
        let gp = pt.complementary_intervals();
        assert_eq!(gp.len(), 1);
        assert!(close(gp[0].length, TAU, 1e-15));
        assert!(CircleSet::full().complementary_intervals().is_empty());
    }

    #[test]
    fn arcs_across_zero_are_split_and_merged() {
        let e = CircleSet::from_arcs([Arc::new(6.0, 1.0).unwrap(), Arc::new(0.5, 0.5).unwrap()]);
        assert_eq!(e.arcs().len(), 2);
        assert!(close(e.measure(), 1.0 + 0.5 - (0.7168146928204138 - 0.5), 1e-12));
        assert!(e.contains(0.0));
        assert!(e.contains(6.2));
        assert!(!e.contains(3.0));
        let pairs = e.to_pairs();
        assert_eq!(CircleSet::from_pairs(&pairs).unwrap(), e);
    }

    #[test]
    fn cantor_set_distance_matches_level_set() {
        let s = perfect_symmetric(1.0 / 3.0, 10).unwrap();
        let limit = CantorSet::new(&s).unwrap();
        let level = cantor_level(&s, 10).unwrap();
        for k in 0..997 {
            let th = k as f64 * TAU / 997.0;
            let a = limit.angular_distance(th);
            let b = level.angular_distance(th);
            assert!(close(a, b, 1e-12), "θ={th}: {a} vs {b}");
        }
    }

    #[test]
    fn carleson_series_for_point_and_triadic() {
        let pt = CircleSet::point(1.0);
        let c = carleson_criterion(&pt).unwrap();
        assert!(c.exhausted);
        assert!(close(c.total(), TAU * (1.0 / TAU).ln(), 1e-12));
    }

    #[test]
    fn exp_power_criteria_survive_underflow() {
        let spec = CantorSpec::exp_power_valid(1.0, 40).unwrap();
        assert_eq!(spec.log_ell(1100), f64::NEG_INFINITY);
        assert_eq!(spec.log_lambda(1101), f64::NEG_INFINITY);
        let c = cantor_criteria(&spec, 1 << 12).unwrap();
        assert_eq!(c.capacity_zero, Some(true));
        assert_eq!(c.measure_zero, Some(true));
        assert!(c.carleson.unwrap().total().is_finite());
    }

    #[test]
    fn exp_power_valid_shift() {
        let raw = CantorSpec {
            family: CantorFamily::ExpPower { s: 1.0, shift: 0 },
            depth: 6,
        };
        assert!(raw.validate().is_err());
        let fixed = CantorSpec::exp_power_valid(1.0, 6).unwrap();
        assert!(fixed.validate().is_ok());
    }

    #[test]
    fn spec_json_forms() {
        let s: CantorSpec = serde_json::from_str(r#"{"ratio": 0.25, "depth": 5}"#).unwrap();
        assert_eq!(s.family, CantorFamily::Ratio(0.25));
        let l: CantorSpec =
            serde_json::from_str(r#"{"ell": [1.0, 0.3, 0.1], "depth": 3}"#).unwrap();
        assert!(l.validate().is_ok());
        assert!(serde_json::from_str::<CantorSpec>(r#"{"ratio": 0.7, "depth": 5}"#).is_err());
        assert!(serde_json::from_str::<CantorSpec>(r#"{"depth": 5}"#).is_err());
        let back: CantorSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
