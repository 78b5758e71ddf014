//! Logarithmic energy and capacity of subsets of the unit circle.
//!
//! Measures are piecewise constant densities on small arcs ("cells"). The
//! energy `I(μ) = ∬ log 1/|ζ-ξ| dμ dμ` is available both as a Fourier series
//! `Σ |μ̂(n)|²/n` and as a kernel double integral; capacity is `1/inf I(μ)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use std::f64::consts::{PI, TAU};

use crate::circle_sets::{self, normalize_angle, Arc, CircleSet};
use crate::error::{domain, numeric, Result};
use crate::quadrature::GaussLegendre;
use crate::summation::{pairwise, par_pairwise, CompensatedSum};

/// Constant in `cap(I) ≤ c₁ / log(1/|I|)` for short arcs.
///
/// Smallest two-digit constant that dominates the solver capacity of arcs with
/// chord length in `[1e-6, 1e-1]` (see the calibration test below).
pub const ARC_CAPACITY_C1: f64 = 0.91;

/// A cell: uniform density `weight / (2·half_width)` on
/// `[center - half_width, center + half_width]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub center: f64,
    pub half_width: f64,
    pub weight: f64,
}

impl Cell {
    pub fn arc(&self) -> Arc {
        Arc {
            start: normalize_angle(self.center - self.half_width),
            length: 2.0 * self.half_width,
        }
    }
}

/// Probability measure with piecewise constant density on disjoint cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    cells: Vec<Cell>,
}

impl DiscreteMeasure {
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        if cells.is_empty() {
            return Err(domain("DiscreteMeasure", "no cells"));
        }
        for c in &cells {
            if !(c.half_width > 0.0) || !c.center.is_finite() {
                return Err(domain(
                    "DiscreteMeasure",
                    format!("cell at {} has half width {}", c.center, c.half_width),
                ));
            }
            if !(c.weight >= 0.0) {
                return Err(domain("DiscreteMeasure", format!("negative weight {}", c.weight)));
            }
        }
        let total = pairwise(&cells.iter().map(|c| c.weight).collect::<Vec<_>>());
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain("DiscreteMeasure", format!("weights sum to {total}")));
        }
        let mut spans: Vec<(f64, f64)> = cells
            .iter()
            .map(|c| (normalize_angle(c.center - c.half_width), 2.0 * c.half_width))
            .collect();
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        let overlap_tol = 1e-12;
        for w in spans.windows(2) {
            if w[0].0 + w[0].1 > w[1].0 + overlap_tol {
                return Err(domain("DiscreteMeasure", "cells overlap"));
            }
        }
        if let (Some(first), Some(last)) = (spans.first(), spans.last()) {
            if spans.len() > 1 && last.0 + last.1 > first.0 + TAU + overlap_tol {
                return Err(domain("DiscreteMeasure", "cells overlap across angle 0"));
            }
        }
        Ok(Self { cells })
    }

    /// Cells covering `E`, `cells` of them at least, with weights proportional
    /// to arclength (the normalized arclength measure on `E`).
    ///
    /// Arcs are subdivided with cells clustered toward their endpoints, where
    /// equilibrium densities blow up; the full circle is cut uniformly.
    pub fn on_set(e: &CircleSet, cells: usize) -> Result<Self> {
        let geometry = cell_geometry(e, cells)?;
        let total: f64 = geometry.iter().map(|(_, h)| 2.0 * h).sum();
        Self::new(
            geometry
                .into_iter()
                .map(|(center, half_width)| Cell {
                    center,
                    half_width,
                    weight: 2.0 * half_width / total,
                })
                .collect(),
        )
    }

    /// Normalized arclength on the whole circle, `n` equal cells.
    pub fn uniform_circle(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(domain("uniform_circle", "need at least one cell"));
        }
        let h = PI / n as f64;
        Self::new(
            (0..n)
                .map(|k| Cell {
                    center: (2 * k + 1) as f64 * h,
                    half_width: h,
                    weight: 1.0 / n as f64,
                })
                .collect(),
        )
    }

    /// Same cells with new weights (validated).
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.cells.len() {
            return Err(domain("with_weights", "length mismatch"));
        }
        Self::new(
            self.cells
                .iter()
                .zip(weights)
                .map(|(c, w)| Cell { weight: *w, ..*c })
                .collect(),
        )
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn weights(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.weight).collect()
    }

    /// `μ̂(n) = ∫ e^{-inθ} dμ(θ)`.
    pub fn fourier_coefficient(&self, n: i64) -> Complex64 {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        let nf = n as f64;
        for c in &self.cells {
            let x = nf * c.half_width;
            let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
            let (s, co) = (nf * c.center).sin_cos();
            re.add(c.weight * sinc * co);
            im.add(-c.weight * sinc * s);
        }
        Complex64::new(re.value(), im.value())
    }

    /// `Σ_{n=1}^{N} |μ̂(n)|²/n` with a bound on the neglected tail.
    pub fn energy_fourier(&self, n: usize) -> Result<EnergyReport> {
        if n == 0 {
            return Err(domain("energy_fourier", "N must be >= 1"));
        }
        let terms: Vec<f64> = (1..=n)
            .into_par_iter()
            .map(|k| self.fourier_coefficient(k as i64).norm_sqr() / k as f64)
            .collect();
        let c: f64 = self.cells.iter().map(|c| c.weight / c.half_width).sum();
        let nf = n as f64;
        // |μ̂(k)| ≤ min(1, C/k), so the tail is at most Σ_{k>N} min(1/k, C²/k³)
        let tail_bound = if c <= nf {
            c * c / (2.0 * nf * nf)
        } else {
            (c / nf).ln() + 1.0 + 0.5
        };
        Ok(EnergyReport {
            value: par_pairwise(&terms),
            truncation: n,
            tail_bound,
        })
    }

    /// Kernel double integral `∬ log 1/|ζ-ξ| dμ dμ`, computed per cell pair
    /// with the logarithmic singularity integrated in closed form.
    pub fn energy_kernel(&self, quad_order: usize) -> Result<f64> {
        let a = kernel_matrix(&self.cells_geometry(), quad_order)?;
        Ok(quadratic_form(&a, &self.weights()))
    }

    fn cells_geometry(&self) -> Vec<(f64, f64)> {
        self.cells.iter().map(|c| (c.center, c.half_width)).collect()
    }
}

/// A truncated Fourier energy with its tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub value: f64,
    pub truncation: usize,
    pub tail_bound: f64,
}

fn quadratic_form(a: &DMatrix<f64>, w: &[f64]) -> f64 {
    let n = w.len();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = CompensatedSum::new();
            for j in 0..n {
                acc.add(a[(i, j)] * w[j]);
            }
            w[i] * acc.value()
        })
        .collect();
    pairwise(&rows)
}

/// Cell centers and half widths covering `e`.
fn cell_geometry(e: &CircleSet, cells: usize) -> Result<Vec<(f64, f64)>> {
    if e.is_full() {
        let n = cells.max(1);
        let h = PI / n as f64;
        return Ok((0..n).map(|k| ((2 * k + 1) as f64 * h, h)).collect());
    }
    // logical arcs: pieces split at angle 0 are glued back together
    let mut arcs: Vec<Arc> = e.arcs().iter().copied().filter(|a| a.length > 0.0).collect();
    if arcs.len() > 1 {
        let first = arcs[0];
        let last = arcs[arcs.len() - 1];
        if first.start <= 1e-14 && last.end() >= TAU - 1e-14 {
            arcs.pop();
            arcs[0] = Arc {
                start: last.start,
                length: last.length + first.length,
            };
        }
    }
    let total: f64 = arcs.iter().map(|a| a.length).sum();
    if arcs.is_empty() || !(total > 0.0) {
        return Err(domain("DiscreteMeasure::on_set", "set has zero measure"));
    }
    let mut out = Vec::with_capacity(cells.max(arcs.len()));
    for a in &arcs {
        let m = ((cells as f64 * a.length / total).round() as usize).max(1);
        let edge = |k: usize| a.start + 0.5 * a.length * (1.0 - (PI * k as f64 / m as f64).cos());
        for k in 0..m {
            let (lo, hi) = (edge(k), edge(k + 1));
            out.push((0.5 * (lo + hi), 0.5 * (hi - lo)));
        }
    }
    Ok(out)
}

/// `log 1/|e^{iu} - 1|`.
fn log_kernel(u: f64) -> f64 {
    -(2.0 * (0.5 * u).sin().abs()).ln()
}

/// `-log(2|sin(y/2)|/|y|)`, smooth for `|y| < 2π`.
fn kernel_regular_part(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        // sin(y/2)/(y/2) = 1 - y²/24 + y⁴/1920
        let y2 = y * y;
        y2 / 24.0 + y2 * y2 / 2880.0
    } else {
        -((2.0 * (0.5 * y).sin() / y).abs()).ln()
    }
}

/// `∫_{y0}^{y1} (a + b y)(-log|y|) dy`.
fn linear_times_log(a: f64, b: f64, y0: f64, y1: f64) -> f64 {
    let f = |y: f64| {
        if y == 0.0 {
            0.0
        } else {
            let l = y.abs().ln();
            a * (y * l - y) + b * (0.5 * y * y * l - 0.25 * y * y)
        }
    };
    -(f(y1) - f(y0))
}

/// `∫ T(u) log 1/|e^{iu}-1| du` for the overlap trapezoid `T` of two cells.
fn pair_integral(d: f64, hi: f64, hj: f64, rule: &GaussLegendre) -> f64 {
    let big = hi + hj;
    let small = (hi - hj).abs();
    let height = 2.0 * hi.min(hj);
    let mut knots = vec![d - big, d - small, d + small, d + big];
    let k_lo = ((d - big) / TAU).ceil() as i64;
    let k_hi = ((d + big) / TAU).floor() as i64;
    for k in k_lo..=k_hi {
        knots.push(k as f64 * TAU);
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let trapezoid = |u: f64| (big - (u - d).abs()).clamp(0.0, height);
    let mut acc = CompensatedSum::new();
    for w in knots.windows(2) {
        let (p, q) = (w[0], w[1]);
        if q <= p || q <= d - big || p >= d + big {
            continue;
        }
        let pieces = ((q - p) / (0.5 * PI)).ceil().max(1.0) as usize;
        let step = (q - p) / pieces as f64;
        for s in 0..pieces {
            let a = p + s as f64 * step;
            let b = if s + 1 == pieces { q } else { a + step };
            let mid = 0.5 * (a + b);
            let x0 = (mid / TAU).round() * TAU;
            let gap = if x0 < a {
                a - x0
            } else if x0 > b {
                x0 - b
            } else {
                0.0
            };
            if gap > 2.0 * (b - a) {
                acc.add(rule.integrate(a, b, |u| trapezoid(u) * log_kernel(u)));
            } else {
                // T is linear on [a, b]: T(u) = ta + slope (u - a)
                let ta = trapezoid(a);
                let slope = (trapezoid(b) - ta) / (b - a);
                let alpha = ta + slope * (x0 - a);
                acc.add(linear_times_log(alpha, slope, a - x0, b - x0));
                acc.add(rule.integrate(a, b, |u| trapezoid(u) * kernel_regular_part(u - x0)));
            }
        }
    }
    acc.value()
}

/// Energy matrix `A` with `I(μ) = wᵀ A w` for cells `(center, half_width)`.
pub fn kernel_matrix(cells: &[(f64, f64)], quad_order: usize) -> Result<DMatrix<f64>> {
    if quad_order < 2 {
        return Err(domain("energy_kernel", format!("quad_order {quad_order} < 2")));
    }
    let rule = GaussLegendre::new(quad_order);
    let n = cells.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| {
                    let (ci, hi) = cells[i];
                    let (cj, hj) = cells[j];
                    let d = (ci - cj).rem_euclid(TAU);
                    let d = if d > PI { d - TAU } else { d };
                    pair_integral(d, hi, hj, &rule) / (4.0 * hi * hj)
                })
                .collect()
        })
        .collect();
    let mut a = DMatrix::zeros(n, n);
    for (i, row) in rows.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            a[(i, i + k)] = v;
            a[(i + k, i)] = v;
        }
    }
    Ok(a)
}

/// `cap(E)`, or infinity when the minimal energy vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Capacity {
    Finite(f64),
    Infinite,
}

impl Capacity {
    pub fn value(&self) -> f64 {
        match self {
            Capacity::Finite(v) => *v,
            Capacity::Infinite => f64::INFINITY,
        }
    }

    pub fn from_energy(energy: f64, zero_tol: f64) -> Self {
        if energy <= zero_tol {
            Capacity::Infinite
        } else {
            Capacity::Finite(1.0 / energy)
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Capacity::Infinite)
    }
}

impl Serialize for Capacity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Capacity::Finite(v) => s.serialize_f64(*v),
            Capacity::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Controls for the equilibrium solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SolverParams {
    /// Minimal number of cells (every arc gets at least one).
    pub cells: usize,
    pub iters: usize,
    /// Target KKT residual.
    pub tol: f64,
    pub quad_order: usize,
    /// Energies at or below this are treated as zero (infinite capacity).
    pub zero_energy_tol: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            cells: 200,
            iters: 20_000,
            tol: 1e-6,
            quad_order: 16,
            zero_energy_tol: 1e-10,
        }
    }
}

/// Energy minimizer over probability measures carried by the cells of `E`.
#[derive(Debug, Clone, Serialize)]
pub struct Equilibrium {
    pub measure: DiscreteMeasure,
    pub energy: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl Equilibrium {
    pub fn capacity(&self, zero_tol: f64) -> Capacity {
        Capacity::from_energy(self.energy, zero_tol)
    }
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (k, x) in u.iter().enumerate() {
        css += x;
        let t = (css - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Spread of the gradient on the support plus any violation off it.
fn kkt_residual(a: &DMatrix<f64>, w: &[f64]) -> f64 {
    let g = a * DVector::from_column_slice(w) * 2.0;
    let support_floor = 1e-13;
    let on: Vec<f64> = (0..w.len()).filter(|i| w[*i] > support_floor).map(|i| g[i]).collect();
    if on.is_empty() {
        return f64::INFINITY;
    }
    let lo = on.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = on.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let violation = (0..w.len())
        .filter(|i| w[*i] <= support_floor)
        .map(|i| (lo - g[i]).max(0.0))
        .fold(0.0, f64::max);
    (hi - lo).max(violation)
}

/// Equality-constrained minimizer on the support of `w`, if it is feasible.
fn polish(a: &DMatrix<f64>, w: &[f64]) -> Option<Vec<f64>> {
    let support: Vec<usize> = (0..w.len()).filter(|i| w[*i] > 1e-13).collect();
    let m = support.len();
    let sub = DMatrix::from_fn(m, m, |i, j| a[(support[i], support[j])]);
    let x = sub.lu().solve(&DVector::from_element(m, 1.0))?;
    let s: f64 = x.iter().sum();
    if !(s.abs() > 0.0) || x.iter().any(|v| !v.is_finite() || *v / s < 0.0) {
        return None;
    }
    let mut out = vec![0.0; w.len()];
    for (k, i) in support.iter().enumerate() {
        out[*i] = x[k] / s;
    }
    Some(out)
}

/// Minimizes `wᵀ A w` over the simplex: accelerated projected gradient from
/// uniform weights, then an exact solve on the detected support.
fn minimize_on_simplex(a: &DMatrix<f64>, iters: usize, tol: f64) -> (Vec<f64>, f64, usize, bool) {
    let n = a.nrows();
    let energy = |w: &[f64]| quadratic_form(a, w);
    // Lipschitz constant of the gradient 2Aw via power iteration
    let mut v = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.618).sin() * 0.1);
    let mut lambda = 0.0;
    for _ in 0..200 {
        let av = a * &v;
        let norm = av.norm();
        if norm == 0.0 {
            break;
        }
        lambda = norm / v.norm();
        v = av / norm;
    }
    let step = 1.0 / (2.0 * lambda.max(1e-300));
    let mut w = vec![1.0 / n as f64; n];
    let mut y = w.clone();
    let mut t = 1.0f64;
    let mut iterations = 0;
    let mut residual = kkt_residual(a, &w);
    while iterations < iters && residual > tol {
        iterations += 1;
        let g = a * DVector::from_column_slice(&y) * 2.0;
        let mut next: Vec<f64> = y.iter().zip(g.iter()).map(|(x, gi)| x - step * gi).collect();
        project_simplex(&mut next);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        y = next
            .iter()
            .zip(&w)
            .map(|(xn, xo)| xn + beta * (xn - xo))
            .collect();
        w = next;
        t = t_next;
        if iterations % 50 == 0 {
            if let Some(p) = polish(a, &w) {
                if energy(&p) <= energy(&w) + 1e-15 {
                    let r = kkt_residual(a, &p);
                    if r <= tol {
                        w = p;
                        residual = r;
                        break;
                    }
                }
            }
            residual = kkt_residual(a, &w);
        }
    }
    if residual > tol {
        if let Some(p) = polish(a, &w) {
            let r = kkt_residual(a, &p);
            if r < residual && energy(&p) <= energy(&w) + 1e-15 {
                w = p;
                residual = r;
            }
        }
    }
    let e = energy(&w);
    (w, e, iterations, residual <= tol)
}

/// Equilibrium measure of `E` among piecewise constant measures on `params.cells`
/// cells.
pub fn equilibrium_measure(e: &CircleSet, params: &SolverParams) -> Result<Equilibrium> {
    let base = DiscreteMeasure::on_set(e, params.cells)?;
    let a = kernel_matrix(&base.cells_geometry(), params.quad_order)?;
    let (mut w, energy, iterations, converged) = minimize_on_simplex(&a, params.iters, params.tol);
    let s: f64 = w.iter().sum();
    for x in &mut w {
        *x /= s;
    }
    if !energy.is_finite() {
        return Err(numeric("equilibrium_measure", "energy is not finite"));
    }
    let kkt = kkt_residual(&a, &w);
    Ok(Equilibrium {
        measure: base.with_weights(&w)?,
        energy: energy.max(0.0),
        kkt_residual: kkt,
        iterations,
        converged,
    })
}

/// `cap(E)` from the equilibrium solver.
pub fn capacity(e: &CircleSet, params: &SolverParams) -> Result<Capacity> {
    Ok(equilibrium_measure(e, params)?.capacity(params.zero_energy_tol))
}

/// One point of a capacity curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    pub capacity: Capacity,
    pub upper_bound: Capacity,
    pub kkt_residual: f64,
}

/// `t ↦ cap(E_t)` on an increasing grid, with the bound
/// `(∫_t^2 ds/|E_s|)^{-1}` alongside.
pub fn capacity_curve(e: &CircleSet, ts: &[f64], params: &SolverParams) -> Result<Vec<CurvePoint>> {
    if ts.iter().any(|t| !(*t > 0.0)) || ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("capacity_curve", "grid must be positive and increasing"));
    }
    ts.iter()
        .map(|&t| {
            let nb = e.neighborhood(t)?;
            let eq = equilibrium_measure(&nb, params)?;
            Ok(CurvePoint {
                t,
                capacity: eq.capacity(params.zero_energy_tol),
                upper_bound: capacity_upper_bound(e, t)?,
                kkt_residual: eq.kkt_residual,
            })
        })
        .collect()
}

/// CSV with columns `t,cap,upper_bound`.
pub fn curve_to_csv(curve: &[CurvePoint]) -> String {
    let mut out = String::from("t,cap,upper_bound\n");
    for p in curve {
        out.push_str(&format!(
            "{},{},{}\n",
            crate::fmt_f64(p.t),
            crate::fmt_f64(p.capacity.value()),
            crate::fmt_f64(p.upper_bound.value())
        ));
    }
    out
}

/// `(∫_t^2 ds/|E_s|)^{-1}`, an upper bound for `cap(E_t)`.
pub fn capacity_upper_bound(e: &CircleSet, t: f64) -> Result<Capacity> {
    if !(t > 0.0 && t <= 2.0) {
        return Err(domain("capacity_upper_bound", format!("t = {t} must lie in (0, 2]")));
    }
    if t >= 2.0 {
        return Ok(Capacity::Infinite);
    }
    let integral = circle_sets::inverse_measure_integral(e, t, 2.0)?;
    Ok(if integral > 0.0 {
        Capacity::Finite(1.0 / integral)
    } else {
        Capacity::Infinite
    })
}

/// `c₁ / log(1/|I|)` with `|I|` the chord length of the arc.
pub fn arc_capacity_bound(arc: &Arc) -> Result<f64> {
    arc_capacity_bound_with(arc, ARC_CAPACITY_C1)
}

pub fn arc_capacity_bound_with(arc: &Arc, c1: f64) -> Result<f64> {
    let len = arc.chord_length();
    if !(len > 0.0 && len < 1.0) {
        return Err(domain(
            "arc_capacity_bound",
            format!("chord length {len} must lie in (0, 1)"),
        ));
    }
    Ok(c1 / (1.0 / len).ln())
}

/// Smallest `c` with `cap(I) ≤ c/log(1/|I|)` for solver capacities of arcs of
/// the given chord lengths.
pub fn calibrate_arc_constant(chords: &[f64], params: &SolverParams) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &c in chords {
        let arc = Arc::new(0.0, circle_sets::chord_angle(c))?;
        let cap = capacity(&CircleSet::from_arcs([arc]), params)?.value();
        worst = worst.max(cap * (1.0 / c).ln());
    }
    Ok(worst)
}
