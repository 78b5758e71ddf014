//! One-dimensional quadrature: Gauss–Legendre rules and adaptive
//! Gauss–Kronrod (7/15) integration with user breakpoints.

use crate::summation::CompensatedSum;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `n` points, computed by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = CompensatedSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(mid + half * x));
        }
        half * acc.value()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        rk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            rg += WG[j / 2] * (f1 + f2);
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Controls for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_intervals: 2000,
        }
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// Globally adaptive G7/K15 integration of `f` over `[a, b]`, splitting first
/// at every interior breakpoint.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: AdaptiveOptions,
) -> Integral {
    if a == b {
        return Integral {
            value: 0.0,
            error: 0.0,
            converged: true,
        };
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| *x > lo && *x < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![lo];
    edges.extend(cuts);
    edges.push(hi);

    // (a, b, value, error)
    let mut pieces: Vec<(f64, f64, f64, f64)> = edges
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();

    loop {
        let total: f64 = pieces.iter().map(|p| p.2).sum();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= tol || pieces.len() >= opts.max_intervals {
            let value = {
                let mut acc = CompensatedSum::new();
                pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
                for p in &pieces {
                    acc.add(p.2);
                }
                acc.value()
            };
            return Integral {
                value: sign * value,
                error: err,
                converged: err <= tol,
            };
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (pa, pb, _, _) = pieces.swap_remove(idx);
        let m = 0.5 * (pa + pb);
        if m <= pa || m >= pb {
            // interval cannot be split further in floating point
            pieces.push((pa, pb, gk15(&f, pa, pb).0, 0.0));
            continue;
        }
        let (v1, e1) = gk15(&f, pa, m);
        let (v2, e2) = gk15(&f, m, pb);
        pieces.push((pa, m, v1, e1));
        pieces.push((m, pb, v2, e2));
    }
}

/// Integrates `f` over `[a, b]` with `0 < a < b` after the substitution
/// `t = e^u`, which grades the mesh geometrically toward 0.
pub fn adaptive_log<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: AdaptiveOptions,
) -> Integral {
    debug_assert!(a > 0.0 && b > 0.0);
    let logs: Vec<f64> = breakpoints
        .iter()
        .filter(|x| **x > 0.0)
        .map(|x| x.ln())
        .collect();
    adaptive(
        |u| {
            let t = u.exp();
            f(t) * t
        },
        a.ln(),
        b.ln(),
        &logs,
        opts,
    )
}

/// For each lower limit `x_i` returns `∫_{x_i}^{upper} f`, integrating once
/// over each gap between consecutive sorted limits.
pub fn integrals_to_upper<F: Fn(f64) -> f64>(
    f: F,
    lowers: &[f64],
    upper: f64,
    breakpoints: &[f64],
    log_scale: bool,
    opts: AdaptiveOptions,
) -> Vec<f64> {
    let mut order: Vec<usize> = (0..lowers.len()).collect();
    order.sort_by(|&i, &j| lowers[j].total_cmp(&lowers[i]));
    let mut bps = breakpoints.to_vec();
    bps.sort_by(f64::total_cmp);
    let mut out = vec![0.0; lowers.len()];
    let mut acc = CompensatedSum::new();
    let mut prev = upper;
    for &i in &order {
        let x = lowers[i].min(upper);
        if x < prev {
            let lo = bps.partition_point(|b| *b <= x);
            let hi = bps.partition_point(|b| *b < prev);
            let inner = &bps[lo..hi.max(lo)];
            let piece = if log_scale {
                adaptive_log(&f, x, prev, inner, opts)
            } else {
                adaptive(&f, x, prev, inner, opts)
            };
            acc.add(piece.value);
            prev = x;
        }
        out[i] = acc.value();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(8);
        // exact up to degree 15
        let v = rule.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let wsum: f64 = rule.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_high_order_is_accurate() {
        let rule = GaussLegendre::new(64);
        let v = rule.integrate(0.0, std::f64::consts::PI, f64::sin);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_kinks_at_breakpoints() {
        let r = adaptive(|x: f64| x.abs(), -1.0, 2.0, &[0.0], AdaptiveOptions::default());
        assert!((r.value - 2.5).abs() < 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn adaptive_log_grades_toward_zero() {
        // ∫_{1e-12}^{1} dt/t = 12 ln 10
        let r = adaptive_log(|t| 1.0 / t, 1e-12, 1.0, &[], AdaptiveOptions::default());
        assert!((r.value - 12.0 * 10f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn integrals_to_upper_accumulates() {
        let lowers = [0.5, 0.1, 0.9, 0.1];
        let v = integrals_to_upper(|x| 2.0 * x, &lowers, 1.0, &[], false, AdaptiveOptions::default());
        for (x, got) in lowers.iter().zip(&v) {
            assert!((got - (1.0 - x * x)).abs() < 1e-13);
        }
    }
}
