//! Order-deterministic floating point accumulation.
//!
//! Every reduction in the crate goes through these helpers so that results are
//! bit-identical regardless of how the work was split across threads.

/// Neumaier (improved Kahan) running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Pairwise (cascade) summation of a slice; the split points depend only on
/// the length, so the result does not depend on thread scheduling.
pub fn pairwise(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        return sum(xs.iter().copied());
    }
    let mid = xs.len() / 2;
    pairwise(&xs[..mid]) + pairwise(&xs[mid..])
}

/// Pairwise sum computed with rayon. Same tree as [`pairwise`], so the result
/// is bit-identical to the sequential version.
pub fn par_pairwise(xs: &[f64]) -> f64 {
    const PAR_BLOCK: usize = 1 << 14;
    if xs.len() <= PAR_BLOCK {
        return pairwise(xs);
    }
    let mid = xs.len() / 2;
    let (a, b) = rayon::join(|| par_pairwise(&xs[..mid]), || par_pairwise(&xs[mid..]));
    a + b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-17);
        }
        assert!((s.value() - (1.0 + 1e-14)).abs() < 1e-18);
    }

    #[test]
    fn parallel_matches_sequential_bitwise() {
        let xs: Vec<f64> = (1..200_000).map(|n| 1.0 / (n as f64).powf(1.3)).collect();
        assert_eq!(pairwise(&xs).to_bits(), par_pairwise(&xs).to_bits());
    }
}
