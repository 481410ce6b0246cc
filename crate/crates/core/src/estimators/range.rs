//! Range `|R(t)|` of a single walk.

use serde::Serialize;

use crate::error::Result;
use crate::graph::Graph;
use crate::multiwalk::range_samples;
use crate::stats::Summary;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TailPoint {
    pub a: f64,
    /// `a√t`.
    pub threshold: f64,
    /// Empirical `Pr[|R(t)| ≤ a√t]`.
    pub freq: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RangeStats {
    pub t: u64,
    pub mean: f64,
    pub ci: (f64, f64),
    pub reps: usize,
    pub tail: Vec<TailPoint>,
    /// Largest `c` with `freq(a) ≤ exp(-c/a²)` at every tail point; `None`
    /// when no tail event was observed.
    pub tail_constant: Option<f64>,
}

/// Mean range from `reps` uniform starts, with optional small-range tail
/// frequencies at thresholds `a√t`.
pub fn range_stats(graph: &Graph, t: u64, reps: usize, seed: u64, tail_a: &[f64]) -> Result<RangeStats> {
    let xs = range_samples(graph, t, reps, seed);
    let s = Summary::of(&xs);
    let ci = if reps > 1 { s.normal_ci(1.96) } else { (s.mean, s.mean) };
    let root = (t as f64).sqrt();
    let tail: Vec<TailPoint> = tail_a
        .iter()
        .map(|&a| {
            let threshold = a * root;
            let hits = xs.iter().filter(|&&x| x <= threshold).count();
            TailPoint { a, threshold, freq: hits as f64 / reps as f64 }
        })
        .collect();
    let tail_constant = tail
        .iter()
        .filter(|p| p.freq > 0.0)
        .map(|p| -p.a * p.a * p.freq.ln())
        .reduce(f64::min);
    Ok(RangeStats { t, mean: s.mean, ci, reps, tail, tail_constant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_graph, Family};

    #[test]
    fn zero_steps_range_is_one() {
        let g = generate_graph(&Family::Cycle { n: 50 }).unwrap();
        let r = range_stats(&g, 0, 20, 1, &[]).unwrap();
        assert_eq!(r.mean, 1.0);
        assert!(r.tail_constant.is_none());
    }

    #[test]
    fn mean_grows_and_is_bounded() {
        let g = generate_graph(&Family::Torus { d: 2, n: 30 }).unwrap();
        let mut last = 0.0;
        for t in [0, 5, 20, 80, 300] {
            let r = range_stats(&g, t, 400, 4, &[]).unwrap();
            assert!(r.mean <= (t + 1) as f64);
            assert!(r.mean >= last);
            last = r.mean;
        }
    }

    #[test]
    fn tail_constant_is_the_tightest_point() {
        let g = generate_graph(&Family::Cycle { n: 1000 }).unwrap();
        let r = range_stats(&g, 400, 500, 2, &[0.5, 1.0, 2.0]).unwrap();
        let c = r.tail_constant.unwrap();
        for p in &r.tail {
            assert!(p.freq <= (-c / (p.a * p.a)).exp() + 1e-12);
        }
    }
}
