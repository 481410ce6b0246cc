//! Cover times by independent walkers started from the uniform distribution.
//!
//! Walker `i` of replicate `r` draws its start and its steps from the stream
//! keyed `(seed, r, i)`. The fixed-walkers readout `D(G, m)` and the
//! fixed-length readout `C(G, t)` are therefore two views of one shared
//! walker array, and `D(G, s) > t ⟺ C(G, t) > s` holds per realization.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::linalg::green_sequence;
use crate::graph::{hitting_times_exact, Graph, Vertex};
use crate::rng::{stream_rng, Domain};
use crate::sampling::{Kernel, WalkCursor};
use crate::stats::Summary;

fn walker(graph: &Graph, seed: u64, replicate: u64, index: u64) -> WalkCursor {
    let mut rng = stream_rng(seed, Domain::Walker, &[replicate, index]);
    let start = rng.random_range(0..graph.vertex_count() as u32);
    WalkCursor::from_rng(rng, start, Kernel::Srw)
}

/// Visited bitmap with a remaining-vertex counter.
struct Coverage {
    seen: Vec<bool>,
    remaining: usize,
}

impl Coverage {
    fn new(n: usize) -> Coverage {
        Coverage { seen: vec![false; n], remaining: n }
    }

    #[inline]
    fn visit(&mut self, v: Vertex) {
        let s = &mut self.seen[v as usize];
        if !*s {
            *s = true;
            self.remaining -= 1;
        }
    }

    fn done(&self) -> bool {
        self.remaining == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CoverMode {
    /// `D(G, m)`: walk length needed by `m` walkers.
    FixedWalkers(u64),
    /// `C(G, t)`: walkers of length `t` needed.
    FixedLength(u64),
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MultiWalkCoverResult {
    pub mode: CoverMode,
    pub replicate: u64,
    /// `None` when censored.
    pub value: Option<u64>,
    /// Cap that was hit, when censored.
    pub cap: u64,
}

impl MultiWalkCoverResult {
    pub fn censored(&self) -> bool {
        self.value.is_none()
    }

    /// `value > x`, counting a censored value as exceeding any `x < cap`.
    pub fn exceeds(&self, x: u64) -> bool {
        match self.value {
            Some(v) => v > x,
            None => {
                debug_assert!(x < self.cap);
                true
            }
        }
    }
}

/// `D(G, m)`: steps all `m` walkers together until their ranges cover `V`.
pub fn cover_fixed_walkers(graph: &Graph, m: u64, seed: u64, replicate: u64, horizon_cap: u64) -> Result<MultiWalkCoverResult> {
    if m < 1 {
        return Err(Error::InvalidParams("need at least one walker".into()));
    }
    let mut cov = Coverage::new(graph.vertex_count());
    let mut walkers: Vec<WalkCursor> = (0..m).map(|i| walker(graph, seed, replicate, i)).collect();
    for w in &walkers {
        cov.visit(w.position());
    }
    let mut value = cov.done().then_some(0);
    let mut t = 0;
    while value.is_none() && t < horizon_cap {
        t += 1;
        for w in walkers.iter_mut() {
            cov.visit(w.step(graph));
        }
        if cov.done() {
            value = Some(t);
        }
    }
    Ok(MultiWalkCoverResult { mode: CoverMode::FixedWalkers(m), replicate, value, cap: horizon_cap })
}

/// `C(G, t)`: appends walkers of length `t` until their ranges cover `V`.
pub fn cover_fixed_length(graph: &Graph, t: u64, seed: u64, replicate: u64, walker_cap: u64) -> MultiWalkCoverResult {
    let mut cov = Coverage::new(graph.vertex_count());
    let mut value = None;
    for i in 0..walker_cap {
        let mut w = walker(graph, seed, replicate, i);
        cov.visit(w.position());
        for _ in 0..t {
            cov.visit(w.step(graph));
        }
        if cov.done() {
            value = Some(i + 1);
            break;
        }
    }
    MultiWalkCoverResult { mode: CoverMode::FixedLength(t), replicate, value, cap: walker_cap }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RangeFraction {
    pub t: u64,
    /// `E|R(t)| / |V|`.
    pub p_t: f64,
    pub ci: (f64, f64),
    pub mean_range: f64,
    pub reps: usize,
    /// The identity `p_t = Pr_π[T_v ≤ t]` needs vertex transitivity; set
    /// when the graph family is not known to be transitive.
    pub non_transitive: bool,
}

/// `|R(t)|` for `reps` walks from uniform starts.
pub fn range_samples(graph: &Graph, t: u64, reps: usize, seed: u64) -> Vec<f64> {
    let n = graph.vertex_count();
    let mut stamp = vec![u32::MAX; n];
    (0..reps)
        .map(|r| {
            let mut rng = stream_rng(seed, Domain::Estimator, &[0x4A9E, r as u64]);
            let start = rng.random_range(0..n as u32);
            let mut w = WalkCursor::from_rng(rng, start, Kernel::Srw);
            let tag = r as u32;
            stamp[start as usize] = tag;
            let mut size = 1u64;
            for _ in 0..t {
                let v = w.step(graph) as usize;
                if stamp[v] != tag {
                    stamp[v] = tag;
                    size += 1;
                }
            }
            size as f64
        })
        .collect()
}

pub fn range_fraction(graph: &Graph, t: u64, reps: usize, seed: u64) -> Result<RangeFraction> {
    if reps < 2 {
        return Err(Error::BudgetTooSmall("need at least two walks".into()));
    }
    let n = graph.vertex_count() as f64;
    let s = Summary::of(&range_samples(graph, t, reps, seed));
    let (lo, hi) = s.normal_ci(1.96);
    Ok(RangeFraction {
        t,
        p_t: s.mean / n,
        ci: (lo / n, hi / n),
        mean_range: s.mean,
        reps,
        non_transitive: !graph.family().is_vertex_transitive(),
    })
}

/// Harmonic number `h(n) = Σ_{i=1}^n 1/i`.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).rev().map(|i| 1.0 / i as f64).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct MatthewsBounds {
    /// `H_min^A · h(|A| - 1)`.
    pub lower: f64,
    /// `H_max · h(|V|)`.
    pub upper: f64,
    pub set: Vec<Vertex>,
}

pub fn matthews_bounds(graph: &Graph, set: &[Vertex]) -> Result<MatthewsBounds> {
    if set.is_empty() {
        return Err(Error::InvalidParams("set must be non-empty".into()));
    }
    let h = hitting_times_exact(graph)?;
    let mut a = set.to_vec();
    a.sort_unstable();
    a.dedup();
    // h(|A| - 1): with h(|A|) the bound fails already on K_5, where the
    // exact cover time is 4·h(4) and H_min·h(5) = 4·h(5)
    let lower = h.h_min_over(&a).unwrap_or(0.0) * harmonic(a.len() - 1);
    let upper = h.h_max() * harmonic(graph.vertex_count());
    Ok(MatthewsBounds { lower, upper, set: a })
}

/// `Pr[C(G,t) > (1+δ) log|V| / p_t] ≤ 1 / ((1 - p_t) |V|^δ)`: returns the
/// walker-count threshold and the bound.
pub fn union_bound_threshold(p_t: f64, vertex_count: usize, delta: f64) -> (f64, f64) {
    let n = vertex_count as f64;
    let threshold = (1.0 + delta) * n.ln() / p_t;
    let bound = 1.0 / ((1.0 - p_t) * n.powf(delta));
    (threshold, bound)
}

/// `E[C(G,t)] ≤ (|V| log|V| + (1-p_t)^{-1}) / E|R(t)|`.
pub fn expected_cover_walkers_bound(mean_range: f64, vertex_count: usize) -> f64 {
    let n = vertex_count as f64;
    let p = mean_range / n;
    (n * n.ln() + 1.0 / (1.0 - p)) / mean_range
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdStat {
    /// `min{s : 2s/ν_s ≥ λ^{-1} log|V|}`.
    pub t_lambda: u64,
    /// `min{s : 2sλ ≥ (1-δ) ν_s log|V|}`.
    pub t_lambda_delta: u64,
    pub lambda: f64,
    pub delta: f64,
    pub vertex_count: usize,
}

pub const THRESHOLD_SCAN_CAP: u64 = 1 << 22;

/// Scans `ν_s` over a doubling prefix until both crossings are found; the
/// returned indices are the exact minimal crossings.
pub fn threshold_stats(graph: &Graph, lambda: f64, delta: f64, cap: u64) -> Result<ThresholdStat> {
    if lambda <= 0.0 || !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidParams("need λ > 0 and δ ∈ [0,1)".into()));
    }
    let log_v = (graph.vertex_count() as f64).ln();
    let first = |nu: &[f64], pred: &dyn Fn(f64, f64) -> bool| {
        nu.iter().enumerate().find(|&(s, &v)| pred(s as f64, v)).map(|(s, _)| s as u64)
    };
    let conj = |s: f64, nu: f64| 2.0 * s / nu >= log_v / lambda;
    let lower = |s: f64, nu: f64| 2.0 * s * lambda >= (1.0 - delta) * nu * log_v;
    let mut len = 64u64;
    loop {
        let span = len.min(cap);
        let nu = green_sequence(graph, span)?;
        if let (Some(a), Some(b)) = (first(&nu, &conj), first(&nu, &lower)) {
            return Ok(ThresholdStat {
                t_lambda: a,
                t_lambda_delta: b,
                lambda,
                delta,
                vertex_count: graph.vertex_count(),
            });
        }
        if span >= cap {
            return Err(Error::NoCrossingWithinCap { cap });
        }
        len *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_graph, Family};

    fn g(f: Family) -> Graph {
        generate_graph(&f).unwrap()
    }

    #[test]
    fn single_vertex_covered_immediately() {
        let k1 = g(Family::Complete { n: 1 });
        for m in [1, 5] {
            assert_eq!(cover_fixed_walkers(&k1, m, 1, 0, 10).unwrap().value, Some(0));
        }
        assert_eq!(cover_fixed_length(&k1, 0, 1, 0, 10).value, Some(1));
        assert!(cover_fixed_walkers(&k1, 0, 1, 0, 10).is_err());
    }

    #[test]
    fn starts_covering_gives_zero() {
        let k3 = g(Family::Complete { n: 3 });
        let mut found = false;
        for rep in 0..200 {
            let d = cover_fixed_walkers(&k3, 6, 4, rep, 100).unwrap().value.unwrap();
            let c0 = cover_fixed_length(&k3, 0, 4, rep, 1000).value.unwrap();
            // D(6) = 0 exactly when the first six starts already cover
            assert_eq!(d == 0, c0 <= 6);
            found |= d == 0;
        }
        assert!(found);
    }

    #[test]
    fn duality_on_shared_walkers() {
        let t = g(Family::Torus { d: 2, n: 6 });
        for rep in 0..30 {
            for s in [1u64, 2, 3, 5, 8, 13] {
                let d = cover_fixed_walkers(&t, s, 9, rep, 10_000).unwrap();
                for tt in [0u64, 1, 3, 10, 30, 100, 300] {
                    let c = cover_fixed_length(&t, tt, 9, rep, 100_000);
                    assert_eq!(d.exceeds(tt), c.exceeds(s), "rep {rep} s {s} t {tt}");
                }
            }
        }
    }

    #[test]
    fn monotone_in_walkers_and_length() {
        let c = g(Family::Cycle { n: 20 });
        for rep in 0..20 {
            let ds: Vec<u64> = (1..=8).map(|m| cover_fixed_walkers(&c, m, 2, rep, 1 << 20).unwrap().value.unwrap()).collect();
            assert!(ds.windows(2).all(|w| w[1] <= w[0]));
            let cs: Vec<u64> = [0u64, 5, 10, 40, 200].iter().map(|&t| cover_fixed_length(&c, t, 2, rep, 1 << 20).value.unwrap()).collect();
            assert!(cs.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn single_walker_on_complete_graph() {
        // E[cover] from a uniform start on K_5 is 4·h(4)
        let k5 = g(Family::Complete { n: 5 });
        let xs: Vec<f64> = (0..10_000)
            .map(|rep| cover_fixed_walkers(&k5, 1, 5, rep, 1 << 20).unwrap().value.unwrap() as f64)
            .collect();
        let s = Summary::of(&xs);
        let exact = 4.0 * harmonic(4);
        assert!((s.mean - exact).abs() < 4.0 * s.std_err(), "{} vs {exact}", s.mean);
    }

    #[test]
    fn coupon_collector_at_length_zero() {
        let k5 = g(Family::Complete { n: 5 });
        let xs: Vec<f64> = (0..10_000)
            .map(|rep| cover_fixed_length(&k5, 0, 6, rep, 1 << 20).value.unwrap() as f64)
            .collect();
        let s = Summary::of(&xs);
        let exact = 5.0 * harmonic(5);
        assert!((s.mean - exact).abs() < 4.0 * s.std_err(), "{} vs {exact}", s.mean);
    }

    #[test]
    fn censoring() {
        let c = g(Family::Cycle { n: 100 });
        let d = cover_fixed_walkers(&c, 1, 1, 0, 5).unwrap();
        assert!(d.censored());
        assert!(d.exceeds(4));
        assert!(cover_fixed_length(&c, 1, 1, 0, 3).censored());
    }

    #[test]
    fn range_fraction_basics() {
        let c = g(Family::Cycle { n: 30 });
        let r = range_fraction(&c, 0, 10, 1).unwrap();
        assert_eq!(r.p_t, 1.0 / 30.0);
        let mut prev = 0.0;
        for t in [1u64, 2, 5, 10, 20] {
            let r = range_fraction(&c, t, 500, 1).unwrap();
            assert!(r.mean_range <= t as f64 + 1.0);
            assert!(r.p_t >= prev);
            prev = r.p_t;
        }
        let tree = g(Family::DaryTree { d: 2, depth: 3 });
        assert!(range_fraction(&tree, 3, 10, 1).unwrap().non_transitive);
    }

    #[test]
    fn range_fraction_complete_one_step() {
        // one step on K_n always reaches a new vertex: |R(1)| = 2
        for n in [3usize, 7] {
            let k = g(Family::Complete { n });
            let r = range_fraction(&k, 1, 200, 3).unwrap();
            assert_eq!(r.p_t, 2.0 / n as f64);
        }
        // two steps: |R(2)| = 2 w.p. 1/(n-1), else 3
        let k = g(Family::Complete { n: 4 });
        let r = range_fraction(&k, 2, 40_000, 3).unwrap();
        let exact = (2.0 * (1.0 / 3.0) + 3.0 * (2.0 / 3.0)) / 4.0;
        assert!((r.p_t - exact).abs() < 0.005, "{} vs {exact}", r.p_t);
    }

    #[test]
    fn harmonic_numbers() {
        assert_eq!(harmonic(1), 1.0);
        assert!((harmonic(3) - 11.0 / 6.0).abs() < 1e-15);
        assert_eq!(harmonic(0), 0.0);
    }

    #[test]
    fn matthews_complete_graph() {
        let k4 = g(Family::Complete { n: 4 });
        let b = matthews_bounds(&k4, &[0, 1, 2, 3]).unwrap();
        assert!((b.upper - 6.25).abs() < 1e-9);
        assert!((b.lower - 5.5).abs() < 1e-9);
        // K_n is tight: the exact cover time (n-1)·h(n-1) equals the lower bound
        let k5 = g(Family::Complete { n: 5 });
        let b5 = matthews_bounds(&k5, &[0, 1, 2, 3, 4]).unwrap();
        assert!((b5.lower - 4.0 * harmonic(4)).abs() < 1e-9);
        assert!(matthews_bounds(&k4, &[]).is_err());
    }

    #[test]
    fn matthews_sandwich() {
        for (f, set) in [
            (Family::Cycle { n: 8 }, vec![0, 4]),
            (Family::Complete { n: 5 }, vec![0, 1, 2, 3, 4]),
        ] {
            let graph = g(f);
            let b = matthews_bounds(&graph, &set).unwrap();
            assert!(b.lower <= b.upper);
            // single walker from a fixed vertex, cover time via D with m=1
            // from uniform starts; transitive graphs make the start irrelevant
            let xs: Vec<f64> = (0..4000)
                .map(|rep| cover_fixed_walkers(&graph, 1, 77, rep, 1 << 20).unwrap().value.unwrap() as f64)
                .collect();
            let s = Summary::of(&xs);
            let slack = 3.0 * s.std_err();
            assert!(s.mean + slack >= b.lower && s.mean - slack <= b.upper, "{} not in [{}, {}]", s.mean, b.lower, b.upper);
        }
    }

    /// `ν_s` on `K_4` in closed form: `P^i(v,v) = 1/4 + (3/4)(-1/3)^i`.
    fn nu_k4(s: u64) -> f64 {
        (0..=s).map(|i| 0.25 + 0.75 * (-1.0f64 / 3.0).powi(i as i32)).sum()
    }

    #[test]
    fn thresholds_on_k4_by_direct_scan() {
        let k4 = g(Family::Complete { n: 4 });
        let log_v = 4f64.ln();
        for lambda in [0.5, 1.0, 2.0, 10.0] {
            for delta in [0.0, 0.3] {
                let st = threshold_stats(&k4, lambda, delta, 1 << 10).unwrap();
                let a = (0..).find(|&s| 2.0 * s as f64 / nu_k4(s) >= log_v / lambda).unwrap();
                let b = (0..).find(|&s| 2.0 * s as f64 * lambda >= (1.0 - delta) * nu_k4(s) * log_v).unwrap();
                assert_eq!(st.t_lambda, a);
                assert_eq!(st.t_lambda_delta, b);
            }
        }
        // λ ≥ log|V|·max_s ν_s/(2s) gives a crossing at s = 1
        let max_ratio = (1..50).map(|s| nu_k4(s) / (2.0 * s as f64)).fold(0.0, f64::max);
        assert_eq!(threshold_stats(&k4, log_v * max_ratio, 0.0, 64).unwrap().t_lambda, 1);
    }

    #[test]
    fn threshold_monotonicity() {
        let c = g(Family::Cycle { n: 64 });
        let mut prev = u64::MAX;
        for lambda in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let st = threshold_stats(&c, lambda, 0.2, THRESHOLD_SCAN_CAP).unwrap();
            assert!(st.t_lambda <= prev);
            prev = st.t_lambda;
            let looser = threshold_stats(&c, lambda, 0.5, THRESHOLD_SCAN_CAP).unwrap();
            assert!(looser.t_lambda_delta <= st.t_lambda_delta);
            assert_eq!(threshold_stats(&c, lambda, 0.0, THRESHOLD_SCAN_CAP).unwrap().t_lambda_delta, st.t_lambda);
        }
    }

    #[test]
    fn threshold_scales_like_log_squared_on_cycles() {
        // t_{λ,0} ≤ C λ^{-2} log²|V|; the fitted constant should be stable
        let lambda = 1.0;
        let ratios: Vec<f64> = [64usize, 128, 256]
            .iter()
            .map(|&n| {
                let c = g(Family::Cycle { n });
                let st = threshold_stats(&c, lambda, 0.0, THRESHOLD_SCAN_CAP).unwrap();
                st.t_lambda_delta as f64 / ((n as f64).ln().powi(2) / (lambda * lambda))
            })
            .collect();
        let (lo, hi) = (ratios.iter().copied().fold(f64::INFINITY, f64::min), ratios.iter().copied().fold(0.0, f64::max));
        assert!(hi / lo < 2.0, "{ratios:?}");
        assert!(hi < 5.0, "{ratios:?}");
    }

    #[test]
    fn union_bound_on_torus() {
        let tor = g(Family::Torus { d: 3, n: 12 });
        let t = 200;
        let rf = range_fraction(&tor, t, 4000, 11).unwrap();
        let delta = 0.5;
        let (threshold, bound) = union_bound_threshold(rf.p_t, tor.vertex_count(), delta);
        let reps = 200;
        let exceed = (0..reps)
            .filter(|&rep| cover_fixed_length(&tor, t, 12, rep, 1 << 20).value.unwrap() as f64 > threshold)
            .count();
        let freq = exceed as f64 / reps as f64;
        // binomial slack for the empirical frequency
        assert!(freq <= bound + 3.0 * (bound.max(1.0 / reps as f64) / reps as f64).sqrt(), "{freq} > {bound}");
        let mean_c = Summary::of(
            &(0..reps).map(|rep| cover_fixed_length(&tor, t, 12, rep, 1 << 20).value.unwrap() as f64).collect::<Vec<_>>(),
        );
        assert!(mean_c.mean <= expected_cover_walkers_bound(rf.mean_range, tor.vertex_count()) * 1.05);
    }
}
