//! Standalone estimators and bound calculators.

mod deviations;
mod escape;
mod hitting;
mod percolation;
mod range;

pub use deviations::{binomial_lower_tail, binomial_upper_tail, ld_bound, ld_bounds, LdBound, LdBoundReport, LdEntry};
pub use escape::{rho_estimate, EscapeEstimate, EscapeMethod};
pub use hitting::{hit_prob_2d, Asymptotic, HitProb2d, TimeSpec};
pub use percolation::{
    components_by_flood, empty_intersection_frequency, giant_box_fraction, percolation_threshold, site_percolation,
    PercolationResult,
};
pub use range::{range_stats, RangeStats, TailPoint};

/// `ln k!` for `k ≤ max`, by cumulative sums.
pub(crate) struct LnFactorial(Vec<f64>);

impl LnFactorial {
    pub(crate) fn new(max: usize) -> LnFactorial {
        let mut t = Vec::with_capacity(max + 1);
        t.push(0.0);
        let mut acc = 0.0;
        for k in 1..=max {
            acc += (k as f64).ln();
            t.push(acc);
        }
        LnFactorial(t)
    }

    #[inline]
    pub(crate) fn get(&self, k: usize) -> f64 {
        self.0[k]
    }

    pub(crate) fn ln_choose(&self, n: usize, k: usize) -> f64 {
        self.0[n] - self.0[k] - self.0[n - k]
    }
}

/// `ln Σ exp(x_i)`; `-∞` for an empty input.
pub(crate) fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}
