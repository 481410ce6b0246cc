//! Escape probability `ρ(d)` of simple random walk on `Z^d`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{log_sum_exp, LnFactorial};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Domain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EscapeMethod {
    /// `1 / Σ_k P^{2k}(0,0)` from `terms` exact return probabilities plus an
    /// asymptotic tail.
    GreenSeries { terms: usize },
    /// Fraction of `reps` walks on `Z^d` that do not return within `horizon`.
    TruncatedMC { horizon: u64, reps: u64 },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EscapeEstimate {
    pub d: usize,
    pub estimate: f64,
    /// 95% interval; for the Monte Carlo method it is widened downwards by
    /// `bias_bound`.
    pub ci: (f64, f64),
    pub method: EscapeMethod,
    /// Upper bound on the upward bias of the truncated estimate. Zero for the
    /// series method.
    pub bias_bound: f64,
}

impl EscapeEstimate {
    /// Whether the two intervals intersect.
    pub fn agrees_with(&self, other: &EscapeEstimate) -> bool {
        self.ci.0 <= other.ci.1 && other.ci.0 <= self.ci.1
    }
}

/// `Σ_{k>K} 2 (d/(4πk))^{d/2}`, the local-limit tail of `P^{2k}(0,0)`.
fn lclt_tail(d: usize, k: f64) -> f64 {
    let s = d as f64 / 2.0;
    2.0 * (d as f64 / (4.0 * std::f64::consts::PI)).powf(s) * (k + 0.5).powf(1.0 - s) / (s - 1.0)
}

fn lclt_term(d: usize, k: f64) -> f64 {
    2.0 * (d as f64 / (4.0 * std::f64::consts::PI * k)).powf(d as f64 / 2.0)
}

/// `P^{2n}(0,0)` on `Z^d` for `n = 0..=terms`.
///
/// `P^{2n}(0,0) = (2n)! / (2d)^{2n} · Σ_{n_1+…+n_d=n} Π 1/(n_i!)²`, with the
/// inner sum built by `d`-fold convolution in log space.
pub fn return_probabilities(d: usize, terms: usize) -> Vec<f64> {
    let lf = LnFactorial::new(2 * terms);
    let a: Vec<f64> = (0..=terms).map(|i| -2.0 * lf.get(i)).collect();
    let mut conv = a.clone();
    for _ in 1..d {
        conv = (0..=terms)
            .map(|m| log_sum_exp((0..=m).map(|i| conv[m - i] + a[i])))
            .collect();
    }
    let ln_step = (2.0 * d as f64).ln();
    (0..=terms)
        .map(|n| (lf.get(2 * n) + conv[n] - 2.0 * n as f64 * ln_step).exp())
        .collect()
}

fn green_series(d: usize, terms: usize) -> EscapeEstimate {
    let p = return_probabilities(d, terms);
    let partial: f64 = p.iter().sum();
    let k = terms as f64;
    let tail = lclt_tail(d, k);
    // the local-limit error decays like 1/k, so the mismatch at the last
    // term bounds the relative error of the whole tail
    let rel = 3.0 * (p[terms] / lclt_term(d, k) - 1.0).abs() + 1.0 / k;
    let g = partial + tail;
    EscapeEstimate {
        d,
        estimate: 1.0 / g,
        ci: (1.0 / (partial + tail * (1.0 + rel)), 1.0 / (partial + tail * (1.0 - rel))),
        method: EscapeMethod::GreenSeries { terms },
        bias_bound: 0.0,
    }
}

fn escapes(d: usize, horizon: u64, seed: u64, walk: u64) -> bool {
    let mut rng = stream_rng(seed, Domain::Estimator, &[0xE5C, d as u64, walk]);
    let mut pos = vec![0i64; d];
    let mut nonzero = 0usize;
    let sides = 2 * d as u32;
    for _ in 0..horizon {
        let r = rng.random_range(0..sides);
        let c = &mut pos[(r >> 1) as usize];
        let before = *c;
        *c += if r & 1 == 0 { 1 } else { -1 };
        if before == 0 {
            nonzero += 1;
        } else if *c == 0 {
            nonzero -= 1;
            if nonzero == 0 {
                return false;
            }
        }
    }
    true
}

fn truncated_mc(d: usize, horizon: u64, reps: u64, seed: u64) -> EscapeEstimate {
    let hits = (0..reps).into_par_iter().filter(|&w| escapes(d, horizon, seed, w)).count();
    let est = hits as f64 / reps as f64;
    let half = 1.96 * (est * (1.0 - est) / reps as f64).sqrt();
    // a visit after the horizon is followed by G = 1/ρ visits in expectation,
    // so Pr[first return after horizon] ≤ ρ · E[visits after horizon]
    let bias = lclt_tail(d, (horizon / 2) as f64) * (est + half).min(1.0);
    EscapeEstimate {
        d,
        estimate: est,
        ci: ((est - half - bias).max(0.0), (est + half).min(1.0)),
        method: EscapeMethod::TruncatedMC { horizon, reps },
        bias_bound: bias,
    }
}

/// `ρ(d) = Pr[T_0^+ = ∞]`. Recurrent dimensions `d ≤ 2` give exactly zero.
pub fn rho_estimate(d: usize, method: EscapeMethod, seed: u64) -> Result<EscapeEstimate> {
    if d == 0 {
        return Err(Error::InvalidParams("dimension must be positive".into()));
    }
    if d <= 2 {
        return Ok(EscapeEstimate { d, estimate: 0.0, ci: (0.0, 0.0), method, bias_bound: 0.0 });
    }
    match method {
        EscapeMethod::GreenSeries { terms } => {
            if terms < 16 {
                return Err(Error::BudgetTooSmall(format!("{terms} series terms, need at least 16")));
            }
            Ok(green_series(d, terms))
        }
        EscapeMethod::TruncatedMC { horizon, reps } => {
            if horizon < 16 || reps < 100 {
                return Err(Error::BudgetTooSmall(format!(
                    "horizon {horizon} and {reps} walks, need at least 16 and 100"
                )));
            }
            Ok(truncated_mc(d, horizon, reps, seed))
        }
    }
}
