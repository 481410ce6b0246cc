//! Chernoff-type bounds for Bernoulli sums against exact binomial tails.

use serde::Serialize;

use super::{log_sum_exp, LnFactorial};
use crate::error::{Error, Result};

/// Largest `n` for which exact tails are evaluated.
pub const EXACT_TAIL_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LdBound {
    /// `Pr[S_n ≥ np(1+δ)] ≤ (1+pδ)^n / (1+δ)^{(1+δ)np}`, `δ ≥ 0`.
    UpperMgf,
    /// `Pr[S_n ≥ np(1+δ)] ≤ exp(-npδ log(1+δ)/4)`, `δ ≥ 0`.
    UpperExp,
    /// `Pr[S_n ≤ np(1-δ)] ≤ (1-pδ)^n / (1-δ)^{(1-δ)np}`, `0 < δ < 1`.
    LowerMgf,
    /// `Pr[S_n ≤ np(1-δ)] ≤ exp(-npδ²/4)`, `0 < δ < 1`.
    LowerExp,
    /// `Pr[sup_{n≥k} S_n/n ≥ p(1+δ)] ≤ e^{-kpδ log(1+δ)/4} / (1 - e^{-pδ log(1+δ)/4})`, `δ ≥ 1`.
    SupUpper,
    /// `Pr[∃ n ≥ k: S_n/n ≤ p(1-δ)] ≤ 8δ^{-2} e^{-kpδ²/4}`, `0 < δ < 1`.
    InfLower,
}

impl LdBound {
    pub const ALL: [LdBound; 6] = [
        LdBound::UpperMgf,
        LdBound::UpperExp,
        LdBound::LowerMgf,
        LdBound::LowerExp,
        LdBound::SupUpper,
        LdBound::InfLower,
    ];

    fn uses_k(self) -> bool {
        matches!(self, LdBound::SupUpper | LdBound::InfLower)
    }

    fn upper(self) -> bool {
        matches!(self, LdBound::UpperMgf | LdBound::UpperExp | LdBound::SupUpper)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LdEntry {
    pub bound: LdBound,
    pub value: f64,
    /// Exact probability of the fixed-`n` event; for the supremum forms the
    /// event at `n = k`, which is contained in the bounded event.
    pub exact: Option<f64>,
    pub holds: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LdBoundReport {
    pub n: u64,
    pub p: f64,
    pub delta: f64,
    pub k: Option<u64>,
    pub entries: Vec<LdEntry>,
}

impl LdBoundReport {
    /// No entry with an exact value exceeds its bound.
    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.holds != Some(false))
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!("p = {p} must lie in (0,1)")))
    }
}

/// Value of one bound. `k` is required by the supremum forms; `n` by the others.
pub fn ld_bound(which: LdBound, n: u64, p: f64, delta: f64, k: Option<u64>) -> Result<f64> {
    check_p(p)?;
    let in_unit = delta > 0.0 && delta < 1.0;
    let ok = match which {
        LdBound::UpperMgf | LdBound::UpperExp => delta >= 0.0,
        LdBound::SupUpper => delta >= 1.0,
        _ => in_unit,
    };
    if !ok {
        return Err(Error::DomainError(format!("δ = {delta} outside the range of {which:?}")));
    }
    let nf = n as f64;
    let np = nf * p;
    let v = match which {
        LdBound::UpperMgf => (nf * (p * delta).ln_1p() - (1.0 + delta) * np * delta.ln_1p()).exp(),
        LdBound::UpperExp => (-np * delta * delta.ln_1p() / 4.0).exp(),
        LdBound::LowerMgf => (nf * (-p * delta).ln_1p() - (1.0 - delta) * np * (-delta).ln_1p()).exp(),
        LdBound::LowerExp => (-np * delta * delta / 4.0).exp(),
        LdBound::SupUpper | LdBound::InfLower => {
            let k = k
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::DomainError(format!("{which:?} needs k ≥ 1")))? as f64;
            if which == LdBound::SupUpper {
                let r = p * delta * delta.ln_1p() / 4.0;
                (-k * r).exp() / -(-r).exp_m1()
            } else {
                8.0 / (delta * delta) * (-k * p * delta * delta / 4.0).exp()
            }
        }
    };
    Ok(v)
}

fn ln_pmf(lf: &LnFactorial, n: u64, p: f64, j: u64) -> f64 {
    lf.ln_choose(n as usize, j as usize) + j as f64 * p.ln() + (n - j) as f64 * (-p).ln_1p()
}

/// Smallest integer `≥ x`, forgiving rounding just above an integer.
fn ceil_tol(x: f64) -> f64 {
    (x - 1e-9 * x.abs().max(1.0)).ceil()
}

fn floor_tol(x: f64) -> f64 {
    (x + 1e-9 * x.abs().max(1.0)).floor()
}

/// Exact `Pr[S_n ≥ x]`, summed in log space.
pub fn binomial_upper_tail(n: u64, p: f64, x: f64) -> f64 {
    let lo = ceil_tol(x).max(0.0);
    if lo > n as f64 {
        return 0.0;
    }
    let lf = LnFactorial::new(n as usize);
    log_sum_exp((lo as u64..=n).map(|j| ln_pmf(&lf, n, p, j))).exp().min(1.0)
}

/// Exact `Pr[S_n ≤ x]`, summed in log space.
pub fn binomial_lower_tail(n: u64, p: f64, x: f64) -> f64 {
    let hi = floor_tol(x).min(n as f64);
    if hi < 0.0 {
        return 0.0;
    }
    let lf = LnFactorial::new(n as usize);
    log_sum_exp((0..=hi as u64).map(|j| ln_pmf(&lf, n, p, j))).exp().min(1.0)
}

/// Every bound whose parameter range contains `δ`, each compared with the
/// exact binomial probability of its event.
pub fn ld_bounds(n: u64, p: f64, delta: f64, k: Option<u64>) -> Result<LdBoundReport> {
    check_p(p)?;
    let mut entries = Vec::new();
    for which in LdBound::ALL {
        if which.uses_k() && k.is_none() {
            continue;
        }
        let Ok(value) = ld_bound(which, n, p, delta, k) else { continue };
        let m = if which.uses_k() { k.unwrap_or(0) } else { n };
        let exact = (m <= EXACT_TAIL_CAP).then(|| {
            let mp = m as f64 * p;
            if which.upper() {
                binomial_upper_tail(m, p, mp * (1.0 + delta))
            } else {
                binomial_lower_tail(m, p, mp * (1.0 - delta))
            }
        });
        let holds = exact.map(|e| value >= e * (1.0 - 1e-12));
        entries.push(LdEntry { bound: which, value, exact, holds });
    }
    if entries.is_empty() {
        return Err(Error::DomainError(format!("δ = {delta} is outside the range of every bound")));
    }
    Ok(LdBoundReport { n, p, delta, k, entries })
}
