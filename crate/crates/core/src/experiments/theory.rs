//! Leading-order predictions of the susceptibility on each graph family.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{rho_estimate, EscapeMethod};

/// Series terms used for `ρ(d)` inside predictions.
pub const RHO_TERMS: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Formula {
    /// `t_{λ,n} = (λ^{-1} log(λn))²`, cycles.
    CycleThreshold,
    /// `f(n,λ) = (2/π) λ^{-1} log n · log(λ^{-1} log n)`, two-dimensional tori.
    TorusPlanar,
    /// `d log n / (λ ρ(d))`, tori of dimension `d ≥ 3`.
    TorusHigh,
    /// `λ^{-1} log n`, complete graphs.
    Complete,
    /// `(n/λ) log(n/λ)` for depth `n`, regular trees.
    Tree,
    /// `C λ^{-1} γ^{-1} log n`, expanders with spectral gap `γ`.
    Expander,
    /// `c · min{max{ds, s²}, n²}` with `s = λ^{-1} log(λn/d)`, gadget rings.
    GadgetRing,
}

impl Formula {
    pub const ALL: [Formula; 7] = [
        Formula::CycleThreshold,
        Formula::TorusPlanar,
        Formula::TorusHigh,
        Formula::Complete,
        Formula::Tree,
        Formula::Expander,
        Formula::GadgetRing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formula::CycleThreshold => "cycle_threshold",
            Formula::TorusPlanar => "torus_planar",
            Formula::TorusHigh => "torus_high",
            Formula::Complete => "complete",
            Formula::Tree => "tree",
            Formula::Expander => "expander",
            Formula::GadgetRing => "gadget_ring",
        }
    }

    pub fn parse(s: &str) -> Result<Formula> {
        Formula::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown formula '{s}'")))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inputs of a formula. Unused fields are ignored.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TheoryParams {
    /// Side length, vertex count or depth, per family.
    pub n: f64,
    pub lambda: f64,
    /// Dimension or degree.
    pub d: usize,
    /// Spectral gap.
    pub gamma: f64,
    /// Multiplicative constant for the `≍` formulas.
    pub constant: f64,
}

impl TheoryParams {
    pub fn new(n: f64, lambda: f64) -> TheoryParams {
        TheoryParams { n, lambda, d: 1, gamma: 1.0, constant: 1.0 }
    }

    pub fn dim(mut self, d: usize) -> TheoryParams {
        self.d = d;
        self
    }

    pub fn gap(mut self, gamma: f64) -> TheoryParams {
        self.gamma = gamma;
        self
    }

    pub fn constant(mut self, c: f64) -> TheoryParams {
        self.constant = c;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoryPrediction {
    pub formula: Formula,
    pub value: f64,
    /// Interval carried over from `ρ(d)` where it enters.
    pub ci: Option<(f64, f64)>,
    pub inputs: TheoryParams,
    /// Regime conditions that fail at this finite size.
    pub warnings: Vec<String>,
    /// The formula vanishes or is undefined at these inputs.
    pub degenerate: bool,
}

pub fn theory(formula: Formula, p: TheoryParams) -> Result<TheoryPrediction> {
    if !(p.n > 0.0 && p.lambda > 0.0) {
        return Err(Error::InvalidParams(format!("n = {} and λ = {} must be positive", p.n, p.lambda)));
    }
    let (n, lambda) = (p.n, p.lambda);
    let ln_n = n.ln();
    let mut warnings = Vec::new();
    let mut ci = None;
    let value = match formula {
        Formula::CycleThreshold => {
            if lambda * n <= 1.0 {
                warnings.push("λn ≤ 1".into());
            }
            ((lambda * n).ln() / lambda).powi(2)
        }
        Formula::TorusPlanar => {
            if lambda >= ln_n {
                warnings.push("requires λ ≪ log n".into());
            }
            2.0 / std::f64::consts::PI / lambda * ln_n * (ln_n / lambda).ln()
        }
        Formula::TorusHigh => {
            if p.d < 3 {
                return Err(Error::InvalidParams("ρ(d) vanishes for d < 3".into()));
            }
            let vol = n.powi(p.d as i32);
            if !(ln_n < lambda * vol && lambda * vol < vol * ln_n) {
                warnings.push("requires log n ≪ λn^d ≪ n^d log n".into());
            }
            let rho = rho_estimate(p.d, EscapeMethod::GreenSeries { terms: RHO_TERMS }, 0)?;
            let k = p.d as f64 * ln_n / lambda;
            ci = Some((k / rho.ci.1, k / rho.ci.0));
            k / rho.estimate
        }
        Formula::Complete => {
            if lambda > ln_n {
                warnings.push("λ above log n".into());
            }
            ln_n / lambda
        }
        Formula::Tree => {
            if lambda > p.constant.max(1.0) * ln_n {
                warnings.push("requires λ ≤ c log n".into());
            }
            n / lambda * (n / lambda).ln()
        }
        Formula::Expander => {
            if !(p.gamma > 0.0) {
                return Err(Error::InvalidParams("spectral gap must be positive".into()));
            }
            p.constant * ln_n / (lambda * p.gamma)
        }
        Formula::GadgetRing => {
            let d = p.d as f64;
            if 2.0 * d > n {
                warnings.push("requires 2d ≤ n".into());
            }
            if lambda * n <= d {
                warnings.push("λn/d ≤ 1".into());
            }
            let s = (lambda * n / d).ln() / lambda;
            p.constant * (d * s).max(s * s).min(n * n)
        }
    };
    let degenerate = !(value.is_finite() && value > 0.0);
    if degenerate {
        warnings.push("prediction is not positive".into());
    }
    Ok(TheoryPrediction { formula, value, ci, inputs: p, warnings, degenerate })
}
