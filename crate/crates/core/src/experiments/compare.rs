//! Observed cell statistics against predictions under a tolerance policy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::{linear_fit, LinearFit};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TolerancePolicy {
    /// `|observed - predicted| ≤ tol` per cell.
    Absolute { tol: f64 },
    /// `observed / predicted ∈ [lo, hi]` per cell.
    RatioBand { lo: f64, hi: f64 },
    /// Regression of `log observed` on `log predicted` has slope in
    /// `[lo, hi]`, and the ratio varies by at most `stability` across cells.
    Slope { lo: f64, hi: f64, stability: f64 },
    /// The ratio varies by at most `factor` across cells.
    Stable { factor: f64 },
    /// `observed / predicted ≥ min` per cell.
    AtLeast { min: f64 },
}

/// One observed cell: a mean and its interval.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Observation {
    pub mean: f64,
    pub ci: (f64, f64),
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CellVerdict {
    pub observed: f64,
    pub predicted: f64,
    pub ratio: f64,
    pub ratio_ci: (f64, f64),
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictTable {
    pub policy: TolerancePolicy,
    pub cells: Vec<CellVerdict>,
    pub fit: Option<LinearFit>,
    /// Largest over smallest ratio.
    pub spread: f64,
    pub passed: bool,
    pub detail: String,
}

pub fn compare(observed: &[Observation], predicted: &[f64], policy: TolerancePolicy) -> Result<VerdictTable> {
    if observed.len() != predicted.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} observed cells, {} predictions",
            observed.len(),
            predicted.len()
        )));
    }
    if observed.is_empty() {
        return Err(Error::ShapeMismatch("no cells to compare".into()));
    }
    let mut cells: Vec<CellVerdict> = observed
        .iter()
        .zip(predicted)
        .map(|(o, &p)| CellVerdict {
            observed: o.mean,
            predicted: p,
            ratio: o.mean / p,
            ratio_ci: (o.ci.0 / p, o.ci.1 / p),
            pass: true,
        })
        .collect();
    let ratios: Vec<f64> = cells.iter().map(|c| c.ratio).collect();
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = max / min;
    let mut fit = None;
    let (passed, detail) = match policy {
        TolerancePolicy::Absolute { tol } => {
            for c in &mut cells {
                c.pass = (c.observed - c.predicted).abs() <= tol;
            }
            (cells.iter().all(|c| c.pass), format!("|observed - predicted| ≤ {tol}"))
        }
        TolerancePolicy::RatioBand { lo, hi } => {
            for c in &mut cells {
                c.pass = (lo..=hi).contains(&c.ratio);
            }
            (cells.iter().all(|c| c.pass), format!("ratios in [{min:.4}, {max:.4}], band [{lo}, {hi}]"))
        }
        TolerancePolicy::AtLeast { min: floor } => {
            for c in &mut cells {
                c.pass = c.ratio >= floor;
            }
            (cells.iter().all(|c| c.pass), format!("smallest ratio {min:.4}, floor {floor}"))
        }
        TolerancePolicy::Stable { factor } => {
            let ok = spread <= factor;
            (ok, format!("constant in [{min:.4}, {max:.4}], spread {spread:.3} ≤ {factor}"))
        }
        TolerancePolicy::Slope { lo, hi, stability } => {
            if cells.len() < 2 {
                return Err(Error::ShapeMismatch("slope test needs at least two cells".into()));
            }
            let xs: Vec<f64> = predicted.iter().map(|p| p.ln()).collect();
            let ys: Vec<f64> = observed.iter().map(|o| o.mean.ln()).collect();
            let f = linear_fit(&xs, &ys);
            fit = Some(f);
            let ok = (lo..=hi).contains(&f.slope) && spread <= stability;
            (
                ok,
                format!(
                    "slope {:.4} ± {:.4} in [{lo}, {hi}], constant spread {spread:.3} ≤ {stability}",
                    f.slope, f.slope_std_err
                ),
            )
        }
    };
    if !passed && matches!(policy, TolerancePolicy::Stable { .. } | TolerancePolicy::Slope { .. }) {
        for c in &mut cells {
            c.pass = false;
        }
    }
    Ok(VerdictTable { policy, cells, fit, spread, passed, detail })
}
