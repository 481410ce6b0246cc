//! Hitting probabilities of a far point by planar walk, with the matching
//! asymptotic regime.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::rng::{stream_rng, Domain};
use crate::sampling::{Kernel, WalkCursor};
use crate::stats::Summary;

/// Time budget as a function of `‖a‖`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TimeSpec {
    /// `t = ⌈c‖a‖²⌉`.
    Scaled { c: f64 },
    /// `t = ⌈c‖a‖^{2+2α}⌉`.
    Power { c: f64, alpha: f64 },
}

/// How the theory value relates to the probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Asymptotic {
    Exact,
    /// `(1 ± o(1))` times the theory value.
    Equivalent,
    /// Within constant factors of the theory value.
    Order,
}

#[derive(Clone, Debug, Serialize)]
pub struct HitProb2d {
    pub target: Vertex,
    /// Euclidean norm of the shortest displacement from the origin.
    pub norm: f64,
    pub t: u64,
    pub freq: f64,
    pub ci: (f64, f64),
    pub reps: usize,
    pub theory: f64,
    pub asymptotic: Asymptotic,
    /// `‖a‖ < 8`, below the range the asymptotics are meant for.
    pub below_min_norm: bool,
}

fn displacement_norm(graph: &Graph, a: Vertex) -> Result<f64> {
    let (Some(2), Some(n)) = (graph.torus_dim(), graph.torus_side()) else {
        return Err(Error::NotATorus);
    };
    let o = graph.torus_coords(graph.origin()).ok_or(Error::NotATorus)?;
    let x = graph.torus_coords(a).ok_or(Error::NotATorus)?;
    let sq: f64 = o
        .iter()
        .zip(&x)
        .map(|(&p, &q)| {
            let d = p.abs_diff(q);
            d.min(n - d) as f64
        })
        .map(|d| d * d)
        .sum();
    Ok(sq.sqrt())
}

fn regime(norm: f64, spec: TimeSpec) -> Result<(u64, f64, Asymptotic)> {
    let sq = norm * norm;
    match spec {
        TimeSpec::Scaled { c } if c > 0.0 && c * sq > 1.0 => {
            let t = (c * sq).ceil() as u64;
            let denom = (c * sq).ln();
            let theory = if c >= 1.0 { (1.0 + c.ln()) / denom } else { c * (-1.0 / c).exp() / denom };
            Ok((t, theory, Asymptotic::Order))
        }
        TimeSpec::Power { c, alpha } if c > 0.0 && alpha > 0.0 => {
            let t = (c * norm.powf(2.0 + 2.0 * alpha)).ceil() as u64;
            Ok((t, alpha / (1.0 + alpha), Asymptotic::Equivalent))
        }
        _ => Err(Error::RegimeUnspecified(format!("{spec:?} is outside every regime at ‖a‖ = {norm}"))),
    }
}

/// Monte Carlo `Pr_0[T_a ≤ t]` on a two-dimensional torus from its origin.
pub fn hit_prob_2d(graph: &Graph, a: Vertex, time: Option<TimeSpec>, reps: usize, seed: u64) -> Result<HitProb2d> {
    let norm = displacement_norm(graph, a)?;
    if norm == 0.0 {
        return Ok(HitProb2d {
            target: a,
            norm,
            t: 0,
            freq: 1.0,
            ci: (1.0, 1.0),
            reps,
            theory: 1.0,
            asymptotic: Asymptotic::Exact,
            below_min_norm: true,
        });
    }
    let spec = time.ok_or_else(|| Error::RegimeUnspecified("no time specification".into()))?;
    let (t, theory, asymptotic) = regime(norm, spec)?;
    if reps < 2 {
        return Err(Error::BudgetTooSmall("need at least two walks".into()));
    }
    let origin = graph.origin();
    let xs: Vec<f64> = (0..reps as u64)
        .map(|r| {
            let rng = stream_rng(seed, Domain::Estimator, &[0x2D, a as u64, r]);
            let mut w = WalkCursor::from_rng(rng, origin, Kernel::Srw);
            let hit = (0..t).any(|_| w.step(graph) == a);
            if hit { 1.0 } else { 0.0 }
        })
        .collect();
    let s = Summary::of(&xs);
    let (lo, hi) = s.normal_ci(1.96);
    Ok(HitProb2d {
        target: a,
        norm,
        t,
        freq: s.mean,
        ci: (lo.max(0.0), hi.min(1.0)),
        reps,
        theory,
        asymptotic,
        below_min_norm: norm < 8.0,
    })
}
