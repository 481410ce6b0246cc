//! Exact small-graph quantities: spectral gap, expected hitting times, Green
//! sums and the return-probability decay of the lazy walk.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use super::{Family, Graph, Vertex};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Domain};

/// Vertex cap for dense and exact-propagation computations.
pub const DENSE_CAP: usize = 4096;

/// Above this size the spectral gap is found by power iteration.
pub const DENSE_EIG_CAP: usize = 1024;

const POWER_ITERATION_BUDGET: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpectralMethod {
    ClosedForm,
    DenseEig,
    PowerIteration,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralStats {
    /// Second smallest eigenvalue of `I - P`.
    pub gamma: f64,
    /// `1 - max(|λ_2|, |λ_min|)` over the eigenvalues of `P`.
    pub gamma_abs: f64,
    pub method: SpectralMethod,
    pub tolerance: f64,
}

impl SpectralStats {
    /// Gap of the lazy kernel `(I + P)/2`.
    pub fn lazy_gap(&self) -> f64 {
        self.gamma / 2.0
    }
}

pub fn spectral_gap(graph: &Graph, tol: f64) -> Result<SpectralStats> {
    let n = graph.vertex_count();
    if n < 2 {
        return Err(Error::InvalidParams("spectral gap needs at least two vertices".into()));
    }
    match *graph.family() {
        Family::Cycle { n } => {
            let second = (2.0 * std::f64::consts::PI / n as f64).cos();
            let lowest = (2.0 * std::f64::consts::PI * (n / 2) as f64 / n as f64).cos();
            return Ok(SpectralStats {
                gamma: 1.0 - second,
                gamma_abs: 1.0 - second.max(lowest.abs()),
                method: SpectralMethod::ClosedForm,
                tolerance: 0.0,
            });
        }
        Family::Complete { n } => {
            let other = -1.0 / (n as f64 - 1.0);
            return Ok(SpectralStats {
                gamma: 1.0 - other,
                gamma_abs: 1.0 - other.abs(),
                method: SpectralMethod::ClosedForm,
                tolerance: 0.0,
            });
        }
        _ => {}
    }
    if n <= DENSE_EIG_CAP {
        dense_gap(graph)
    } else {
        power_gap(graph, tol)
    }
}

/// `D^{-1/2} A D^{-1/2}`, similar to `P`.
fn symmetric_kernel(graph: &Graph) -> DMatrix<f64> {
    let n = graph.vertex_count();
    let inv_sqrt: Vec<f64> = (0..n as Vertex)
        .map(|v| 1.0 / (graph.degree_of(v) as f64).sqrt())
        .collect();
    let mut m = DMatrix::zeros(n, n);
    for v in 0..n as Vertex {
        for &u in graph.neighbors(v) {
            m[(v as usize, u as usize)] = inv_sqrt[v as usize] * inv_sqrt[u as usize];
        }
    }
    m
}

fn dense_gap(graph: &Graph) -> Result<SpectralStats> {
    let eig = SymmetricEigen::new(symmetric_kernel(graph));
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    let second = vals[1];
    let lowest = *vals.last().unwrap();
    Ok(SpectralStats {
        gamma: 1.0 - second,
        gamma_abs: 1.0 - second.max(lowest.abs()),
        method: SpectralMethod::DenseEig,
        tolerance: 1e-10,
    })
}

/// Applies `a*x + b*Sx` where `S` is the symmetrized transition kernel.
fn apply_kernel(graph: &Graph, inv_sqrt: &[f64], x: &[f64], a: f64, b: f64, out: &mut [f64]) {
    for v in 0..graph.vertex_count() {
        let s: f64 = graph
            .neighbors(v as Vertex)
            .iter()
            .map(|&u| inv_sqrt[u as usize] * x[u as usize])
            .sum();
        out[v] = a * x[v] + b * inv_sqrt[v] * s;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) {
    let norm = dot(x, x).sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
}

/// Largest eigenvalue of `a*I + b*S` restricted to the complement of `deflate`.
fn power_iterate(
    graph: &Graph,
    inv_sqrt: &[f64],
    a: f64,
    b: f64,
    deflate: Option<&[f64]>,
    tol: f64,
    seed: u64,
) -> Result<f64> {
    let n = graph.vertex_count();
    let mut rng = stream_rng(seed, Domain::Estimator, &[n as u64]);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let project = |x: &mut [f64]| {
        if let Some(u) = deflate {
            let c = dot(x, u);
            x.iter_mut().zip(u).for_each(|(xi, ui)| *xi -= c * ui);
        }
    };
    project(&mut x);
    normalize(&mut x);
    let mut y = vec![0.0; n];
    let mut prev = f64::NAN;
    let mut rq = f64::NAN;
    for _ in 0..POWER_ITERATION_BUDGET {
        apply_kernel(graph, inv_sqrt, &x, a, b, &mut y);
        project(&mut y);
        rq = dot(&x, &y);
        if (rq - prev).abs() < tol {
            return Ok(rq);
        }
        prev = rq;
        std::mem::swap(&mut x, &mut y);
        normalize(&mut x);
    }
    Err(Error::ConvergenceFailure {
        iterations: POWER_ITERATION_BUDGET,
        residual: (rq - prev).abs(),
    })
}

fn power_gap(graph: &Graph, tol: f64) -> Result<SpectralStats> {
    let n = graph.vertex_count();
    let inv_sqrt: Vec<f64> = (0..n as Vertex)
        .map(|v| 1.0 / (graph.degree_of(v) as f64).sqrt())
        .collect();
    // top eigenvector of S is proportional to sqrt(deg)
    let mut top: Vec<f64> = inv_sqrt.iter().map(|s| 1.0 / s).collect();
    normalize(&mut top);
    // lazy kernel (I+S)/2 keeps the spectrum in [0,1]
    let lazy_second = power_iterate(graph, &inv_sqrt, 0.5, 0.5, Some(&top), tol, 1)?;
    let second = 2.0 * lazy_second - 1.0;
    // (I-S)/2 has top eigenvalue (1 - λ_min)/2
    let flipped = power_iterate(graph, &inv_sqrt, 0.5, -0.5, None, tol, 2)?;
    let lowest = 1.0 - 2.0 * flipped;
    Ok(SpectralStats {
        gamma: 1.0 - second,
        gamma_abs: 1.0 - second.max(lowest.abs()),
        method: SpectralMethod::PowerIteration,
        tolerance: tol,
    })
}

/// Dense matrix of `E_x[T_y]` with the first-step residual of the solve.
#[derive(Clone, Debug)]
pub struct HittingMatrix {
    pub expectations: DMatrix<f64>,
    /// Max over `x != y` of `|h(x,y) - 1 - Σ_z P(x,z) h(z,y)|`.
    pub residual: f64,
}

impl HittingMatrix {
    pub fn get(&self, x: Vertex, y: Vertex) -> f64 {
        self.expectations[(x as usize, y as usize)]
    }

    pub fn h_max(&self) -> f64 {
        self.expectations.iter().copied().fold(0.0, f64::max)
    }

    /// Min over distinct `x, y ∈ set` of `E_x[T_y]`.
    pub fn h_min_over(&self, set: &[Vertex]) -> Option<f64> {
        let mut best: Option<f64> = None;
        for &x in set {
            for &y in set {
                if x != y {
                    let h = self.get(x, y);
                    best = Some(best.map_or(h, |b| b.min(h)));
                }
            }
        }
        best
    }
}

pub fn hitting_times_exact(graph: &Graph) -> Result<HittingMatrix> {
    hitting_times_exact_capped(graph, DENSE_CAP)
}

/// Solves through the fundamental matrix `Z = (I - P + 1π^T)^{-1}`, using
/// `E_x[T_y] = (Z_yy - Z_xy) / π_y`.
pub fn hitting_times_exact_capped(graph: &Graph, cap: usize) -> Result<HittingMatrix> {
    let n = graph.vertex_count();
    if n > cap {
        return Err(Error::TooLarge { vertices: n, cap });
    }
    let two_m = (2 * graph.edge_count()) as f64;
    let pi: Vec<f64> = if n == 1 {
        vec![1.0]
    } else {
        (0..n as Vertex).map(|v| graph.degree_of(v) as f64 / two_m).collect()
    };
    let mut a = DMatrix::<f64>::identity(n, n);
    for x in 0..n {
        for y in 0..n {
            a[(x, y)] += pi[y];
        }
        let deg = graph.degree_of(x as Vertex) as f64;
        for &z in graph.neighbors(x as Vertex) {
            a[(x, z as usize)] -= 1.0 / deg;
        }
    }
    let z = a.lu().try_inverse().ok_or(Error::SingularSystem)?;
    let mut h = DMatrix::<f64>::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            if x != y {
                h[(x, y)] = (z[(y, y)] - z[(x, y)]) / pi[y];
            }
        }
    }
    let residual = first_step_residual(graph, &h);
    Ok(HittingMatrix { expectations: h, residual })
}

fn first_step_residual(graph: &Graph, h: &DMatrix<f64>) -> f64 {
    let n = graph.vertex_count();
    let mut worst = 0.0f64;
    for x in 0..n {
        let nbrs = graph.neighbors(x as Vertex);
        let deg = nbrs.len() as f64;
        for y in 0..n {
            if x == y {
                continue;
            }
            let step: f64 = nbrs.iter().map(|&z| h[(z as usize, y)]).sum::<f64>() / deg;
            worst = worst.max((h[(x, y)] - 1.0 - step).abs());
        }
    }
    worst
}

#[derive(Clone, Debug, Serialize)]
pub enum GreenMethod {
    MatrixPower,
    SampledWalks { reps: usize, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct GreenStats {
    pub horizon: u64,
    /// `min_v Σ_{i<=t} P^i(v,v)`, or the value at the requested vertex.
    pub nu_t: f64,
    /// 95% interval for sampled estimates.
    pub ci: Option<(f64, f64)>,
    /// `Σ_{i<=t} P^i(a,b)` when a pair was requested.
    pub nu_t_pair: Option<f64>,
    pub method: GreenMethod,
}

/// One step of the simple random walk applied to a distribution.
fn push_forward(graph: &Graph, from: &[f64], to: &mut [f64], lazy: bool) {
    to.iter_mut().for_each(|x| *x = 0.0);
    for v in 0..graph.vertex_count() {
        let mass = from[v];
        if mass == 0.0 {
            continue;
        }
        let nbrs = graph.neighbors(v as Vertex);
        let (stay, move_mass) = if lazy { (0.5 * mass, 0.5 * mass) } else { (0.0, mass) };
        to[v] += stay;
        let share = move_mass / nbrs.len() as f64;
        for &u in nbrs {
            to[u as usize] += share;
        }
    }
}

/// `P^i(source, ·)` for `i = 0..=t`, handed to `visit(i, dist)`.
fn propagate(graph: &Graph, source: Vertex, t: u64, lazy: bool, mut visit: impl FnMut(u64, &[f64])) {
    let n = graph.vertex_count();
    let mut cur = vec![0.0; n];
    let mut next = vec![0.0; n];
    cur[source as usize] = 1.0;
    visit(0, &cur);
    for i in 1..=t {
        push_forward(graph, &cur, &mut next, lazy);
        std::mem::swap(&mut cur, &mut next);
        visit(i, &cur);
    }
}

/// Vertices over which a minimum over `v` must be taken.
fn representative_vertices(graph: &Graph) -> Vec<Vertex> {
    if graph.family().is_vertex_transitive() {
        vec![graph.origin()]
    } else {
        (0..graph.vertex_count() as Vertex).collect()
    }
}

fn check_cap(graph: &Graph) -> Result<()> {
    if graph.vertex_count() > DENSE_CAP {
        Err(Error::TooLarge { vertices: graph.vertex_count(), cap: DENSE_CAP })
    } else {
        Ok(())
    }
}

/// Exact `ν_s` for `s = 0..=t_max`.
pub fn green_sequence(graph: &Graph, t_max: u64) -> Result<Vec<f64>> {
    check_cap(graph)?;
    let mut best = vec![f64::INFINITY; t_max as usize + 1];
    for v in representative_vertices(graph) {
        let mut acc = 0.0;
        propagate(graph, v, t_max, false, |i, dist| {
            acc += dist[v as usize];
            let slot = &mut best[i as usize];
            *slot = slot.min(acc);
        });
    }
    Ok(best)
}

pub fn green_sum(
    graph: &Graph,
    vertex: Option<Vertex>,
    t: u64,
    method: GreenMethod,
    pair: Option<(Vertex, Vertex)>,
) -> Result<GreenStats> {
    let nu_t_pair = match pair {
        Some((a, b)) => {
            check_cap(graph)?;
            let mut acc = 0.0;
            propagate(graph, a, t, false, |_, dist| acc += dist[b as usize]);
            Some(acc)
        }
        None => None,
    };
    let (nu_t, ci) = match &method {
        GreenMethod::MatrixPower => {
            check_cap(graph)?;
            let verts = vertex.map_or_else(|| representative_vertices(graph), |v| vec![v]);
            let mut best = f64::INFINITY;
            for v in verts {
                let mut acc = 0.0;
                propagate(graph, v, t, false, |_, dist| acc += dist[v as usize]);
                best = best.min(acc);
            }
            (best, None)
        }
        GreenMethod::SampledWalks { reps, seed } => {
            let v = match vertex {
                Some(v) => v,
                None if graph.family().is_vertex_transitive() => graph.origin(),
                None => {
                    return Err(Error::InvalidParams(
                        "sampled Green sums need a vertex on non-transitive graphs".into(),
                    ))
                }
            };
            if *reps < 2 {
                return Err(Error::BudgetTooSmall("need at least two sampled walks".into()));
            }
            let counts: Vec<f64> = (0..*reps as u64)
                .map(|r| {
                    let mut rng = stream_rng(*seed, Domain::Estimator, &[0x6EE7, v as u64, r]);
                    let mut pos = v;
                    let mut visits = 1u64;
                    for _ in 0..t {
                        let nbrs = graph.neighbors(pos);
                        pos = nbrs[rng.random_range(0..nbrs.len() as u32) as usize];
                        visits += u64::from(pos == v);
                    }
                    visits as f64
                })
                .collect();
            let s = crate::stats::Summary::of(&counts);
            (s.mean, Some(s.normal_ci(1.96)))
        }
    };
    Ok(GreenStats { horizon: t, nu_t, ci, nu_t_pair, method })
}

/// `max_x |P_L^t(x,x) - 1/n|` for the lazy kernel `P_L = (I+P)/2`.
pub fn mixing_decay(graph: &Graph, t: u64) -> Result<f64> {
    Ok(*mixing_decay_profile(graph, t)?.last().unwrap())
}

/// [`mixing_decay`] for every `s = 0..=t_max`.
pub fn mixing_decay_profile(graph: &Graph, t_max: u64) -> Result<Vec<f64>> {
    graph.require_regular()?;
    check_cap(graph)?;
    let inv_n = 1.0 / graph.vertex_count() as f64;
    let mut worst = vec![0.0f64; t_max as usize + 1];
    for v in representative_vertices(graph) {
        propagate(graph, v, t_max, true, |i, dist| {
            let slot = &mut worst[i as usize];
            *slot = slot.max((dist[v as usize] - inv_n).abs());
        });
    }
    Ok(worst)
}

/// Stationary distribution check helper used by tests: `P^t` applied to a
/// point mass, returned as a vector.
pub fn distribution_after(graph: &Graph, source: Vertex, t: u64, lazy: bool) -> DVector<f64> {
    let mut out = DVector::zeros(graph.vertex_count());
    propagate(graph, source, t, lazy, |i, dist| {
        if i == t {
            out.copy_from_slice(dist);
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_graph;
    use std::f64::consts::PI;

    fn g(f: Family) -> Graph {
        generate_graph(&f).unwrap()
    }

    #[test]
    fn closed_form_gaps() {
        let k4 = spectral_gap(&g(Family::Complete { n: 4 }), 1e-10).unwrap();
        assert!((k4.gamma - 4.0 / 3.0).abs() < 1e-12);
        let c4 = spectral_gap(&g(Family::Cycle { n: 4 }), 1e-10).unwrap();
        assert!((c4.gamma - 1.0).abs() < 1e-12);
        assert_eq!(c4.gamma_abs, 0.0);
        let k2 = spectral_gap(&g(Family::Complete { n: 2 }), 1e-10).unwrap();
        assert!((k2.gamma - 2.0).abs() < 1e-12);
        assert!(spectral_gap(&g(Family::Complete { n: 1 }), 1e-10).is_err());
    }

    #[test]
    fn dense_matches_closed_forms() {
        // route cycles and complete graphs through the dense solver
        for n in (3..=256).step_by(17).chain([4, 64, 255, 256]) {
            let mut c = g(Family::Cycle { n });
            c.family = Family::Custom;
            let got = dense_gap(&c).unwrap().gamma;
            assert!((got - (1.0 - (2.0 * PI / n as f64).cos())).abs() < 1e-8, "cycle {n}");
            let mut k = g(Family::Complete { n });
            k.family = Family::Custom;
            let got = dense_gap(&k).unwrap().gamma;
            assert!((got - n as f64 / (n as f64 - 1.0)).abs() < 1e-8, "complete {n}");
        }
    }

    #[test]
    fn power_iteration_matches_dense() {
        let h = g(Family::RandomRegular { n: 200, d: 4, seed: 11 });
        let dense = dense_gap(&h).unwrap();
        let power = power_gap(&h, 1e-13).unwrap();
        assert!((dense.gamma - power.gamma).abs() < 1e-5, "{dense:?} {power:?}");
        assert!((dense.gamma_abs - power.gamma_abs).abs() < 1e-5);
        assert!(power.gamma >= power.gamma_abs);
        let t = g(Family::Torus { d: 2, n: 40 });
        let power = spectral_gap(&t, 1e-13).unwrap();
        assert_eq!(power.method, SpectralMethod::PowerIteration);
        let exact = (1.0 - (2.0 * PI / 40.0).cos()) / 2.0;
        assert!((power.gamma - exact).abs() < 1e-5, "{} vs {exact}", power.gamma);
    }

    #[test]
    fn hitting_complete_graph() {
        let h = hitting_times_exact(&g(Family::Complete { n: 4 })).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                let want = if x == y { 0.0 } else { 3.0 };
                assert!((h.get(x, y) - want).abs() < 1e-9);
            }
        }
        assert!(h.residual < 1e-9);
    }

    #[test]
    fn hitting_cycle_gamblers_ruin() {
        for n in [3usize, 6, 17, 32, 64] {
            let c = g(Family::Cycle { n });
            let h = hitting_times_exact(&c).unwrap();
            assert!(h.residual < 1e-9, "n={n} residual {}", h.residual);
            for x in 0..n {
                for y in 0..n {
                    let k = c.distance(x as Vertex, y as Vertex).unwrap();
                    let want = (k * (n - k)) as f64;
                    assert!((h.get(x as Vertex, y as Vertex) - want).abs() < 1e-6);
                    assert!(h.get(x as Vertex, y as Vertex) >= k as f64 - 1e-9);
                }
            }
        }
        let h = hitting_times_exact(&g(Family::Cycle { n: 6 })).unwrap();
        assert!((h.get(0, 2) - 8.0).abs() < 1e-9);
    }

    #[test]
    fn hitting_torus_symmetry_and_cap() {
        let t = g(Family::Torus { d: 2, n: 5 });
        let h = hitting_times_exact(&t).unwrap();
        // translation invariance: E_x[T_y] depends on y - x only
        let shift = |v: Vertex| {
            let c = t.torus_coords(v).unwrap();
            t.torus_vertex(&[c[0] + 1, c[1] + 2]).unwrap()
        };
        for x in 0..25 {
            for y in 0..25 {
                assert!((h.get(x, y) - h.get(shift(x), shift(y))).abs() < 1e-8);
            }
        }
        assert!(matches!(
            hitting_times_exact_capped(&t, 10),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn green_sums_exact() {
        let c = g(Family::Cycle { n: 10 });
        let s = green_sum(&c, None, 0, GreenMethod::MatrixPower, None).unwrap();
        assert_eq!(s.nu_t, 1.0);
        let s = green_sum(&c, None, 1, GreenMethod::MatrixPower, None).unwrap();
        assert_eq!(s.nu_t, 1.0);
        let s = green_sum(&c, None, 2, GreenMethod::MatrixPower, Some((0, 2))).unwrap();
        assert!((s.nu_t - 1.5).abs() < 1e-12);
        assert!((s.nu_t_pair.unwrap() - 0.25).abs() < 1e-12);
        let seq = green_sequence(&g(Family::DaryTree { d: 2, depth: 3 }), 50).unwrap();
        assert_eq!(seq[0], 1.0);
        assert!(seq.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn sampled_green_within_ci_of_exact() {
        let t = g(Family::Torus { d: 2, n: 6 });
        let exact = green_sum(&t, None, 40, GreenMethod::MatrixPower, None).unwrap().nu_t;
        let sampled = green_sum(
            &t,
            None,
            40,
            GreenMethod::SampledWalks { reps: 20_000, seed: 5 },
            None,
        )
        .unwrap();
        let (lo, hi) = sampled.ci.unwrap();
        // widen the 95% interval to roughly 4.5 sigma for a deterministic test
        let half = (hi - lo) / 2.0 * 2.3;
        assert!((sampled.nu_t - exact).abs() < half, "{} vs {exact}", sampled.nu_t);
    }

    #[test]
    fn mixing_decay_examples() {
        let k4 = g(Family::Complete { n: 4 });
        assert!((mixing_decay(&k4, 0).unwrap() - 0.75).abs() < 1e-15);
        // lazy K_4 eigenvalues: 1 and 1/3 (three-fold)
        let v = mixing_decay(&k4, 5).unwrap();
        assert!((v - 0.75 * (1.0f64 / 3.0).powi(5)).abs() < 1e-14);
        assert!(v <= (1.0f64 / 3.0).powi(5));
        let c8 = g(Family::Cycle { n: 8 });
        let gamma = 1.0 - (PI / 4.0).cos();
        assert!(mixing_decay(&c8, 20).unwrap() <= (1.0 - gamma / 2.0).powi(20) + 1e-9);
        let tree = g(Family::DaryTree { d: 2, depth: 2 });
        assert!(matches!(mixing_decay(&tree, 3), Err(Error::NotRegular(_))));
    }

    #[test]
    fn lazy_distribution_conserves_mass() {
        let t = g(Family::Torus { d: 2, n: 4 });
        let d = distribution_after(&t, 3, 7, true);
        assert!((d.sum() - 1.0).abs() < 1e-12);
    }
}
