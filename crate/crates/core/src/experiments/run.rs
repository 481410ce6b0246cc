//! Replicate scheduling, per-cell statistics, verdicts and output.

use std::collections::HashMap;
use std::io::Write;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::compare::{compare, Observation, TolerancePolicy, VerdictTable};
use super::config::{ExperimentSpec, Recipe};
use super::theory::{theory, Formula, TheoryParams};
use crate::error::{Error, Result};
use crate::estimators::{ld_bounds, site_percolation, LdBound};
use crate::frog::{activation_times, brute_force_frog, susceptibility, HorizonConfig, Steps, Variant};
use crate::graph::{generate_graph, spectral_gap, Family, Graph, Vertex};
use crate::multiwalk::{cover_fixed_length, cover_fixed_walkers, range_fraction};
use crate::rng::{derive_seed, stream_rng, Domain};
use crate::sampling::ParticleField;
use crate::stats::{bootstrap_mean_ci, quantile_sorted, sorted};

/// Version tag of the row schema.
pub const CSV_SCHEMA: &str = "frogsim-rows/1";
pub const SUMMARY_SCHEMA: &str = "frogsim-summary/1";
pub const BOOTSTRAP_RESAMPLES: usize = 1000;
const ORACLE_BUDGET: u64 = 1 << 22;
const RANGE_REPS: usize = 2000;

/// One observation. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub recipe: &'static str,
    pub graph_family: String,
    pub n: Option<u64>,
    pub d: Option<u64>,
    pub lambda: Option<f64>,
    pub replicate: u64,
    pub seed: u64,
    /// Observable name, or `error:<code>` for a failed replicate.
    pub observable: String,
    pub value: Option<f64>,
    pub censored: bool,
    pub runtime_ms: u64,
    #[serde(skip)]
    pub cell: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellSummary {
    pub graph_family: String,
    pub n: Option<u64>,
    pub d: Option<u64>,
    pub lambda: Option<f64>,
    pub observable: String,
    pub rows: usize,
    /// Uncensored values, the only ones summarised.
    pub count: usize,
    pub censored: usize,
    pub errors: usize,
    pub mean: f64,
    pub median: f64,
    pub q05: f64,
    pub q95: f64,
    /// Percentile bootstrap interval of the mean.
    pub ci: (f64, f64),
    pub formula: Option<Formula>,
    pub prediction: Option<f64>,
    pub prediction_ci: Option<(f64, f64)>,
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub table: Option<VerdictTable>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentResult {
    pub schema: &'static str,
    pub recipe: Recipe,
    pub seed: u64,
    pub replicates: u64,
    #[serde(skip)]
    pub rows: Vec<Row>,
    pub cells: Vec<CellSummary>,
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<String>,
}

impl ExperimentResult {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn cell(&self, observable: &str) -> impl Iterator<Item = &CellSummary> + '_ {
        let o = observable.to_string();
        self.cells.iter().filter(move |c| c.observable == o)
    }
}

struct Cell {
    family: Family,
    graph: Option<Graph>,
    n: Option<u64>,
    d: Option<u64>,
    gap: Option<f64>,
    /// `p_t` per entry of `t_grid`, for the cover recipe.
    p_t: Vec<f64>,
}

impl Cell {
    fn graph(&self) -> &Graph {
        self.graph.as_ref().expect("cell without a graph")
    }
}

struct Obs {
    lambda: Option<f64>,
    observable: String,
    value: Option<f64>,
    censored: bool,
}

impl Obs {
    fn value(lambda: Option<f64>, observable: impl Into<String>, value: f64) -> Obs {
        Obs { lambda, observable: observable.into(), value: Some(value), censored: false }
    }

    fn maybe(lambda: Option<f64>, observable: impl Into<String>, value: Option<u64>) -> Obs {
        Obs { lambda, observable: observable.into(), value: value.map(|v| v as f64), censored: value.is_none() }
    }
}

fn family_params(f: &Family, g: &Graph) -> (Option<u64>, Option<u64>) {
    let (n, d) = match *f {
        Family::Cycle { n } => (n, 2),
        Family::Torus { d, n } => (n, d),
        Family::Complete { n } => (n, n.saturating_sub(1)),
        Family::DaryTree { d, depth } => (depth, d),
        Family::GadgetRing { d, n } => (n, d),
        Family::RandomRegular { n, d, .. } => (n, d),
        Family::Custom => return (Some(g.vertex_count() as u64), g.degree().map(|d| d as u64)),
    };
    (Some(n as u64), Some(d as u64))
}

type Built = std::result::Result<Cell, (Family, Error)>;

fn build_cells(spec: &ExperimentSpec, warnings: &mut Vec<String>) -> Result<Vec<Built>> {
    if spec.recipe == Recipe::BoundsSuite {
        return Ok(vec![Ok(Cell { family: Family::Custom, graph: None, n: None, d: None, gap: None, p_t: Vec::new() })]);
    }
    let mut out = Vec::new();
    for family in spec.families()? {
        let cell = generate_graph(&family).and_then(|graph| {
            let (n, d) = family_params(&family, &graph);
            let gap = if spec.recipe == Recipe::ExpanderSusceptibility {
                Some(spectral_gap(&graph, 1e-9)?.gamma)
            } else {
                None
            };
            let p_t = if spec.recipe == Recipe::CoverMultiWalk {
                if !family.is_vertex_transitive() {
                    warnings.push(format!("{family}: p_t identity assumes vertex transitivity"));
                }
                spec.t_grid
                    .iter()
                    .map(|&t| range_fraction(&graph, t, RANGE_REPS, spec.seed).map(|r| r.p_t))
                    .collect::<Result<Vec<_>>>()?
            } else {
                Vec::new()
            };
            Ok(Cell { family: family.clone(), graph: Some(graph), n, d, gap, p_t })
        });
        out.push(cell.map_err(|e| (family, e)));
    }
    Ok(out)
}

fn hyper_dense_lambda(spec: &ExperimentSpec, g: &Graph) -> f64 {
    let deg = g.degree().unwrap_or(spec.d) as f64;
    (1.0 + spec.delta) * deg * (g.vertex_count() as f64).ln()
}

fn replicate(spec: &ExperimentSpec, cell: &Cell, rep: u64) -> Result<Vec<Obs>> {
    let cfg = HorizonConfig { initial: 1, cap: spec.horizon_cap };
    let seed = spec.seed;
    let mut out = Vec::new();
    match spec.recipe {
        Recipe::SusceptibilityScaling
        | Recipe::ExpanderSusceptibility
        | Recipe::CycleScaling
        | Recipe::CompleteGraph
        | Recipe::TreeScaling
        | Recipe::GadgetRing => {
            let g = cell.graph();
            let lmax = spec.lambda_grid.iter().copied().fold(0.0, f64::max);
            // one field thresholded at every λ of the grid
            let field = ParticleField::sample(g, lmax, g.origin(), seed, rep);
            for &l in &spec.lambda_grid {
                let s = susceptibility(g, &field.at_lambda(l), cfg);
                out.push(Obs::maybe(Some(l), "S", s.s_value));
            }
        }
        Recipe::HyperDense => {
            let g = cell.graph();
            let l = hyper_dense_lambda(spec, g);
            let field = ParticleField::sample(g, l, g.origin(), seed, rep);
            let s = susceptibility(g, &field, cfg);
            out.push(Obs::maybe(Some(l), "S", s.s_value));
            // a censored S certainly exceeds 1
            let above = s.s_value.is_none_or(|v| v > 1);
            out.push(Obs::value(Some(l), "S_above_1", if above { 1.0 } else { 0.0 }));
        }
        Recipe::CoverMultiWalk => {
            let g = cell.graph();
            for &t in &spec.t_grid {
                let r = cover_fixed_length(g, t, seed, rep, spec.walker_cap);
                out.push(Obs::maybe(None, format!("C[t={t}]"), r.value));
            }
        }
        Recipe::DualityCheck => {
            let g = cell.graph();
            let max_t = spec.t_grid.iter().copied().max().unwrap_or(0);
            let max_s = spec.s_grid.iter().copied().max().unwrap_or(1);
            let d: Vec<_> = spec
                .s_grid
                .iter()
                .map(|&s| cover_fixed_walkers(g, s, seed, rep, max_t + 1))
                .collect::<Result<_>>()?;
            let c: Vec<_> = spec.t_grid.iter().map(|&t| cover_fixed_length(g, t, seed, rep, max_s + 1)).collect();
            let mut violations = 0;
            for (di, &s) in d.iter().zip(&spec.s_grid) {
                for (ci, &t) in c.iter().zip(&spec.t_grid) {
                    if di.exceeds(t) != ci.exceeds(s) {
                        violations += 1;
                    }
                }
            }
            out.push(Obs::value(None, "checks", (d.len() * c.len()) as f64));
            out.push(Obs::value(None, "violations", violations as f64));
        }
        Recipe::OracleSuite => {
            let g = cell.graph();
            let l = spec.lambda_grid[rep as usize % spec.lambda_grid.len()];
            let origin = (rep as usize * 7 % g.vertex_count()) as Vertex;
            let field = ParticleField::sample(g, l, origin, seed, rep);
            let tau = if rep % 10 == 9 { Steps::INFINITY } else { Steps::finite(rep % 21) };
            let fast = activation_times(g, &field, tau, cfg);
            let slow = brute_force_frog(g, &field, &Variant::Standard(tau), ORACLE_BUDGET)?;
            let agree = !fast.censored && fast.at == slow.first_visit;
            out.push(Obs::value(Some(l), "agree", if agree { 1.0 } else { 0.0 }));
            out.push(Obs::value(Some(l), "visited", fast.visited().len() as f64));
        }
        Recipe::BoundsSuite => {
            let mut rng = stream_rng(seed, Domain::Estimator, &[0xB5, rep]);
            let n_max = spec.n_grid.iter().copied().max().unwrap_or(10_000).max(1) as u64;
            let n = rng.random_range(1..=n_max);
            let p = rng.random_range(0.001..0.999);
            let delta = rng.random_range(0.0..3.0);
            let r = ld_bounds(n, p, delta, None)?;
            let holds = |which: &[LdBound]| r.entries.iter().filter(|e| which.contains(&e.bound)).all(|e| e.holds == Some(true));
            out.push(Obs::value(None, "ldber1_holds", if holds(&[LdBound::UpperMgf, LdBound::UpperExp]) { 1.0 } else { 0.0 }));
            if delta > 0.0 && delta < 1.0 {
                out.push(Obs::value(None, "ldber2_holds", if holds(&[LdBound::LowerMgf, LdBound::LowerExp]) { 1.0 } else { 0.0 }));
            }
        }
        Recipe::PercolationSuite => {
            let g = cell.graph();
            for &p in &spec.p_grid {
                let r = site_percolation(g, p, seed, rep, spec.prefactor)?;
                out.push(Obs::value(None, format!("gc_size[p={p}]"), r.gc_size as f64));
                out.push(Obs::value(None, format!("large_count[p={p}]"), r.large_count as f64));
                out.push(Obs::value(None, format!("non_unique[p={p}]"), if r.large_count >= 2 { 1.0 } else { 0.0 }));
            }
        }
    }
    Ok(out)
}

/// Formula, value, interval and regime warnings.
type Prediction = (Formula, f64, Option<(f64, f64)>, Vec<String>);

fn predict(spec: &ExperimentSpec, cell: &Cell, c: &CellSummary) -> Option<Result<Prediction>> {
    let graph = cell.graph.as_ref()?;
    if spec.recipe == Recipe::CoverMultiWalk {
        let t: u64 = c.observable.strip_prefix("C[t=")?.strip_suffix(']')?.parse().ok()?;
        let i = spec.t_grid.iter().position(|&x| x == t)?;
        let p = cell.p_t[i];
        let v = (graph.vertex_count() as f64).ln() / p;
        return Some(Ok((Formula::TorusHigh, v, None, Vec::new())));
    }
    if c.observable != "S" {
        return None;
    }
    let lambda = c.lambda?;
    let n = cell.n? as f64;
    let d = cell.d? as usize;
    let (formula, params) = match spec.recipe {
        Recipe::SusceptibilityScaling if d >= 3 => (Formula::TorusHigh, TheoryParams::new(n, lambda).dim(d)),
        Recipe::SusceptibilityScaling => (Formula::TorusPlanar, TheoryParams::new(n, lambda)),
        Recipe::ExpanderSusceptibility => (
            Formula::Expander,
            TheoryParams::new(graph.vertex_count() as f64, lambda).gap(cell.gap?),
        ),
        Recipe::CycleScaling => (Formula::CycleThreshold, TheoryParams::new(n, lambda)),
        Recipe::CompleteGraph => (Formula::Complete, TheoryParams::new(n, lambda)),
        Recipe::TreeScaling => (Formula::Tree, TheoryParams::new(n, lambda)),
        Recipe::GadgetRing => (Formula::GadgetRing, TheoryParams::new(n, lambda).dim(d)),
        _ => return None,
    };
    Some(theory(formula, params).map(|t| (formula, t.value, t.ci, t.warnings)))
}

fn summarise(spec: &ExperimentSpec, cells: &[Option<Cell>], rows: &[Row], warnings: &mut Vec<String>) -> Result<Vec<CellSummary>> {
    let mut order: Vec<(usize, Option<u64>, String)> = Vec::new();
    let mut groups: HashMap<(usize, Option<u64>, String), Vec<&Row>> = HashMap::new();
    for r in rows {
        let key = (r.cell, r.lambda.map(f64::to_bits), r.observable.clone());
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }
    let mut out = Vec::new();
    for (i, key) in order.iter().enumerate() {
        let rs = &groups[key];
        let first = rs[0];
        let values: Vec<f64> = rs.iter().filter(|r| !r.censored).filter_map(|r| r.value).collect();
        let xs = sorted(&values);
        let boot_seed = derive_seed(spec.seed, Domain::Bootstrap, &[i as u64]);
        let mut c = CellSummary {
            graph_family: first.graph_family.clone(),
            n: if spec.recipe == Recipe::BoundsSuite { None } else { first.n },
            d: first.d,
            lambda: first.lambda,
            observable: first.observable.clone(),
            rows: rs.len(),
            count: values.len(),
            censored: rs.iter().filter(|r| r.censored).count(),
            errors: rs.iter().filter(|r| r.observable.starts_with("error:")).count(),
            mean: if values.is_empty() { f64::NAN } else { values.iter().sum::<f64>() / values.len() as f64 },
            median: quantile_sorted(&xs, 0.5),
            q05: quantile_sorted(&xs, 0.05),
            q95: quantile_sorted(&xs, 0.95),
            ci: bootstrap_mean_ci(&values, BOOTSTRAP_RESAMPLES, 0.95, boot_seed),
            formula: None,
            prediction: None,
            prediction_ci: None,
            ratio: None,
        };
        if let Some(cell) = cells[key.0].as_ref() {
            if let Some(p) = predict(spec, cell, &c) {
                let (formula, value, ci, w) = p?;
                for m in w {
                    let msg = format!("{} λ={:?}: {m}", c.graph_family, c.lambda);
                    if !warnings.contains(&msg) {
                        warnings.push(msg);
                    }
                }
                c.formula = Some(formula);
                c.prediction = Some(value);
                c.prediction_ci = ci;
                c.ratio = Some(c.mean / value);
            }
        }
        out.push(c);
    }
    Ok(out)
}

fn frequency_verdict(name: &str, cells: &[&CellSummary], limit: impl Fn(&CellSummary) -> f64) -> Verdict {
    let mut passed = !cells.is_empty();
    let mut parts = Vec::new();
    for c in cells {
        let lim = limit(c);
        let ok = c.count > 0 && c.mean <= lim;
        passed &= ok;
        parts.push(format!("{} {}: {:.4} ≤ {:.4}", c.graph_family, c.observable, c.mean, lim));
    }
    Verdict { name: name.into(), passed, detail: parts.join("; "), table: None }
}

fn verdicts(spec: &ExperimentSpec, cells: &[CellSummary]) -> Result<Vec<Verdict>> {
    let tol = spec.tolerance;
    let mut out = Vec::new();
    let policy = match spec.recipe {
        Recipe::SusceptibilityScaling | Recipe::CompleteGraph | Recipe::CoverMultiWalk => {
            Some(TolerancePolicy::RatioBand { lo: tol.band_lo, hi: tol.band_hi })
        }
        Recipe::CycleScaling | Recipe::TreeScaling => {
            Some(TolerancePolicy::Slope { lo: tol.slope_lo, hi: tol.slope_hi, stability: tol.stability })
        }
        Recipe::ExpanderSusceptibility => Some(TolerancePolicy::Stable { factor: tol.stability }),
        Recipe::GadgetRing => Some(TolerancePolicy::AtLeast { min: tol.band_lo }),
        _ => None,
    };
    if let Some(policy) = policy {
        let predicted: Vec<&CellSummary> = cells.iter().filter(|c| c.prediction.is_some()).collect();
        let empty: Vec<String> = predicted.iter().filter(|c| c.count == 0).map(|c| c.graph_family.clone()).collect();
        if predicted.is_empty() || !empty.is_empty() {
            out.push(Verdict {
                name: "prediction".into(),
                passed: false,
                detail: format!("cells without uncensored values: {empty:?}"),
                table: None,
            });
        } else {
            let obs: Vec<Observation> = predicted.iter().map(|c| Observation { mean: c.mean, ci: c.ci }).collect();
            let pred: Vec<f64> = predicted.iter().map(|c| c.prediction.unwrap()).collect();
            let table = compare(&obs, &pred, policy)?;
            let censored: usize = predicted.iter().map(|c| c.censored).sum();
            let mut detail = table.detail.clone();
            if censored > 0 {
                detail.push_str(&format!("; {censored} censored rows excluded"));
            }
            out.push(Verdict { name: "prediction".into(), passed: table.passed, detail, table: Some(table) });
        }
    }
    let select = |prefix: &str| -> Vec<&CellSummary> { cells.iter().filter(|c| c.observable.starts_with(prefix)).collect() };
    match spec.recipe {
        Recipe::HyperDense => {
            let cs = select("S_above_1");
            out.push(frequency_verdict("hyper_dense", &cs, |c| {
                let v = match c.d.zip(c.n) {
                    Some(_) => c.n.unwrap() as f64,
                    None => f64::NAN,
                };
                tol.slack * v.powf(-spec.delta)
            }));
        }
        Recipe::DualityCheck => {
            let cs = select("violations");
            let total: f64 = cs.iter().map(|c| c.mean * c.count as f64).sum();
            out.push(Verdict {
                name: "duality".into(),
                passed: !cs.is_empty() && total == 0.0,
                detail: format!("{total} violations"),
                table: None,
            });
        }
        Recipe::OracleSuite => {
            let cs = select("agree");
            let total: usize = cs.iter().map(|c| c.rows).sum();
            let agreeing: f64 = cs.iter().map(|c| c.mean * c.count as f64).sum();
            let errors: usize = cells.iter().filter(|c| c.observable.starts_with("error:")).map(|c| c.rows).sum();
            out.push(Verdict {
                name: "oracle".into(),
                passed: total > 0 && errors == 0 && agreeing.round() as usize == total,
                detail: format!("{agreeing} of {total} realizations agree, {errors} errors"),
                table: None,
            });
        }
        Recipe::BoundsSuite => {
            for name in ["ldber1_holds", "ldber2_holds"] {
                let cs = select(name);
                let total: usize = cs.iter().map(|c| c.rows).sum();
                let ok: f64 = cs.iter().map(|c| c.mean * c.count as f64).sum();
                out.push(Verdict {
                    name: name.into(),
                    passed: total > 0 && ok.round() as usize == total,
                    detail: format!("{ok} of {total} triples"),
                    table: None,
                });
            }
        }
        Recipe::PercolationSuite => {
            let cs = select("non_unique");
            out.push(frequency_verdict("percolation_uniqueness", &cs, |_| tol.max_freq));
        }
        _ => {}
    }
    let errors: usize = cells.iter().filter(|c| c.observable.starts_with("error:")).map(|c| c.rows).sum();
    if errors > 0 {
        out.push(Verdict { name: "errors".into(), passed: false, detail: format!("{errors} failed replicates"), table: None });
    }
    Ok(out)
}

fn error_row(spec: &ExperimentSpec, cell: usize, family: &str, rep: u64, e: &Error) -> Row {
    Row {
        recipe: spec.recipe.name(),
        graph_family: family.to_string(),
        n: None,
        d: None,
        lambda: None,
        replicate: rep,
        seed: spec.seed,
        observable: format!("error:{}", e.code()),
        value: None,
        censored: false,
        runtime_ms: 0,
        cell,
    }
}

fn family_label(spec: &ExperimentSpec, f: &Family) -> String {
    if spec.recipe == Recipe::BoundsSuite {
        "binomial".into()
    } else {
        f.to_string()
    }
}

/// Runs every replicate of every cell. Rows come out in (cell, replicate)
/// order whatever the worker count.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    pool.install(|| run_in_pool(spec))
}

fn run_in_pool(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let mut warnings = Vec::new();
    let built = build_cells(spec, &mut warnings)?;
    let mut rows = Vec::new();
    let mut cells: Vec<Option<Cell>> = Vec::new();
    for (i, b) in built.into_iter().enumerate() {
        match b {
            Ok(c) => cells.push(Some(c)),
            Err((family, e)) => {
                rows.push(error_row(spec, i, &family.to_string(), 0, &e));
                cells.push(None);
            }
        }
    }
    let jobs: Vec<(usize, u64)> = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_some())
        .flat_map(|(i, _)| (0..spec.replicates).map(move |r| (i, r)))
        .collect();
    let produced: Vec<Vec<Row>> = jobs
        .par_iter()
        .map(|&(i, rep)| {
            let cell = cells[i].as_ref().unwrap();
            let label = family_label(spec, &cell.family);
            let start = Instant::now();
            let res = replicate(spec, cell, rep);
            let ms = if spec.record_runtime { start.elapsed().as_millis() as u64 } else { 0 };
            match res {
                Ok(obs) => obs
                    .into_iter()
                    .map(|o| Row {
                        recipe: spec.recipe.name(),
                        graph_family: label.clone(),
                        n: cell.n,
                        d: cell.d,
                        lambda: o.lambda,
                        replicate: rep,
                        seed: spec.seed,
                        observable: o.observable,
                        value: o.value,
                        censored: o.censored,
                        runtime_ms: ms,
                        cell: i,
                    })
                    .collect(),
                Err(e) => vec![error_row(spec, i, &label, rep, &e)],
            }
        })
        .collect();
    rows.extend(produced.into_iter().flatten());
    let summaries = summarise(spec, &cells, &rows, &mut warnings)?;
    let verdicts = verdicts(spec, &summaries)?;
    let result = ExperimentResult {
        schema: SUMMARY_SCHEMA,
        recipe: spec.recipe,
        seed: spec.seed,
        replicates: spec.replicates,
        rows,
        cells: summaries,
        verdicts,
        warnings,
    };
    if let Some(path) = &spec.output_csv {
        write_csv(&result.rows, std::fs::File::create(path)?)?;
    }
    if let Some(path) = &spec.output_json {
        write_summary(&result, std::fs::File::create(path)?)?;
    }
    Ok(result)
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    if rows.is_empty() {
        w.write_record([
            "recipe", "graph_family", "n", "d", "lambda", "replicate", "seed", "observable", "value", "censored",
            "runtime_ms",
        ])
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(result: &ExperimentResult, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, result).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    out.write_all(b"\n")?;
    Ok(())
}
