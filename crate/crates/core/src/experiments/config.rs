//! Experiment specifications and the flat `key = value` config format.
//!
//! Grammar: one `key = value` pair per line; blank lines and lines starting
//! with `#` are ignored; list values are comma separated, except `graphs`,
//! whose entries are separated by `;`. The `recipe` key selects defaults for
//! every other key. The environment variable `FROGSIM_SEED` overrides `seed`.

use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Family;

pub const SEED_ENV: &str = "FROGSIM_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Recipe {
    SusceptibilityScaling,
    CoverMultiWalk,
    ExpanderSusceptibility,
    CycleScaling,
    CompleteGraph,
    TreeScaling,
    GadgetRing,
    HyperDense,
    DualityCheck,
    OracleSuite,
    BoundsSuite,
    PercolationSuite,
}

impl Recipe {
    pub const ALL: [Recipe; 12] = [
        Recipe::SusceptibilityScaling,
        Recipe::CoverMultiWalk,
        Recipe::ExpanderSusceptibility,
        Recipe::CycleScaling,
        Recipe::CompleteGraph,
        Recipe::TreeScaling,
        Recipe::GadgetRing,
        Recipe::HyperDense,
        Recipe::DualityCheck,
        Recipe::OracleSuite,
        Recipe::BoundsSuite,
        Recipe::PercolationSuite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Recipe::SusceptibilityScaling => "susceptibility_scaling",
            Recipe::CoverMultiWalk => "cover_multi_walk",
            Recipe::ExpanderSusceptibility => "expander_susceptibility",
            Recipe::CycleScaling => "cycle_scaling",
            Recipe::CompleteGraph => "complete_graph",
            Recipe::TreeScaling => "tree_scaling",
            Recipe::GadgetRing => "gadget_ring",
            Recipe::HyperDense => "hyper_dense",
            Recipe::DualityCheck => "duality_check",
            Recipe::OracleSuite => "oracle_suite",
            Recipe::BoundsSuite => "bounds_suite",
            Recipe::PercolationSuite => "percolation_suite",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Recipe::SusceptibilityScaling => "S on d-dimensional tori against d log n/(λρ(d)) or f(n,λ)",
            Recipe::CoverMultiWalk => "walkers of length t needed to cover a torus against log|V|/p_t",
            Recipe::ExpanderSusceptibility => "S·λγ/log n on random regular graphs",
            Recipe::CycleScaling => "S on cycles against (λ^{-1} log λn)², slope test",
            Recipe::CompleteGraph => "S on complete graphs against λ^{-1} log n",
            Recipe::TreeScaling => "S on d-ary trees against (n/λ) log(n/λ), slope test",
            Recipe::GadgetRing => "S on gadget rings against min{max{ds, s²}, n²}",
            Recipe::HyperDense => "Pr[S > 1] at λ = (1+δ) d log|V| against |V|^{-δ}",
            Recipe::DualityCheck => "D(G,s) > t ⟺ C(G,t) > s on shared walkers",
            Recipe::OracleSuite => "activation times against the event-driven simulation",
            Recipe::BoundsSuite => "binomial Chernoff bounds against exact tails",
            Recipe::PercolationSuite => "uniqueness of large clusters in site percolation",
        }
    }

    pub fn parse(s: &str) -> Result<Recipe> {
        let key: String = s.chars().filter(|c| *c != '_' && *c != '-').collect::<String>().to_lowercase();
        Recipe::ALL
            .into_iter()
            .find(|r| r.name().replace('_', "") == key)
            .ok_or_else(|| Error::Config(format!("unknown recipe '{s}'")))
    }

    /// Recipes that run the frog model and so use `lambda_grid`.
    pub fn uses_lambda(self) -> bool {
        matches!(
            self,
            Recipe::SusceptibilityScaling
                | Recipe::ExpanderSusceptibility
                | Recipe::CycleScaling
                | Recipe::CompleteGraph
                | Recipe::TreeScaling
                | Recipe::GadgetRing
                | Recipe::OracleSuite
        )
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Pass/fail thresholds; which ones apply depends on the recipe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerance {
    pub band_lo: f64,
    pub band_hi: f64,
    pub slope_lo: f64,
    pub slope_hi: f64,
    /// Allowed max/min ratio of the fitted constant across the grid.
    pub stability: f64,
    /// Multiplier on probability bounds.
    pub slack: f64,
    /// Largest allowed event frequency.
    pub max_freq: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            band_lo: 0.75,
            band_hi: 1.25,
            slope_lo: 0.7,
            slope_hi: 1.3,
            stability: 2.0,
            slack: 10.0,
            max_freq: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub recipe: Recipe,
    /// Family kind (`Family::short_name`) combined with `d` and each entry of
    /// `n_grid`; ignored when `graphs` is non-empty.
    pub family: String,
    pub d: usize,
    pub n_grid: Vec<usize>,
    /// Explicit graph list.
    pub graphs: Vec<String>,
    pub lambda_grid: Vec<f64>,
    pub replicates: u64,
    pub seed: u64,
    /// Seed for random regular graphs.
    pub graph_seed: u64,
    pub horizon_cap: u32,
    pub walker_cap: u64,
    pub t_grid: Vec<u64>,
    pub s_grid: Vec<u64>,
    pub p_grid: Vec<f64>,
    pub delta: f64,
    /// Prefactor of the large-cluster threshold.
    pub prefactor: f64,
    pub tolerance: Tolerance,
    /// Worker threads; 0 uses the default pool.
    pub workers: usize,
    pub output_csv: Option<PathBuf>,
    pub output_json: Option<PathBuf>,
    /// Write measured wall time to `runtime_ms`; otherwise the column is 0
    /// and output is byte-reproducible.
    pub record_runtime: bool,
}

impl ExperimentSpec {
    /// Default specification of a recipe.
    pub fn for_recipe(recipe: Recipe) -> ExperimentSpec {
        let mut s = ExperimentSpec {
            recipe,
            family: "torus".into(),
            d: 3,
            n_grid: vec![20, 30, 40],
            graphs: Vec::new(),
            lambda_grid: vec![1.0],
            replicates: 100,
            seed: 1,
            graph_seed: 7,
            horizon_cap: crate::frog::DEFAULT_HORIZON_CAP,
            walker_cap: 1 << 20,
            t_grid: Vec::new(),
            s_grid: Vec::new(),
            p_grid: Vec::new(),
            delta: 0.5,
            prefactor: 1.0,
            tolerance: Tolerance::default(),
            workers: 0,
            output_csv: None,
            output_json: None,
            record_runtime: false,
        };
        let t = &mut s.tolerance;
        match recipe {
            Recipe::SusceptibilityScaling => {
                t.band_lo = 0.6;
                t.band_hi = 1.4;
            }
            Recipe::CoverMultiWalk => {
                s.n_grid = vec![12];
                s.t_grid = vec![100, 400, 1600];
                s.replicates = 50;
                t.band_lo = 0.5;
                t.band_hi = 1.5;
            }
            Recipe::ExpanderSusceptibility => {
                s.family = "random_regular".into();
                s.d = 4;
                s.n_grid = vec![256, 512, 1024];
                s.replicates = 50;
            }
            Recipe::CycleScaling => {
                s.family = "cycle".into();
                s.d = 2;
                s.n_grid = (8..=13).map(|k| 1 << k).collect();
                s.replicates = 50;
            }
            Recipe::CompleteGraph => {
                s.family = "complete".into();
                s.n_grid = vec![250, 500, 1000];
                s.replicates = 200;
                t.band_lo = 0.8;
                t.band_hi = 1.2;
            }
            Recipe::TreeScaling => {
                s.family = "tree".into();
                s.d = 2;
                s.n_grid = vec![6, 7, 8, 9, 10];
                s.replicates = 50;
            }
            Recipe::GadgetRing => {
                s.family = "gadget_ring".into();
                s.d = 4;
                s.n_grid = vec![32, 64, 128, 256];
                s.replicates = 50;
                t.band_lo = 0.1;
            }
            Recipe::HyperDense => {
                s.family = "random_regular".into();
                s.d = 4;
                s.n_grid = vec![512];
                s.replicates = 500;
            }
            Recipe::DualityCheck => {
                s.graphs = vec!["Torus(2,10)".into(), "Complete(8)".into()];
                s.s_grid = (1..=10).collect();
                s.t_grid = vec![0, 1, 2, 4, 8, 16, 32, 64, 128, 256];
            }
            Recipe::OracleSuite => {
                s.graphs = vec![
                    "Cycle(16)".into(),
                    "Torus(2,3)".into(),
                    "Complete(5)".into(),
                    "DaryTree(2,3)".into(),
                ];
                s.lambda_grid = vec![0.5, 1.0, 2.0];
                s.replicates = 50;
            }
            Recipe::BoundsSuite => {
                s.family = "none".into();
                s.n_grid = vec![10_000];
                s.replicates = 1000;
            }
            Recipe::PercolationSuite => {
                s.d = 2;
                s.n_grid = vec![128];
                s.p_grid = vec![0.95];
                s.replicates = 200;
            }
        }
        s
    }

    /// Graph families covered by the spec, in grid order.
    pub fn families(&self) -> Result<Vec<Family>> {
        if !self.graphs.is_empty() {
            return self
                .graphs
                .iter()
                .map(|g| Family::parse(g).map_err(|e| Error::Config(e.to_string())))
                .collect();
        }
        let d = self.d;
        self.n_grid
            .iter()
            .map(|&n| {
                Ok(match self.family.as_str() {
                    "cycle" => Family::Cycle { n },
                    "torus" => Family::Torus { d, n },
                    "complete" => Family::Complete { n },
                    "tree" => Family::DaryTree { d, depth: n },
                    "gadget_ring" => Family::GadgetRing { d, n },
                    "random_regular" => Family::RandomRegular { n, d, seed: self.graph_seed },
                    other => return Err(Error::Config(format!("family '{other}' cannot be generated"))),
                })
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.into()));
        if self.replicates < 1 {
            return fail("replicates must be at least 1");
        }
        if self.recipe != Recipe::BoundsSuite && self.graphs.is_empty() && self.n_grid.is_empty() {
            return fail("n_grid must be non-empty");
        }
        if self.recipe.uses_lambda() && self.lambda_grid.is_empty() {
            return fail("lambda_grid must be non-empty");
        }
        if self.lambda_grid.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return fail("lambda values must be positive and finite");
        }
        match self.recipe {
            Recipe::CoverMultiWalk if self.t_grid.is_empty() => return fail("t_grid must be non-empty"),
            Recipe::DualityCheck if self.t_grid.is_empty() || self.s_grid.is_empty() => {
                return fail("s_grid and t_grid must be non-empty")
            }
            Recipe::DualityCheck if self.s_grid.contains(&0) => return fail("s_grid entries must be positive"),
            Recipe::PercolationSuite if self.p_grid.is_empty() => return fail("p_grid must be non-empty"),
            _ => {}
        }
        if self.p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return fail("p values must lie in [0,1]");
        }
        if self.horizon_cap < 1 {
            return fail("horizon_cap must be positive");
        }
        if self.recipe != Recipe::BoundsSuite {
            self.families()?;
        }
        Ok(())
    }

    /// Parses config text; `seed_override` replaces `seed` when set.
    pub fn parse(text: &str, seed_override: Option<u64>) -> Result<ExperimentSpec> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(Error::Parse { line: i + 1, msg: "expected key = value".into() })?;
            pairs.push((i + 1, k.trim().to_string(), v.trim().to_string()));
        }
        let recipe = pairs
            .iter()
            .find(|(_, k, _)| k == "recipe")
            .ok_or_else(|| Error::Config("missing 'recipe'".into()))?;
        let mut spec = ExperimentSpec::for_recipe(Recipe::parse(&recipe.2)?);
        for (line, k, v) in &pairs {
            spec.set(k, v).map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { line: *line, msg },
                other => other,
            })?;
        }
        if let Some(seed) = seed_override {
            spec.seed = seed;
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Reads a config file, honouring `FROGSIM_SEED`.
    pub fn from_file(path: &std::path::Path) -> Result<ExperimentSpec> {
        let text = std::fs::read_to_string(path)?;
        let seed = match std::env::var(SEED_ENV) {
            Ok(s) => Some(s.trim().parse().map_err(|_| Error::Config(format!("{SEED_ENV}='{s}' is not an integer")))?),
            Err(_) => None,
        };
        ExperimentSpec::parse(&text, seed)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let t = &mut self.tolerance;
        match key {
            "recipe" => {}
            "family" => self.family = value.to_string(),
            "d" => self.d = num(value)?,
            "n_grid" => self.n_grid = list(value)?,
            "graphs" => self.graphs = value.split(';').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            "lambda_grid" => self.lambda_grid = list(value)?,
            "replicates" => self.replicates = num(value)?,
            "seed" => self.seed = num(value)?,
            "graph_seed" => self.graph_seed = num(value)?,
            "horizon_cap" => self.horizon_cap = num(value)?,
            "walker_cap" => self.walker_cap = num(value)?,
            "t_grid" => self.t_grid = list(value)?,
            "s_grid" => self.s_grid = list(value)?,
            "p_grid" => self.p_grid = list(value)?,
            "delta" => self.delta = num(value)?,
            "prefactor" => self.prefactor = num(value)?,
            "band_lo" => t.band_lo = num(value)?,
            "band_hi" => t.band_hi = num(value)?,
            "slope_lo" => t.slope_lo = num(value)?,
            "slope_hi" => t.slope_hi = num(value)?,
            "stability" => t.stability = num(value)?,
            "slack" => t.slack = num(value)?,
            "max_freq" => t.max_freq = num(value)?,
            "workers" => self.workers = num(value)?,
            "output_csv" => self.output_csv = Some(PathBuf::from(value)),
            "output_json" => self.output_json = Some(PathBuf::from(value)),
            "record_runtime" => self.record_runtime = num(value)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }
}

fn num<T: std::str::FromStr>(v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse { line: 0, msg: format!("cannot parse '{v}'") })
}

fn list<T: std::str::FromStr>(v: &str) -> Result<Vec<T>> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(num).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for r in Recipe::ALL {
            ExperimentSpec::for_recipe(r).validate().unwrap();
            assert_eq!(Recipe::parse(r.name()).unwrap(), r);
        }
        assert_eq!(Recipe::parse("OracleSuite").unwrap(), Recipe::OracleSuite);
    }

    #[test]
    fn parse_overrides() {
        let text = "# cycles\nrecipe = cycle_scaling\nn_grid = 64, 128\nlambda_grid=0.5,1\nreplicates = 3\nseed = 9\n";
        let s = ExperimentSpec::parse(text, None).unwrap();
        assert_eq!(s.recipe, Recipe::CycleScaling);
        assert_eq!(s.n_grid, vec![64, 128]);
        assert_eq!(s.lambda_grid, vec![0.5, 1.0]);
        assert_eq!((s.replicates, s.seed), (3, 9));
        assert_eq!(s.families().unwrap(), vec![Family::Cycle { n: 64 }, Family::Cycle { n: 128 }]);
        let s = ExperimentSpec::parse(text, Some(42)).unwrap();
        assert_eq!(s.seed, 42);
    }

    #[test]
    fn graph_list() {
        let s = ExperimentSpec::parse("recipe = oracle_suite\ngraphs = Cycle(5); Torus(2,3)\n", None).unwrap();
        assert_eq!(s.families().unwrap(), vec![Family::Cycle { n: 5 }, Family::Torus { d: 2, n: 3 }]);
    }

    #[test]
    fn errors() {
        assert!(matches!(ExperimentSpec::parse("n_grid = 3\n", None), Err(Error::Config(_))));
        assert!(matches!(
            ExperimentSpec::parse("recipe = cycle_scaling\nbogus line\n", None),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            ExperimentSpec::parse("recipe = cycle_scaling\nreplicates = x\n", None),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(ExperimentSpec::parse("recipe = cycle_scaling\ncolour = red\n", None), Err(Error::Config(_))));
        assert!(matches!(ExperimentSpec::parse("recipe = cycle_scaling\nreplicates = 0\n", None), Err(Error::Config(_))));
        assert!(matches!(ExperimentSpec::parse("recipe = cycle_scaling\nn_grid =\n", None), Err(Error::Config(_))));
        assert!(matches!(ExperimentSpec::parse("recipe = nope\n", None), Err(Error::Config(_))));
    }
}
