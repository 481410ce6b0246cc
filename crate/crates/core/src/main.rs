use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use frogsim::estimators::{ld_bounds, rho_estimate, site_percolation, EscapeMethod};
use frogsim::experiments::{run_experiment, ExperimentSpec, Recipe};
use frogsim::frog::{cover_time_frog, susceptibility_and_cover, HorizonConfig, DEFAULT_HORIZON_CAP};
use frogsim::graph::{generate_graph, read_edge_list, spectral_gap, write_edge_list};
use frogsim::multiwalk::{cover_fixed_length, cover_fixed_walkers};
use frogsim::sampling::ParticleField;
use frogsim::{Error, Family, Graph, Result};

const EXIT_CONFIG: u8 = 1;
const EXIT_VERDICT: u8 = 2;

#[derive(Parser)]
#[command(name = "frogsim", version, about = "Frog model and multiple random walk simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArgs {
    /// Family such as `Torus(2,10)`, `Cycle(64)` or `RandomRegular(512,4,1)`.
    #[arg(long, short, conflicts_with = "edges", required_unless_present = "edges")]
    graph: Option<String>,
    /// Edge list file written by `generate`.
    #[arg(long)]
    edges: Option<PathBuf>,
}

impl GraphArgs {
    fn load(&self) -> Result<Graph> {
        match (&self.graph, &self.edges) {
            (Some(f), _) => generate_graph(&Family::parse(f)?),
            (None, Some(p)) => read_edge_list(std::io::BufReader::new(std::fs::File::open(p)?)),
            (None, None) => Err(Error::InvalidParams("no graph given".into())),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 10)]
    reps: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph as an edge list.
    Generate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Susceptibility and frog cover time per replicate.
    Susceptibility {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = DEFAULT_HORIZON_CAP)]
        horizon_cap: u32,
    },
    /// Frog cover time with immortal particles per replicate.
    Cover {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = DEFAULT_HORIZON_CAP)]
        horizon_cap: u32,
    },
    /// Independent walkers from the origin: length needed for `--walkers`,
    /// or walkers needed for `--length`.
    Multiwalk {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, conflicts_with = "length", required_unless_present = "length")]
        walkers: Option<u64>,
        #[arg(long)]
        length: Option<u64>,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1 << 30)]
        cap: u64,
    },
    /// Escape probability of simple random walk on Z^d.
    EstimateRho {
        #[arg(long, short)]
        d: usize,
        /// `green` or `mc`.
        #[arg(long, default_value = "green")]
        method: String,
        #[arg(long, default_value_t = 2000)]
        terms: usize,
        #[arg(long, default_value_t = 10_000)]
        horizon: u64,
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Spectral gap of the simple random walk.
    SpectralGap {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Site percolation on a torus.
    Percolation {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, short)]
        p: f64,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1.0)]
        prefactor: f64,
    },
    /// Chernoff bounds against exact binomial tails.
    Bounds {
        #[arg(long, short)]
        n: u64,
        #[arg(long, short)]
        p: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, short)]
        k: Option<u64>,
    },
    /// Config-driven experiments.
    Experiment {
        #[command(subcommand)]
        action: ExperimentAction,
    },
}

#[derive(Subcommand)]
enum ExperimentAction {
    /// Run the experiment a config file describes.
    Run {
        config: PathBuf,
        /// Exit with status 2 when a verdict fails.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// List the named recipes.
    ListRecipes,
}

fn emit<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer(&mut out, value).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    writeln!(out)?;
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("λ = {lambda} must be positive and finite")))
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Generate { graph, out } => {
            let g = graph.load()?;
            match out {
                Some(p) => write_edge_list(&g, std::io::BufWriter::new(std::fs::File::create(p)?))?,
                None => write_edge_list(&g, std::io::stdout().lock())?,
            }
        }
        Command::Susceptibility { graph, lambda, run, horizon_cap } => {
            check_lambda(lambda)?;
            let g = graph.load()?;
            let cfg = HorizonConfig { initial: 1, cap: horizon_cap };
            for rep in 0..run.reps {
                let field = ParticleField::sample(&g, lambda, g.origin(), run.seed, rep);
                emit(&susceptibility_and_cover(&g, &field, cfg))?;
            }
        }
        Command::Cover { graph, lambda, run, horizon_cap } => {
            check_lambda(lambda)?;
            let g = graph.load()?;
            let cfg = HorizonConfig { initial: 1, cap: horizon_cap };
            for rep in 0..run.reps {
                let field = ParticleField::sample(&g, lambda, g.origin(), run.seed, rep);
                let c = cover_time_frog(&g, &field, cfg);
                emit(&json!({ "replicate": rep, "lambda": lambda, "cover_time": c }))?;
            }
        }
        Command::Multiwalk { graph, walkers, length, run, cap } => {
            let g = graph.load()?;
            for rep in 0..run.reps {
                let r = match (walkers, length) {
                    (Some(m), _) => cover_fixed_walkers(&g, m, run.seed, rep, cap)?,
                    (None, Some(t)) => cover_fixed_length(&g, t, run.seed, rep, cap),
                    (None, None) => return Err(Error::InvalidParams("need --walkers or --length".into())),
                };
                emit(&r)?;
            }
        }
        Command::EstimateRho { d, method, terms, horizon, reps, seed } => {
            let method = match method.as_str() {
                "green" => EscapeMethod::GreenSeries { terms },
                "mc" => EscapeMethod::TruncatedMC { horizon, reps },
                other => return Err(Error::InvalidParams(format!("unknown method '{other}'"))),
            };
            emit(&rho_estimate(d, method, seed)?)?;
        }
        Command::SpectralGap { graph, tol } => {
            let g = graph.load()?;
            emit(&spectral_gap(&g, tol)?)?;
        }
        Command::Percolation { graph, p, run, prefactor } => {
            let g = graph.load()?;
            for rep in 0..run.reps {
                let r = site_percolation(&g, p, run.seed, rep, prefactor)?;
                emit(&json!({
                    "replicate": rep,
                    "p": p,
                    "open": r.open_set.len(),
                    "components": r.components.len(),
                    "gc_size": r.gc_size,
                    "threshold": r.threshold,
                    "large_count": r.large_count,
                    "unique_large": r.unique_large,
                }))?;
            }
        }
        Command::Bounds { n, p, delta, k } => emit(&ld_bounds(n, p, delta, k)?)?,
        Command::Experiment { action } => match action {
            ExperimentAction::ListRecipes => {
                for r in Recipe::ALL {
                    println!("{:<24} {}", r.name(), r.description());
                }
            }
            ExperimentAction::Run { config, strict, workers, csv, json } => {
                let mut spec = ExperimentSpec::from_file(&config)?;
                if let Some(w) = workers {
                    spec.workers = w;
                }
                if csv.is_some() {
                    spec.output_csv = csv;
                }
                if json.is_some() {
                    spec.output_json = json;
                }
                let result = run_experiment(&spec)?;
                for c in &result.cells {
                    let ratio = c.ratio.map(|r| format!(" ratio {r:.4}")).unwrap_or_default();
                    let censored = if c.censored > 0 { format!(" censored {}", c.censored) } else { String::new() };
                    eprintln!(
                        "{} λ={:?} {}: mean {:.4} ci [{:.4}, {:.4}] n={}{ratio}{censored}",
                        c.graph_family, c.lambda, c.observable, c.mean, c.ci.0, c.ci.1, c.count
                    );
                }
                for w in &result.warnings {
                    eprintln!("warning: {w}");
                }
                for v in &result.verdicts {
                    eprintln!("{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
                }
                if strict && !result.passed() {
                    return Ok(EXIT_VERDICT);
                }
            }
        },
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
