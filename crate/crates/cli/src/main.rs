use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use infocen::baselines::Rescoring;
use infocen::bench::{run, sweep, Algorithm, ExperimentConfig, GraphSource, PhiBound, Report, TargetSpec};
use infocen::generators::{generate_ba, generate_ws};
use infocen::graph::{write_edge_list, NodeLabelMap};
use infocen::walks::Lambda;

#[derive(Parser)]
#[command(name = "infocen", version, about = "Minimize a node's information centrality by removing edges")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Greedy minimization with one of the main algorithms.
    Minimize {
        #[arg(long, value_enum, default_value = "exact")]
        algorithm: Main,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive optimum over all k-subsets (small graphs only).
    Brute {
        #[command(flatten)]
        common: Common,
    },
    /// Random, betweenness or spanning-tree baselines.
    Baseline {
        #[arg(long, value_enum, value_delimiter = ',', default_value = "random,betweenness,spanning")]
        algorithm: Vec<Base>,
        #[command(flatten)]
        common: Common,
    },
    /// Every algorithm except brute force on the same targets.
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// ApproxiSC over several epsilons and FastICM over several alphas.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "0.3,0.2,0.1")]
        epsilons: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.3,0.2,0.1")]
        alphas: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Write a Barabasi-Albert graph as an edge list.
    GenBa {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m0: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Write a Watts-Strogatz graph (largest component) as an edge list.
    GenWs {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k_ring: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Main {
    Exact,
    Approx,
    Fast,
}

#[derive(Clone, Copy, ValueEnum)]
enum Base {
    Random,
    Betweenness,
    Spanning,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Desk,
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum RescoringArg {
    Sequential,
    Static,
}

/// Experiment flags; each overrides the config file when given.
#[derive(Args)]
struct Common {
    /// key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Edge-list file, `ba:n,m0[,seed]` or `ws:n,k,p[,seed]`.
    #[arg(long, short)]
    input: Option<String>,
    /// Parameter profile used when no config file is given.
    #[arg(long, value_enum, default_value = "paper")]
    profile: Profile,
    #[arg(long, short)]
    k: Option<usize>,
    /// Comma-separated node labels or `random:COUNT`.
    #[arg(long)]
    targets: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Spectral radius bound, or `auto` to estimate it per target.
    #[arg(long)]
    lambda: Option<Lambda>,
    /// Constant in the per-edge walk count.
    #[arg(long)]
    rho_constant: Option<f64>,
    /// `diameter`, `resistance` or a number.
    #[arg(long)]
    phi: Option<PhiBound>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination (default: stdout).
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Largest n for exact recomputation of every step.
    #[arg(long)]
    recompute_cap: Option<usize>,
    #[arg(long, value_enum)]
    rescoring: Option<RescoringArg>,
    /// Largest number of subsets brute force may enumerate.
    #[arg(long)]
    brute_budget: Option<u128>,
    #[arg(long)]
    max_len_cap: Option<usize>,
    /// FastICM resamples all walks every this many steps.
    #[arg(long)]
    resample_every: Option<usize>,
    /// Write zero elapsed times so output is byte-stable.
    #[arg(long)]
    no_timings: bool,
}

impl Common {
    fn config(&self, algorithms: Vec<Algorithm>, need_seed: bool) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, &self.input) {
            (Some(path), _) => ExperimentConfig::load(path).with_context(|| format!("reading {}", path.display()))?,
            (None, Some(_)) => {
                let source = GraphSource::File(PathBuf::new());
                match self.profile {
                    Profile::Desk => ExperimentConfig::desk(source),
                    Profile::Paper => ExperimentConfig::paper(source),
                }
            }
            (None, None) => bail!("either --input or --config is required"),
        };
        if let Some(input) = &self.input {
            cfg.source = input.parse()?;
        }
        cfg.algorithms = algorithms;
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(t) = &self.targets {
            cfg.targets = t.parse::<TargetSpec>()?;
        }
        let set = |slot: &mut f64, x: Option<f64>| {
            if let Some(x) = x {
                *slot = x;
            }
        };
        set(&mut cfg.epsilon, self.epsilon);
        set(&mut cfg.alpha, self.alpha);
        set(&mut cfg.gamma, self.gamma);
        set(&mut cfg.rho_constant, self.rho_constant);
        if let Some(l) = self.lambda {
            cfg.lambda = l;
        }
        if let Some(p) = self.phi {
            cfg.phi = p;
        }
        match self.seed {
            Some(s) => cfg.seed = s,
            None if need_seed && self.config.is_none() => bail!("--seed is required for this command"),
            None => {}
        }
        if let Some(o) = &self.output {
            cfg.output = Some(o.clone());
        }
        if let Some(c) = self.recompute_cap {
            cfg.recompute_cap = c;
        }
        if let Some(r) = self.rescoring {
            cfg.rescoring = match r {
                RescoringArg::Sequential => Rescoring::Sequential,
                RescoringArg::Static => Rescoring::Static,
            };
        }
        if let Some(b) = self.brute_budget {
            cfg.brute_budget = b;
        }
        if let Some(c) = self.max_len_cap {
            cfg.max_len_cap = c;
        }
        if self.resample_every.is_some() {
            cfg.resample_every = self.resample_every;
        }
        if self.no_timings {
            cfg.timings = false;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_output(path: Option<&PathBuf>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut f = io::BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?);
            write(&mut f)?;
            f.flush()?;
        }
        None => write(&mut io::stdout().lock())?,
    }
    Ok(())
}

fn report(cfg: &ExperimentConfig, report: &Report) -> Result<ExitCode> {
    write_output(cfg.output.as_ref(), |w| report.write_csv(w))?;
    let failures = report.failures();
    if failures > 0 {
        log::error!("{failures} of {} runs did not complete", report.outcomes.len());
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn experiment(common: &Common, algorithms: Vec<Algorithm>, need_seed: bool) -> Result<ExitCode> {
    let cfg = common.config(algorithms, need_seed)?;
    report(&cfg, &run(&cfg)?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<ExitCode> {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    match &cli.command {
        Command::Minimize { algorithm, common } => {
            let a = match algorithm {
                Main::Exact => Algorithm::Exact,
                Main::Approx => Algorithm::Approx,
                Main::Fast => Algorithm::Fast,
            };
            experiment(common, vec![a], false)
        }
        Command::Brute { common } => experiment(common, vec![Algorithm::Brute], false),
        Command::Baseline { algorithm, common } => {
            let algs = algorithm
                .iter()
                .map(|b| match b {
                    Base::Random => Algorithm::Random,
                    Base::Betweenness => Algorithm::Betweenness,
                    Base::Spanning => Algorithm::Spanning,
                })
                .collect();
            experiment(common, algs, false)
        }
        Command::Compare { common } => experiment(common, Algorithm::COMPARE.to_vec(), true),
        Command::Sweep {
            epsilons,
            alphas,
            common,
        } => {
            let cfg = common.config(vec![Algorithm::Exact], true)?;
            report(&cfg, &sweep(&cfg, epsilons, alphas)?)
        }
        Command::GenBa { n, m0, seed, output } => {
            let g = generate_ba(*n, *m0, *seed)?;
            let text = write_edge_list(&g, &NodeLabelMap::identity(g.node_count()));
            write_output(output.as_ref(), |w| w.write_all(text.as_bytes()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::GenWs {
            n,
            k_ring,
            p,
            seed,
            output,
        } => {
            let g = generate_ws(*n, *k_ring, *p, *seed)?;
            let text = write_edge_list(&g, &NodeLabelMap::identity(g.node_count()));
            write_output(output.as_ref(), |w| w.write_all(text.as_bytes()))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
