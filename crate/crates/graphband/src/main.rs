use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use graphband::config::ExperimentConfig;
use graphband::experiment::{pool_rng, run_experiment, ExperimentResult};
use graphband::io::{load_edge_list, save_pool};
use graphband::output::{non_monotone_policies, summary_table, write_curves};
use graphband::selftest;
use graphband_core::graph::{build_pool, GraphKind};

#[derive(Parser)]
#[command(name = "graphband", version, about = "Contextual bandit simulations with graph feedback")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its regret curves.
    Run(ExperimentArgs),
    /// Run one experiment per action count and print a final-regret table.
    Sweep {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Comma-separated action counts.
        #[arg(long, value_delimiter = ',', default_value = "20,40,60,80,100")]
        sweep_actions: Vec<usize>,
    },
    /// Sample connected subgraphs from an edge list and save them as a pool.
    Pool {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long, default_value_t = 100)]
        pool_size: usize,
        #[arg(long, default_value_t = 100)]
        subgraph_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the property suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "T")]
    horizon: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    class_size: Option<usize>,
    #[arg(long)]
    actions: Option<usize>,
    /// complete, clique_group, star, random or pool.
    #[arg(long)]
    graph: Option<String>,
    #[arg(long)]
    cliques: Option<usize>,
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    resample: Option<bool>,
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long)]
    pool_dir: Option<PathBuf>,
    #[arg(long)]
    pool_size: Option<usize>,
    #[arg(long)]
    subgraph_size: Option<usize>,
    /// Comma-separated: adacbg, adacbg-full, falcon, regcbg.
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, overrides_with = "no_lp")]
    use_lp: bool,
    #[arg(long)]
    no_lp: bool,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Graph name used in output file names.
    #[arg(long)]
    label: Option<String>,
}

impl ExperimentArgs {
    fn resolve(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let flags = [
            ("T", self.horizon.map(|v| v.to_string())),
            ("repeats", self.repeats.map(|v| v.to_string())),
            ("d", self.d.map(|v| v.to_string())),
            ("class_size", self.class_size.map(|v| v.to_string())),
            ("actions", self.actions.map(|v| v.to_string())),
            ("graph", self.graph.clone()),
            ("cliques", self.cliques.map(|v| v.to_string())),
            ("density", self.density.map(|v| v.to_string())),
            ("resample", self.resample.map(|v| v.to_string())),
            ("edges", path(&self.edges)),
            ("pool_dir", path(&self.pool_dir)),
            ("pool_size", self.pool_size.map(|v| v.to_string())),
            ("subgraph_size", self.subgraph_size.map(|v| v.to_string())),
            ("policy", self.policy.clone()),
            ("eta", self.eta.map(|v| v.to_string())),
            ("delta", self.delta.map(|v| v.to_string())),
            ("use_lp", self.use_lp.then(|| "true".to_owned())),
            ("use_lp", self.no_lp.then(|| "false".to_owned())),
            ("sigma", self.sigma.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("out", path(&self.out)),
            ("label", self.label.clone()),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, &v).with_context(|| format!("--{key}"))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn announce(cfg: &ExperimentConfig) {
    println!("# resolved configuration");
    print!("{cfg}");
    println!("# master seed {}", cfg.seed);
}

fn report(result: &ExperimentResult) -> anyhow::Result<()> {
    for o in &result.outcomes {
        let (m, s) = o.final_mean_std();
        let fallbacks: usize = o.traces.iter().map(|t| t.lp_fallbacks).sum();
        println!("{:<12} K={:<4} final regret {m:.2} ({s:.2})  lp fallbacks {fallbacks}", o.kind.name(), result.config.action_count);
    }
    if let Some(dir) = &result.config.out {
        let files = write_curves(dir, result)?;
        println!("wrote {} files to {}", files.len(), dir.display());
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            announce(&cfg);
            report(&run_experiment(&cfg)?)?;
        }
        Command::Sweep { exp, sweep_actions } => {
            let base = exp.resolve()?;
            if sweep_actions.is_empty() {
                bail!("--sweep-actions is empty");
            }
            announce(&base);
            println!("# sweep actions {sweep_actions:?}");
            let mut results = Vec::new();
            for k in sweep_actions {
                let mut cfg = base.clone();
                cfg.action_count = k;
                cfg.subgraph_size = None;
                cfg.validate()?;
                let result = run_experiment(&cfg)?;
                report(&result)?;
                results.push(result);
            }
            print!("{}", summary_table(&results));
            for kind in non_monotone_policies(&results) {
                println!("note: mean final regret of {kind} is not monotone in K");
            }
        }
        Command::Pool { edges, pool_size, subgraph_size, seed, out } => {
            println!("# pool from {} size {pool_size} subgraph {subgraph_size}", edges.display());
            println!("# master seed {seed}");
            let list = load_edge_list(&edges)?;
            let GraphKind::Pool(pool) = build_pool(&list, pool_size, subgraph_size, &mut pool_rng(seed))?.kind else {
                unreachable!("build_pool returns a pool source")
            };
            save_pool(&out, &pool)?;
            println!("wrote {} graphs to {}", pool.len(), out.display());
        }
        Command::Selftest { seed } => {
            println!("# master seed {seed}");
            let reports = selftest::run_all(seed);
            for r in &reports {
                println!("{r}");
            }
            return Ok(reports.iter().all(|r| r.passed()));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
