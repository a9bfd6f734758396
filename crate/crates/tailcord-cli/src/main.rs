mod commands;
mod config;

use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};

use config::{ExperimentConfig, GridSpec, SurfaceChoice};

/// Simulation and validation of concomitant maxima under bivariate
/// extremal dependence.
#[derive(Parser, Debug)]
#[command(name = "tailcord", version, about)]
struct Cli {
    /// JSON config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (affects wall time only, never output bytes);
    /// falls back to TAILCORD_THREADS, then all cores
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Model family: survival-clayton-pareto | logistic-frechet | gaussian-bivariate
    #[arg(long, global = true)]
    family: Option<String>,

    /// Clayton dependence parameter (family 1)
    #[arg(long, global = true)]
    theta: Option<f64>,

    /// Pareto-Lomax shape (family 1)
    #[arg(long, global = true)]
    nu: Option<f64>,

    /// Logistic dependence parameter in (0,1) (family 2)
    #[arg(long, global = true)]
    gamma: Option<f64>,

    /// Correlation in [0,1) (family 3 and the gaussian command)
    #[arg(long, global = true)]
    rho: Option<f64>,

    /// Sample size per replicate
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Number of replicates
    #[arg(long, global = true)]
    replicates: Option<usize>,

    /// Comma-separated split sizes, e.g. 1,50,500
    #[arg(long, value_delimiter = ',', global = true)]
    k: Option<Vec<usize>>,

    /// Master seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Surface for validate/ksweep: limit | oracle | self-test
    #[arg(long, global = true)]
    surface: Option<SurfaceChoice>,

    /// Explicit grid "v1_min,v1_max,v2_min,v2_max,steps" or "sample-points"
    #[arg(long, global = true)]
    grid: Option<String>,

    /// Exponential-scale threshold (plays the role of log n)
    #[arg(long, global = true)]
    threshold_u: Option<f64>,

    /// Comma-separated y grid for the gaussian tail check; an empty string
    /// requests the constants table only
    #[arg(long, global = true)]
    y_grid: Option<String>,

    /// Tail-conditioned draws per y grid point
    #[arg(long, global = true)]
    tail_samples: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate replicates and write replicates.csv
    Simulate,
    /// Evaluate the asymptotic joint law; writes limit_cdf.csv
    LimitSurface,
    /// Evaluate the exact finite-sample law; writes oracle_cdf.csv
    FiniteOracle,
    /// Simulate, compare against a surface; writes report.json + errors.csv
    Validate,
    /// Sweep over k_list; writes ksweep.csv
    Ksweep,
    /// Norming constants and the conditional tail check; writes norming.csv
    /// (+ gauss_tail.csv when y grid nonempty)
    Gaussian,
}

fn apply_overrides(cli: &Cli, cfg: &mut ExperimentConfig) -> anyhow::Result<()> {
    use tailcord::ModelSpec;

    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.clone();
    }
    if let Some(name) = &cli.family {
        cfg.model = match name.as_str() {
            "survival-clayton-pareto" => ModelSpec::SurvivalClaytonPareto {
                theta: 2.0,
                nu: 1.0,
            },
            "logistic-frechet" => ModelSpec::LogisticFrechet { gamma: 0.5 },
            "gaussian-bivariate" => ModelSpec::GaussianBivariate { rho: 0.5 },
            other => anyhow::bail!("unknown family {other:?}"),
        };
    }
    match &mut cfg.model {
        ModelSpec::SurvivalClaytonPareto { theta, nu } => {
            if let Some(t) = cli.theta {
                *theta = t;
            }
            if let Some(v) = cli.nu {
                *nu = v;
            }
        }
        ModelSpec::LogisticFrechet { gamma } => {
            if let Some(g) = cli.gamma {
                *gamma = g;
            }
        }
        ModelSpec::GaussianBivariate { rho } => {
            if let Some(r) = cli.rho {
                *rho = r;
            }
        }
    }
    if let Some(r) = cli.rho {
        cfg.rho = r;
    }
    if let Some(n) = cli.n {
        cfg.n = n;
    }
    if let Some(r) = cli.replicates {
        cfg.replicates = r;
    }
    if let Some(ks) = &cli.k {
        cfg.k_list = ks.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(s) = cli.surface {
        cfg.surface = s;
    }
    if let Some(g) = &cli.grid {
        cfg.grid = parse_grid(g)?;
    }
    if let Some(u) = cli.threshold_u {
        cfg.threshold_u = u;
    }
    if let Some(ys) = &cli.y_grid {
        cfg.y_grid = if ys.trim().is_empty() {
            Vec::new()
        } else {
            ys.split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .context("parsing --y-grid")?
        };
    }
    if let Some(t) = cli.tail_samples {
        cfg.tail_samples = t;
    }
    Ok(())
}

fn parse_grid(text: &str) -> anyhow::Result<GridSpec> {
    if text == "sample-points" {
        return Ok(GridSpec::Named(text.into()));
    }
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 5 {
        anyhow::bail!("grid must be \"sample-points\" or v1_min,v1_max,v2_min,v2_max,steps");
    }
    Ok(GridSpec::Rect {
        v1_min: parts[0].parse()?,
        v1_max: parts[1].parse()?,
        v2_min: parts[2].parse()?,
        v2_max: parts[3].parse()?,
        steps: parts[4].parse()?,
    })
}

fn thread_count(cli: &Cli) -> Option<usize> {
    cli.threads.or_else(|| {
        std::env::var("TAILCORD_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

fn run() -> anyhow::Result<u8> {
    let cli = Cli::parse();

    if let Some(threads) = thread_count(&cli) {
        // affects scheduling only; outputs are schedule-independent
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }

    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    apply_overrides(&cli, &mut cfg)?;
    cfg.validate()?;

    match cli.command {
        Command::Simulate => commands::cmd_simulate(&cfg),
        Command::LimitSurface => commands::cmd_limit_surface(&cfg),
        Command::FiniteOracle => commands::cmd_finite_oracle(&cfg),
        Command::Validate => {
            commands::check_surface_supported(&cfg)?;
            commands::cmd_validate(&cfg)
        }
        Command::Ksweep => {
            commands::check_surface_supported(&cfg)?;
            commands::cmd_ksweep(&cfg)
        }
        Command::Gaussian => commands::cmd_gaussian(&cfg),
    }
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code.into()),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}
