use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use holoq_cli::config::{ConfigError, DimRange, Format, RatValue, RunConfig, Suite};
use holoq_cli::runner::{self, exit, RunError};

/// Verify holographic Q-curvature identities: exact sphere identities,
/// hypergeometric summations and grid checks on conformally flat tori.
#[derive(Parser, Debug)]
#[command(name = "verify", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact identities on round spheres.
    Sphere(Flags),
    /// Terminating hypergeometric summations and transformations.
    Hypergeom(Flags),
    /// Grid checks on conformally flat test metrics.
    Numeric(Flags),
    /// Critical-dimension identities at n = 4.
    #[command(name = "critical-n4")]
    CriticalN4(Flags),
    /// Conformal transformation law of Q₄.
    Conformal(Flags),
    /// Every suite.
    All(Flags),
    /// The suites listed in the config file (all when none is given).
    Run(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// JSON config file; flags given on the command line override it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Dimension range, e.g. `3..12` or `4`; sets the sphere range and the
    /// grid dimensions.
    #[arg(long = "n", value_name = "RANGE")]
    n: Option<DimRange>,
    /// Largest order N on spheres.
    #[arg(long = "Nmax", value_name = "N")]
    big_n_max: Option<usize>,
    /// Points per axis of the fine grid; a default refinement grid that is
    /// not coarser becomes half of it.
    #[arg(long)]
    grid: Option<usize>,
    /// Points per axis of the refinement grid, or `none`.
    #[arg(long, value_name = "N|none")]
    coarse_grid: Option<String>,
    /// Metric presets (comma separated or repeated).
    #[arg(long, value_delimiter = ',')]
    preset: Vec<String>,
    /// Seed of the random presets, test fields and hypergeometric batteries.
    #[arg(long)]
    seed: Option<u64>,
    /// λ samples as exact rationals, e.g. `0,1/3,-2`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Vec<RatValue>,
    /// Tolerance: a number sets the identity tolerance, `key=value` any of
    /// identity, adjoint, coherence, critical, refinement_factor,
    /// roundoff_floor.
    #[arg(long, value_name = "TOL")]
    tol: Vec<String>,
    /// Stencil accuracy order (4, 6, 8, 10 or 12).
    #[arg(long)]
    order: Option<usize>,
    /// Random instances per hypergeometric battery.
    #[arg(long)]
    instances: Option<usize>,
    /// Random instances of the connection formula.
    #[arg(long)]
    connection_instances: Option<usize>,
    /// Extra Einstein constant modes, given by their J (non-sphere extension).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    einstein: Vec<RatValue>,
    /// Directory for report.json / report.md.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Report formats (comma separated or repeated).
    #[arg(long, value_enum, value_delimiter = ',')]
    format: Vec<Format>,
    /// Print the effective config as JSON and exit.
    #[arg(long)]
    dump_config: bool,
}

fn build_config(suites: Option<Vec<Suite>>, f: &Flags) -> Result<RunConfig, ConfigError> {
    let mut c = match &f.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = suites {
        c.suites = s;
    }
    if let Some(n) = f.n {
        c.sphere.n = n;
        c.numeric.dims = n.iter().map(|d| d.max(0) as usize).collect();
    }
    if let Some(big_n) = f.big_n_max {
        c.sphere.big_n_max = big_n;
    }
    if let Some(g) = f.grid {
        c.numeric.grid = g;
        // Keep the refinement pair consistent unless it is set explicitly.
        if f.coarse_grid.is_none() && c.numeric.coarse_grid.is_some_and(|cg| cg >= g) {
            c.numeric.coarse_grid = Some(g / 2).filter(|&h| h >= 16);
        }
    }
    if let Some(cg) = &f.coarse_grid {
        c.numeric.coarse_grid = match cg.as_str() {
            "none" => None,
            s => Some(s.parse().map_err(|e| ConfigError::Invalid { field: "coarse-grid", reason: format!("{s:?}: {e}") })?),
        };
    }
    if !f.preset.is_empty() {
        c.numeric.presets = f.preset.clone();
    }
    if let Some(seed) = f.seed {
        c.numeric.seed = seed;
        c.hypergeom.seed = seed;
    }
    if !f.lambda.is_empty() {
        c.numeric.lambdas = f.lambda.clone();
    }
    for t in &f.tol {
        c.set_tolerance(t)?;
    }
    if let Some(o) = f.order {
        c.numeric.stencil_order = o;
    }
    if let Some(i) = f.instances {
        c.hypergeom.instances = i;
    }
    if let Some(i) = f.connection_instances {
        c.hypergeom.connection_instances = i;
    }
    if !f.einstein.is_empty() {
        c.sphere.einstein = f.einstein.clone();
    }
    if let Some(dir) = &f.out {
        c.output.dir = Some(dir.clone());
    }
    if !f.format.is_empty() {
        c.output.formats = f.format.clone();
    }
    c.validate()?;
    Ok(c)
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("HOLOQ_THREADS") else {
        return Ok(());
    };
    let k: usize = v.trim().parse().map_err(|_| format!("HOLOQ_THREADS={v:?} is not a thread count"))?;
    if k == 0 {
        return Err("HOLOQ_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(k).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (suites, flags) = match &cli.command {
        Command::Sphere(f) => (Some(vec![Suite::Sphere]), f),
        Command::Hypergeom(f) => (Some(vec![Suite::Hypergeom]), f),
        Command::Numeric(f) => (Some(vec![Suite::Numeric]), f),
        Command::CriticalN4(f) => (Some(vec![Suite::CriticalN4]), f),
        Command::Conformal(f) => (Some(vec![Suite::Conformal]), f),
        Command::All(f) => (Some(Suite::ALL.to_vec()), f),
        Command::Run(f) => (None, f),
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(exit::USAGE);
    }
    let config = match build_config(suites, flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::USAGE);
        }
    };
    if flags.dump_config {
        println!("{}", config.to_json());
        return ExitCode::from(exit::PASS);
    }
    let report = match runner::run(&config) {
        Ok(r) => r,
        Err(e @ RunError::Config(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::USAGE);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::RUNTIME);
        }
    };
    print!("{}", runner::summary(&report));
    if let Some(dir) = &config.output.dir {
        match runner::write_reports(&report, dir, &config.output.formats) {
            Ok(paths) => {
                for p in paths {
                    println!("wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(exit::RUNTIME);
            }
        }
    }
    ExitCode::from(runner::exit_code(&report))
}
