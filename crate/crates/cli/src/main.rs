use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use halftorus_cli::{run_pipeline, run_sweep, CliResult, RunConfig, Stage};

#[derive(Parser)]
#[command(
    name = "halftorus",
    version,
    about = "Principal Dirichlet eigenfunction on a perturbed half torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Axisymmetric radial eigenpair.
    Radial(Overrides),
    /// First-order correction for mode n.
    Perturb(Overrides),
    /// 2D eigenpair on the perturbed surface.
    Solve2d(Overrides),
    /// Critical points of the 2D eigenfunction.
    Critical(Overrides),
    /// Full run with every check.
    Verify(Overrides),
    /// Independent runs over eps_list × n_list.
    Sweep(Overrides),
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<f64>,
    /// Mode number, `auto` or `auto+k`.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    nphi: Option<usize>,
    #[arg(long)]
    ntheta: Option<usize>,
}

impl Overrides {
    fn resolve(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if let Some(e) = self.eps {
            cfg.eps = e;
        }
        if let Some(n) = &self.n {
            cfg.set("n", n)?;
        }
        if let Some(v) = self.nphi {
            cfg.nphi = v;
        }
        if let Some(v) = self.ntheta {
            cfg.ntheta = Some(v);
        }
        Ok(cfg)
    }
}

#[cfg(feature = "parallel")]
fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("HALFTORUS_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| {
            halftorus_cli::CliError::Config(format!("HALFTORUS_THREADS must be a positive integer, got '{v}'"))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| halftorus_cli::CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() -> CliResult<()> {
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    let (stage, o) = match &cli.command {
        Command::Radial(o) => (Some(Stage::Radial), o),
        Command::Perturb(o) => (Some(Stage::Perturb), o),
        Command::Solve2d(o) => (Some(Stage::Solve2D), o),
        Command::Critical(o) => (Some(Stage::Critical), o),
        Command::Verify(o) => (Some(Stage::Verify), o),
        Command::Sweep(o) => (None, o),
    };
    let cfg = o.resolve()?;
    match stage {
        Some(stage) => {
            let report = run_pipeline(&cfg, stage)?;
            if cfg.verbosity > 0 {
                print!("{}", report.render());
            }
        }
        None => {
            let outcome = run_sweep(&cfg)?;
            if cfg.verbosity > 0 {
                for r in &outcome.rows {
                    println!(
                        "n={} eps={:e} {} count={}/{}",
                        r.n, r.eps, r.verdict, r.count, r.expected
                    );
                }
                for (n, _, slope) in &outcome.stationarity {
                    println!("stationarity n={n} slope={slope:.4}");
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("halftorus: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::from(e.exit_code())
        }
    }
}
