mod config;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

/// Scar-function basis for the quartic billiard-like potential x²y²/2 + β(x⁴+y⁴)/4.
#[derive(Parser)]
#[command(name = "qscar", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Overrides,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Refine the orbit table and write orbit properties.
    Orbits,
    /// Bohr–Sommerfeld levels inside the window.
    Quantize,
    /// Scar functions of every level in the enlarged window.
    Scars,
    /// Scar functions plus the selective Gram–Schmidt basis.
    Select,
    /// Full pipeline: basis, Hamiltonian matrix, spectrum.
    Solve,
    /// Harmonic-oscillator reference spectrum.
    Reference,
    /// Solve and compare against the reference eigenstates.
    Compare,
    /// Solve and write local representations, participation ratios and fits.
    Analyze,
}

#[derive(Args)]
struct Overrides {
    /// `key = value` configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Comma-separated irreps (A1, A2, B1, B2, E1, E2).
    #[arg(long, global = true)]
    irrep: Option<String>,
    /// Energy window LO:HI.
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, global = true)]
    orbits: Option<PathBuf>,
    #[arg(long, global = true)]
    desym: Option<PathBuf>,
    /// Comma-separated orbit ids to keep.
    #[arg(long, global = true)]
    orbit_ids: Option<String>,
    #[arg(long, global = true)]
    cb: Option<f64>,
    /// Grid points per axis (power of two).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Split-operator order, 2 or 4.
    #[arg(long, global = true)]
    order: Option<String>,
    #[arg(long, global = true)]
    n_max: Option<u32>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write wavefunction snapshots.
    #[arg(long, global = true)]
    snapshots: bool,
}

impl Overrides {
    fn resolve(&self) -> Result<RunConfig, String> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let pairs: [(&str, Option<String>); 11] = [
            ("irrep", self.irrep.clone()),
            ("window", self.window.clone()),
            ("orbits", self.orbits.as_ref().map(|p| p.display().to_string())),
            ("desym", self.desym.as_ref().map(|p| p.display().to_string())),
            ("orbit_ids", self.orbit_ids.clone()),
            ("cb", self.cb.map(|v| v.to_string())),
            ("grid", self.grid.map(|v| v.to_string())),
            ("order", self.order.clone()),
            ("n_max", self.n_max.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("threads", self.threads.map(|v| v.to_string())),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        if self.snapshots {
            cfg.snapshots = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cmd: Command, cfg: &RunConfig) -> pipeline::StageResult<()> {
    match cmd {
        Command::Orbits => pipeline::orbits(cfg),
        Command::Quantize => pipeline::quantize(cfg),
        Command::Scars => pipeline::scars(cfg),
        Command::Select => pipeline::select(cfg),
        Command::Solve => pipeline::solve(cfg),
        Command::Reference => pipeline::reference(cfg),
        Command::Compare => pipeline::compare(cfg),
        Command::Analyze => pipeline::analyze(cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.opts.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error [config]: {e}");
            return ExitCode::FAILURE;
        }
    };
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error [config]: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli.command, &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error {e}");
            ExitCode::FAILURE
        }
    }
}
