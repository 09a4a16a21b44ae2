use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

mod commands;
mod config;

use config::{Format, RunConfig, CACHE_ENV};

#[derive(Debug, Parser)]
#[command(name = "diophant", version, about = "Continued fractions, recursive integrability and Dirichlet decisions")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Serialize)]
struct GlobalOpts {
    /// key=value file overriding the built-in defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Working precision for enclosures, in bits
    #[arg(long, global = true)]
    bits: Option<u32>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Exit with status 1 when a verdict is Undetermined
    #[arg(long, global = true)]
    strict: bool,
    /// Reuse outputs stored here; defaults to $DIOPHANT_CACHE_DIR
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// ODE horizon
    #[arg(long, global = true)]
    horizon: Option<f64>,
    /// First recurrence index
    #[arg(long, global = true)]
    k0: Option<u64>,
    /// Largest recurrence length N
    #[arg(long, global = true)]
    n_max: Option<u64>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Continued-fraction expansion, or the greedy construction from target denominators
    Cfrac(commands::CfracArgs),
    /// Decide whether f is recursively integrable
    ///
    /// CSV output: columns x,g of the ODE witness trace.
    Recint(commands::RecintArgs),
    /// Decide whether psi is Dirichlet for the max height on R^d
    Dirichlet(commands::DirichletArgs),
    /// Estimate the exponent of irrationality of a point
    Omega(commands::OmegaArgs),
    /// Estimate C_{H,psi}(x) as a running minimum over convergent tuples
    ///
    /// CSV output: columns ln_height,min_ratio in order of increasing height.
    Constant(commands::ConstantArgs),
    /// Simulate data progressions and their cost
    ///
    /// CSV output: columns k,b1,...,bd,cost, one row per state with a cost term.
    Dataprog(commands::DataprogArgs),
    /// Random plays of the variance-descent adversary game
    Adversary(commands::AdversaryArgs),
    /// Locate the maximiser of (alpha_d - g) g^(d-1) on a grid
    Gamma(commands::GammaArgs),
    /// Build a point whose max-height exponent is alpha_d
    BadPoint(commands::BadPointArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Cfrac(_) => "cfrac",
            Command::Recint(_) => "recint",
            Command::Dirichlet(_) => "dirichlet",
            Command::Omega(_) => "omega",
            Command::Constant(_) => "constant",
            Command::Dataprog(_) => "dataprog",
            Command::Adversary(_) => "adversary",
            Command::Gamma(_) => "gamma",
            Command::BadPoint(_) => "bad-point",
        }
    }
}

fn build_config(g: &GlobalOpts) -> Result<RunConfig, String> {
    let mut c = RunConfig::default();
    if let Some(p) = &g.config {
        c.load_file(p)?;
    }
    if let Ok(dir) = std::env::var(CACHE_ENV) {
        if !dir.is_empty() {
            c.cache_dir = Some(PathBuf::from(dir));
        }
    }
    if let Some(v) = g.seed {
        c.seed = v;
    }
    if let Some(v) = g.bits {
        c.bits = v;
    }
    if let Some(v) = g.format {
        c.format = Some(v);
    }
    if let Some(v) = &g.cache_dir {
        c.cache_dir = Some(v.clone());
    }
    if let Some(v) = g.horizon {
        c.horizon = v;
    }
    if let Some(v) = g.k0 {
        c.k0 = Some(v);
    }
    if let Some(v) = g.n_max {
        c.n_max = v;
    }
    c.validate()?;
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match commands::run(cli.command.name(), &cli.command, &cfg) {
        Ok(out) => {
            print!("{}", out.text);
            if cli.global.strict && out.undetermined {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
