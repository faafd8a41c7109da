//! `nonrev`: JSON reports on Markov jump processes from the command line.

mod commands;
mod error;
mod json;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "nonrev", version, about = "Force-flux analysis of Markov jump processes")]
struct Cli {
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,

    /// Tolerance used for the pass flags in reports (each command has its own default).
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct RhoArg {
    /// Density: a JSON file with a probability vector, `stationary` or `uniform`.
    #[arg(long, default_value = "stationary")]
    pub rho: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check rates, irreducibility and edge support symmetry.
    Validate { chain: PathBuf },

    /// Stationary distribution and its residual.
    Stationary { chain: PathBuf },

    /// Mobility, force, flux, dissipation potentials and entropy production.
    Forces {
        chain: PathBuf,
        #[command(flatten)]
        rho: RhoArg,
    },

    /// Split the entropy production along one iso-dissipation force.
    EntropySplit {
        chain: PathBuf,
        #[command(flatten)]
        rho: RhoArg,
        /// `dual`, `force`, `negated`, `flip:i,j,...` or `two-edge:first,second,delta`.
        #[arg(long, default_value = "dual")]
        iso: String,
    },

    /// Time-reversed chain, its force, and the reference-measure representation.
    Adjoint {
        chain: PathBuf,
        #[command(flatten)]
        rho: RhoArg,
        /// Reference measure for the representation check (same forms as --rho).
        #[arg(long, default_value = "uniform")]
        mu: String,
    },

    /// Members of the dissipation level set of the force.
    IsoFamily {
        chain: PathBuf,
        #[command(flatten)]
        rho: RhoArg,
        /// Repeatable; defaults to `force`, `negated` and `dual`.
        #[arg(long)]
        iso: Vec<String>,
    },

    /// State and edge Hamiltonians at a potential, and the minimum over potentials.
    Hamiltonian {
        chain: PathBuf,
        #[command(flatten)]
        rho: RhoArg,
        /// State potential as a JSON array; defaults to zero.
        #[arg(long)]
        xi: Option<PathBuf>,
        /// Edge flux file; adds the edge Lagrangian at this flux.
        #[arg(long)]
        flux: Option<PathBuf>,
    },

    /// Donsker–Varadhan functional by two independent routes.
    DvRate {
        chain: PathBuf,
        #[command(flatten)]
        rho: RhoArg,
    },

    /// Split the edge Lagrangian along a partition of the edges.
    Decompose {
        chain: PathBuf,
        #[command(flatten)]
        rho: RhoArg,
        /// Edge flux file; defaults to zero flux.
        #[arg(long)]
        flux: Option<PathBuf>,
        /// Edge positions of the first part, comma separated; defaults to the first half.
        #[arg(long, value_delimiter = ',')]
        part: Vec<usize>,
    },

    /// Periodic drift-diffusion grid: force split, dual drift and the three
    /// zero-flux Lagrangian routes.
    FpDemo {
        /// Grid model JSON; without it a constant-coefficient ring is used.
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        cells: usize,
        #[arg(long, default_value_t = 1.0)]
        drift: f64,
        #[arg(long, default_value_t = 1.0)]
        diffusion: f64,
        /// `bump` (a smooth asymmetric profile), `uniform`, `stationary` or a file.
        #[arg(long, default_value = "bump")]
        rho: String,
    },

    /// Exact stochastic simulation with empirical estimates.
    Simulate {
        chain: PathBuf,
        #[arg(long, default_value_t = 1000.0)]
        time: f64,
        #[arg(long, default_value_t = 0)]
        x0: usize,
        /// Overridden by the NONREV_SEED environment variable.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent replicas, run in parallel with seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        replicas: usize,
        /// Write the first replica's path as `{"times": [...], "states": [...]}`.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<serde_json::Value, CliError> {
    use commands as c;
    let tol = cli.tol;
    if let Some(t) = tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
    }
    match cli.command {
        Command::Validate { chain } => c::validate(&chain),
        Command::Stationary { chain } => c::stationary(&chain, tol),
        Command::Forces { chain, rho } => c::forces(&chain, &rho.rho, tol),
        Command::EntropySplit { chain, rho, iso } => c::entropy_split(&chain, &rho.rho, &iso, tol),
        Command::Adjoint { chain, rho, mu } => c::adjoint(&chain, &rho.rho, &mu, tol),
        Command::IsoFamily { chain, rho, iso } => c::iso_family(&chain, &rho.rho, &iso, tol),
        Command::Hamiltonian { chain, rho, xi, flux } => {
            c::hamiltonian(&chain, &rho.rho, xi.as_deref(), flux.as_deref(), tol)
        }
        Command::DvRate { chain, rho } => c::dv_rate(&chain, &rho.rho, tol),
        Command::Decompose { chain, rho, flux, part } => {
            c::decompose(&chain, &rho.rho, flux.as_deref(), &part, tol)
        }
        Command::FpDemo {
            model,
            cells,
            drift,
            diffusion,
            rho,
        } => c::fp_demo(model.as_deref(), cells, drift, diffusion, &rho, tol),
        Command::Simulate {
            chain,
            time,
            x0,
            seed,
            replicas,
            trajectory,
        } => {
            let seed = match std::env::var("NONREV_SEED") {
                Ok(s) => s
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("NONREV_SEED is not an integer: {s:?}")))?,
                Err(_) => seed,
            };
            c::simulate(&chain, time, x0, seed, replicas, trajectory.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or_default();
            let err = CliError::Usage(first.trim_start_matches("error: ").to_string());
            println!("{}", json::render(&err.to_json(), false));
            return ExitCode::from(2);
        }
    };
    let pretty = cli.pretty;
    match dispatch(cli) {
        Ok(report) => {
            println!("{}", json::render(&report, pretty));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("nonrev: {e}");
            println!("{}", json::render(&e.to_json(), pretty));
            ExitCode::from(e.exit_code())
        }
    }
}
