//! Command-line front end: spectral order, eigenvalue tables, inertia
//! indices, periodic-profile estimation, and renewal solving for weights
//! that are derivatives of self-similar functions.

mod commands;
mod config;
mod csv;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fractal_sl_core::pencil::{EigenOptions, Side};
use fractal_sl_core::selfsim::DEFAULT_ARITH_TOL;

use commands::{classify_error, EigsArgs, SProfileArgs, EXIT_CONFIG};

#[derive(Parser)]
#[command(
    name = "fractal-sl",
    about = "Sturm-Liouville spectra for self-similar indefinite weights",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct WeightArgs {
    /// Catalog weight, e.g. cantor, hat_P, tilde_P(0.2), P_a_delta(1/3,0),
    /// linear_1
    #[arg(long)]
    builtin: Option<String>,
    /// JSON weight config path
    #[arg(long)]
    config: Option<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Plus,
    Minus,
    Both,
}

impl SideArg {
    fn sides(self) -> Vec<Side> {
        match self {
            SideArg::Plus => vec![Side::Plus],
            SideArg::Minus => vec![Side::Minus],
            SideArg::Both => vec![Side::Plus, Side::Minus],
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print spectral order D, arithmetic step, lags, renewal mass, parity
    SpectralOrder {
        #[command(flatten)]
        weight: WeightArgs,
        /// Integrality tolerance for step detection, in (0, 1e-3]
        #[arg(long, default_value_t = DEFAULT_ARITH_TOL)]
        arith_tol: f64,
        /// Write CSV here instead of stdout
        #[arg(long)]
        out: Option<String>,
    },
    /// Localize eigenvalues by inertia bisection; emits spectrum CSV
    Eigs {
        #[command(flatten)]
        weight: WeightArgs,
        /// Coarse grid depth (estimates come from depth + 1)
        #[arg(long, default_value_t = 9)]
        depth: usize,
        /// How many eigenvalues per side
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
        count: u32,
        #[arg(long, value_enum, default_value_t = SideArg::Plus)]
        side: SideArg,
        /// Relative bracket width for bisection
        #[arg(long, default_value_t = 1e-6)]
        rel_tol: f64,
        /// Search guard on |lambda|
        #[arg(long, default_value_t = 1e8)]
        lambda_guard: f64,
        /// Preset: Cantor ladder, side +, count 20, depths 9/10, with the
        /// n / lambda^(log6 2) modulation column
        #[arg(long, default_value_t = false)]
        table1: bool,
        #[arg(long)]
        out: Option<String>,
    },
    /// Inertia index of the pencil form at one lambda
    Inertia {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = 9)]
        depth: usize,
    },
    /// Estimate the periodic amplitude profiles s+/s-; emits profile CSV
    SProfile {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, default_value_t = DEFAULT_ARITH_TOL)]
        arith_tol: f64,
        #[arg(long, default_value_t = 9)]
        depth: usize,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
        count: u32,
        /// Averaging width (in periods) for the sliding index average
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Fold-grid points per period
        #[arg(long, default_value_t = 40)]
        grid_q: usize,
        /// Re-ingest a spectrum CSV instead of computing eigenvalues
        #[arg(long)]
        spectrum: Option<String>,
        #[arg(long, default_value_t = 1e-6)]
        rel_tol: f64,
        #[arg(long, default_value_t = 1e8)]
        lambda_guard: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Solve a renewal system described by a JSON config
    Renewal {
        /// JSON with u, optional v, and forcing x / x1,x2 / x_file
        #[arg(long)]
        config: String,
        #[arg(long)]
        out: Option<String>,
    },
}

fn worker_threads() -> usize {
    std::env::var("FRACTAL_SL_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::SpectralOrder {
            weight,
            arith_tol,
            out,
        } => {
            let p = config::resolve_weight(weight.builtin.as_deref(), weight.config.as_deref())?;
            commands::cmd_spectral_order(&p, arith_tol, out.as_deref())
        }
        Command::Eigs {
            weight,
            depth,
            count,
            side,
            rel_tol,
            lambda_guard,
            table1,
            out,
        } => {
            let (p, depth, count, sides, modulation) = if table1 {
                let p = config::resolve_weight(Some("cantor"), None)?;
                (p, 9, 20, vec![Side::Plus], true)
            } else {
                let p =
                    config::resolve_weight(weight.builtin.as_deref(), weight.config.as_deref())?;
                (p, depth, count as usize, side.sides(), false)
            };
            let opts = EigenOptions {
                rel_tol,
                lambda_guard,
                threads: worker_threads(),
            };
            commands::cmd_eigs(
                &p,
                &EigsArgs {
                    depth,
                    count,
                    sides,
                    opts,
                    modulation,
                    out: out.as_deref(),
                },
            )
        }
        Command::Inertia {
            weight,
            lambda,
            depth,
        } => {
            let p = config::resolve_weight(weight.builtin.as_deref(), weight.config.as_deref())?;
            commands::cmd_inertia(&p, lambda, depth)
        }
        Command::SProfile {
            weight,
            arith_tol,
            depth,
            count,
            eps,
            grid_q,
            spectrum,
            rel_tol,
            lambda_guard,
            out,
        } => {
            let p = config::resolve_weight(weight.builtin.as_deref(), weight.config.as_deref())?;
            let opts = EigenOptions {
                rel_tol,
                lambda_guard,
                threads: worker_threads(),
            };
            commands::cmd_s_profile(
                &p,
                &SProfileArgs {
                    builtin_name: weight
                        .builtin
                        .as_deref()
                        .map(|s| s.split('(').next().unwrap_or(s)),
                    arith_tol,
                    depth,
                    count: count as usize,
                    eps,
                    grid_q,
                    spectrum: spectrum.as_deref(),
                    opts,
                    out: out.as_deref(),
                },
            )
        }
        Command::Renewal { config, out } => {
            let inputs = config::renewal_from_json(&config)?;
            commands::cmd_renewal(&inputs, out.as_deref())
        }
    }
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = classify_error(&err);
            std::process::ExitCode::from(if code == 0 { EXIT_CONFIG } else { code })
        }
    }
}
