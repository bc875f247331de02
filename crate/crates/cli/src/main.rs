use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use tclfano_cli::{commands, Config};

/// Exact and TCL2/TCL4 dynamics of the Fano-Anderson model with a Lorentzian bath.
///
/// Units: hbar = k_B = 1. Frequencies, rates, couplings and temperature share
/// one arbitrary energy unit; times are in its inverse.
///
/// Parameters are read from --config (lines `key = value`, `#` comments),
/// then overridden by flags. The output directory is --out, else the `out`
/// config key, else $TCLFANO_OUT, else ./tclfano-out.
#[derive(Parser, Debug)]
#[command(name = "tclfano", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file with `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Bath coupling strength gamma0 [energy].
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma0: Option<String>,
    /// Lorentzian width lambda [energy].
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Detuning Delta between system frequency and spectral peak [energy].
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta: Option<String>,
    /// System frequency omega0 [energy].
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega0: Option<String>,
    /// Bath temperature T [energy].
    #[arg(long, global = true, allow_hyphen_values = true)]
    temperature: Option<String>,
    /// Infrared crossover frequency omega_m [energy].
    #[arg(long = "omega-m", global = true, allow_hyphen_values = true)]
    omega_m: Option<String>,
    /// Infrared exponent Omega of the low-frequency modification (dimensionless).
    #[arg(long = "big-omega", global = true, allow_hyphen_values = true)]
    big_omega: Option<String>,
    /// End of the time grid [1/energy]; the grid starts at 0.
    #[arg(long = "t-end", global = true)]
    t_end: Option<String>,
    /// Number of time steps.
    #[arg(long, global = true)]
    steps: Option<String>,
    /// Comma-separated orders: exact, tcl2, tcl4.
    #[arg(long, global = true)]
    orders: Option<String>,
    /// Worker threads; 1 gives bit-reproducible output.
    #[arg(long, global = true)]
    workers: Option<String>,
    /// Output directory for CSV files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Master-equation coefficients omega_r, gamma, gamma_plus, gamma_minus over time.
    Coeffs,
    /// Stationary coefficients swept over Delta or gamma0.
    Steady,
    /// Moment trajectories and phase-space traces of the coherent pair.
    Evolve,
    /// Bures distance between the evolving pair.
    Bures,
    /// Cumulative non-Markovianity N(t).
    Nonmarkov,
    /// N over a (Delta, gamma0/lambda) grid with the convergence boundary.
    Heatmap,
    /// Oracle suite; exits nonzero on any failed check.
    Validate,
}

impl Cli {
    fn overrides(&self) -> [(&'static str, &Option<String>); 12] {
        [
            ("gamma0", &self.gamma0),
            ("lambda", &self.lambda),
            ("delta", &self.delta),
            ("omega0", &self.omega0),
            ("temperature", &self.temperature),
            ("omega_m", &self.omega_m),
            ("big_omega", &self.big_omega),
            ("t_end", &self.t_end),
            ("steps", &self.steps),
            ("orders", &self.orders),
            ("workers", &self.workers),
            ("out", &self.out),
        ]
    }

    fn config(&self) -> Result<Config> {
        let mut cfg = match &self.config {
            Some(path) => {
                Config::from_file(path).with_context(|| format!("config {}", path.display()))?
            }
            None => Config::default(),
        };
        for (key, value) in self.overrides() {
            if let Some(v) = value {
                cfg.set(key, v)
                    .map_err(anyhow::Error::msg)
                    .context("command line")?;
            }
        }
        Ok(cfg)
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = cli.config()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    pool.install(|| {
        let mut log = std::io::stdout();
        let files = match cli.command {
            Command::Coeffs => commands::coeffs(&cfg, &mut log)?,
            Command::Steady => commands::steady(&cfg, &mut log)?,
            Command::Evolve => commands::evolve(&cfg, &mut log)?,
            Command::Bures => commands::bures(&cfg, &mut log)?,
            Command::Nonmarkov => commands::nonmarkov(&cfg, &mut log)?,
            Command::Heatmap => commands::heatmap_cmd(&cfg, &mut log)?,
            Command::Validate => return commands::validate(&cfg, &mut log),
        };
        for f in files {
            println!("wrote {}", f.display());
        }
        Ok(true)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
