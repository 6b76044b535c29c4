mod commands;
mod config;
mod error;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{BetaCurveRequest, ConfigRequest, ShootRequest};
use config::SignEntry;
use error::CliError;

#[derive(Parser)]
#[command(name = "vortexlab", version, about = "Vortex solutions of the gauged O(3) sigma model: radial shooting, torus solves, stability and sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sign {
    Positive,
    Negative,
}

impl From<Sign> for SignEntry {
    fn from(s: Sign) -> Self {
        match s {
            Sign::Positive => SignEntry::Positive,
            Sign::Negative => SignEntry::Negative,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one radial profile, or find the topological one
    Shoot {
        #[arg(long)]
        tau: f64,
        /// u(0), or v(0) with a source
        #[arg(long, allow_hyphen_values = true, required_unless_present = "find_topological", conflicts_with = "find_topological")]
        s: Option<f64>,
        #[arg(long)]
        find_topological: bool,
        /// source strength (0 = no source)
        #[arg(long, default_value_t = 0.0)]
        nu: f64,
        #[arg(long, value_enum, default_value = "negative")]
        sign: Sign,
        #[arg(long)]
        rmax: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        samples_per_decade: Option<usize>,
        /// profile CSV (r,u,du_dr); printed after the summary when absent
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Flux beta(s) on an equispaced grid of heights
    BetaCurve {
        #[arg(long)]
        tau: f64,
        #[arg(long, allow_hyphen_values = true)]
        s_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        s_max: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rmax: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        /// exit 2 when any sample fails to integrate
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Solve on the torus and export the field
    Torus(ConfigArgs),
    /// Principal eigenvalue of the linearization (torus field or radial profile)
    Stability(ConfigArgs),
    /// Solve along a decreasing eps schedule and classify the trend
    Sweep(ConfigArgs),
    /// Run the identity battery on a stored or freshly solved field
    Verify(ConfigArgs),
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// key=value with a dotted key, value as JSON (repeatable)
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// stored field stem (stability, verify)
    #[arg(long)]
    field: Option<PathBuf>,
    /// field stem (torus) or CSV path (sweep)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

impl From<ConfigArgs> for ConfigRequest {
    fn from(a: ConfigArgs) -> Self {
        Self {
            config: a.config,
            overrides: a.overrides,
            field: a.field,
            out: a.out,
            json: a.json,
        }
    }
}

fn run(cmd: Command) -> commands::Outcome {
    match cmd {
        Command::Shoot {
            tau,
            s,
            find_topological,
            nu,
            sign,
            rmax,
            tol,
            samples_per_decade,
            out,
            json,
        } => commands::shoot(ShootRequest {
            tau,
            s,
            find_topological,
            nu,
            sign: sign.into(),
            r_max: rmax,
            tol,
            samples_per_decade,
            out,
            json,
        }),
        Command::BetaCurve {
            tau,
            s_min,
            s_max,
            n,
            rmax,
            tol,
            strict,
            out,
            json,
        } => commands::beta_curve(BetaCurveRequest {
            tau,
            s_min,
            s_max,
            n,
            r_max: rmax,
            tol,
            strict,
            out,
            json,
        }),
        Command::Torus(a) => commands::torus(a.into()),
        Command::Stability(a) => commands::stability(a.into()),
        Command::Sweep(a) => commands::sweep(a.into()),
        Command::Verify(a) => commands::verify(a.into()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok((text, code)) => {
            // a closed pipe (e.g. `| head`) is not a failure of the command
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CliError::exit_code(&e) as u8)
        }
    }
}
