mod commands;
mod output;
mod range;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lzbounded::{Error, IntegratorControl, SeriesControl, SolverKind, SolverOptions, Variant};

use crate::commands::Thresholds;
use crate::output::Format;
use crate::range::Values;

#[derive(Parser, Debug)]
#[command(name = "lzbounded", version, about = "Finite-time Landau-Zener sweeps with exact and reference solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Amplitudes and instantaneous infidelity on a uniform time grid.
    Evolve {
        #[command(flatten)]
        grid: GridArgs,
        /// Number of time samples per run, endpoints included.
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Final infidelity next to the Landau-Zener and perturbative estimates.
    Final {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Times at which the instantaneous infidelity vanishes.
    Zeros {
        #[command(flatten)]
        grid: GridArgs,
        /// Largest infidelity reported as a zero.
        #[arg(long)]
        zero_tol: Option<f64>,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare the exact propagators against the reference integrator.
    Validate {
        #[arg(long, value_delimiter = ',', default_value = "A,B,C")]
        path: Vec<Variant>,
        #[arg(long, default_value = "0.05,0.1,0.2,0.5,1.0")]
        x0: Values,
        #[arg(long, default_value = "0.1,0.5,1.0")]
        z0: Values,
        #[arg(long = "T", default_value = "1,5,25")]
        duration: Values,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        /// Largest accepted infidelity deviation between solvers.
        #[arg(long, default_value_t = 1e-8)]
        threshold: f64,
        #[command(flatten)]
        tol: ToleranceArgs,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Landau-Zener validity window and crossover time.
    Crossover {
        #[arg(long)]
        x0: Values,
        #[arg(long)]
        z0: Values,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Path variants, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    path: Vec<Variant>,
    /// Minimal distance from the crossing: value, list, `a:b:n` or `a:b:log:n`.
    #[arg(long)]
    x0: Values,
    /// Half sweep length, same syntax as `--x0`.
    #[arg(long)]
    z0: Values,
    /// Total driving time, same syntax as `--x0`.
    #[arg(long = "T")]
    duration: Values,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_parser = parse_solver, default_value = "auto")]
    solver: SolverKind,
    #[command(flatten)]
    tol: ToleranceArgs,
}

#[derive(Args, Debug)]
struct ToleranceArgs {
    /// Relative tolerance of the reference integrator.
    #[arg(long)]
    rtol: Option<f64>,
    /// Absolute tolerance of the reference integrator.
    #[arg(long)]
    atol: Option<f64>,
    /// Largest estimated relative error accepted from a special function.
    #[arg(long)]
    series_max_error: Option<f64>,
    /// |ξ| at which parabolic cylinder functions switch to the asymptotic form.
    #[arg(long)]
    regime_radius: Option<f64>,
}

#[derive(Args, Debug)]
struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidPath(_) | Error::InvalidParameter(_) | Error::TimeOutOfRange { .. } | Error::OutOfDomain(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numerical(format!("output: {e}"))
    }
}

impl ToleranceArgs {
    fn options(&self) -> Result<SolverOptions, Failure> {
        let mut integrator = IntegratorControl::default();
        if let Some(r) = self.rtol {
            integrator.rel_tol = r;
        }
        if let Some(a) = self.atol {
            integrator.abs_tol = a;
        }
        let mut series = SeriesControl::default();
        if let Some(m) = self.series_max_error {
            series.max_rel_error = m;
        }
        if let Some(r) = self.regime_radius {
            series.regime_radius = r;
        }
        for (name, v) in [
            ("--rtol", integrator.rel_tol),
            ("--atol", integrator.abs_tol),
            ("--series-max-error", series.max_rel_error),
            ("--regime-radius", series.regime_radius),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Failure::Usage(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(SolverOptions { series, integrator })
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Evolve { grid, samples, solve, out } => {
            if samples < 2 {
                return Err(Failure::Usage(format!("--samples must be at least 2, got {samples}")));
            }
            let opts = solve.tol.options()?;
            let specs = commands::cells(&grid.path, &grid.x0.0, &grid.z0.0, &grid.duration.0)?;
            let rows = commands::evolve(&specs, samples, solve.solver, &opts)?;
            output::write_rows(&rows, out.format, out.out.as_deref())?;
        }
        Command::Final { grid, solve, out } => {
            let opts = solve.tol.options()?;
            let specs = commands::cells(&grid.path, &grid.x0.0, &grid.z0.0, &grid.duration.0)?;
            let rows = commands::final_rows(&specs, solve.solver, &opts)?;
            output::write_rows(&rows, out.format, out.out.as_deref())?;
        }
        Command::Zeros { grid, zero_tol, solve, out } => {
            if let Some(t) = zero_tol {
                if !(t.is_finite() && t > 0.0) {
                    return Err(Failure::Usage(format!("--zero-tol must be positive, got {t}")));
                }
            }
            let opts = solve.tol.options()?;
            let specs = commands::cells(&grid.path, &grid.x0.0, &grid.z0.0, &grid.duration.0)?;
            let rows = commands::zeros(&specs, solve.solver, zero_tol, &opts)?;
            output::write_rows(&rows, out.format, out.out.as_deref())?;
        }
        Command::Validate { path, x0, z0, duration, samples, threshold, tol, out } => {
            if samples < 2 {
                return Err(Failure::Usage(format!("--samples must be at least 2, got {samples}")));
            }
            let opts = tol.options()?;
            let specs = commands::cells(&path, &x0.0, &z0.0, &duration.0)?;
            let thresholds = Thresholds { deviation: threshold, norm_drift: 1e-9, wronskian: 1e-8 };
            let report = commands::validate(&specs, samples, &opts, thresholds);
            output::write_json(&report, out.as_deref())?;
            if !report.pass {
                log::error!("validation failed");
            }
            return Ok(report.pass);
        }
        Command::Crossover { x0, z0, out } => {
            let rows = commands::crossover(&x0.0, &z0.0);
            output::write_rows(&rows, out.format, out.out.as_deref())?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
