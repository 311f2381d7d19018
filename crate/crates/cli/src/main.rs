#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
mod spec;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lownoise::capacity::{capacity_interval_with, CapacityReport, CoherentInfoOptions};
use lownoise::sdp::SdpOptions;

use crate::error::CliError;
use crate::sweep::{Family, Method, SweepConfig};

#[derive(Parser)]
#[command(name = "lownoise", version, about = "Capacity bounds for low-noise quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Grid {
    #[arg(long, default_value_t = 0.0)]
    pmin: f64,
    #[arg(long, default_value_t = 0.1)]
    pmax: f64,
    #[arg(long, default_value_t = 21)]
    steps: usize,
}

#[derive(clap::Args)]
struct Solver {
    /// Bound on the SDP duality gap |primal − dual|.
    #[arg(long, default_value_t = 1e-8)]
    gap_tol: f64,
    /// Primal/dual residual tolerance of the SDP solver.
    #[arg(long, default_value_t = 1e-8)]
    feas_tol: f64,
}

impl Solver {
    fn options(&self) -> Result<SdpOptions, CliError> {
        if !(self.gap_tol > 0.0 && self.feas_tol > 0.0) {
            return Err(CliError::Usage("solver tolerances must be positive".into()));
        }
        Ok(SdpOptions { gap_tol: self.gap_tol, feas_tol: self.feas_tol, ..SdpOptions::default() })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Row,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate degradability parameters over a range of noise levels.
    Sweep {
        #[arg(long, value_enum)]
        family: Family,
        #[command(flatten)]
        grid: Grid,
        /// Columns to compute: sdp (d), tuned (s), analytic (bound).
        #[arg(long, value_enum, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
        /// Output file (standard output if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        solver: Solver,
        /// Linear coefficients c₁,c₂,c₃ of the pauli-poly weights.
        #[arg(long, value_delimiter = ',', default_values_t = [1.0 / 3.0; 3])]
        linear: Vec<f64>,
        /// Quadratic coefficients d₁,d₂,d₃ of the pauli-poly weights.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0; 3], allow_hyphen_values = true)]
        quadratic: Vec<f64>,
        /// Qudit dimension of the generalized-pauli family.
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
    /// Tabulate g(c p^r) = −c p^r log(c p^r) and its p-derivative.
    Curves {
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Exponents, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<f64>,
        #[arg(long, default_value_t = 1e-5)]
        pmin: f64,
        #[arg(long, default_value_t = 0.1)]
        pmax: f64,
        #[arg(long, default_value_t = 150)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print coherent information and capacity intervals for a channel-spec file.
    Report {
        spec: PathBuf,
        /// Degradability parameter of a constructed degrading map, used instead of the SDP value.
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        solver: Solver,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report(spec_path: &Path, eta: Option<f64>, format: Format, sdp: &SdpOptions) -> Result<String, CliError> {
    let path = spec_path.display().to_string();
    let text = std::fs::read_to_string(spec_path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let spec = spec::parse(&text).map_err(|source| CliError::Spec { path, source })?;
    if let Some(eta) = eta {
        if !(0.0..=2.0).contains(&eta) {
            return Err(CliError::Usage(format!("--eta must lie in [0, 2], got {eta}")));
        }
    }
    let n = &spec.channel;
    let r = capacity_interval_with(n, eta, sdp, &CoherentInfoOptions::default())
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    Ok(match format {
        Format::Text => format!(
            "channel               {} ({} -> {}, {} Kraus operators)\n{r}\n",
            spec.kind,
            n.dim_in(),
            n.dim_out(),
            n.num_kraus()
        ),
        Format::Row => format!("{}\n{}\n", CapacityReport::ROW_HEADER, r.row()),
    })
}

fn triple(flag: &str, values: &[f64]) -> Result<[f64; 3], CliError> {
    <[f64; 3]>::try_from(values)
        .map_err(|_| CliError::Usage(format!("{flag} takes 3 comma-separated values, got {}", values.len())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep { family, grid, methods, out, solver, linear, quadratic, dim } => {
            let cfg = SweepConfig {
                family,
                p_min: grid.pmin,
                p_max: grid.pmax,
                steps: grid.steps,
                methods: methods.unwrap_or_else(|| sweep::default_methods(family)),
                linear: triple("--linear", &linear)?,
                quadratic: triple("--quadratic", &quadratic)?,
                dim,
                sdp: solver.options()?,
            };
            let table = sweep::sweep(&cfg)?;
            emit(out.as_deref(), &table.text)?;
            if table.numerical_failures > 0 {
                return Err(CliError::Numerical(format!(
                    "{} table cells could not be computed",
                    table.numerical_failures
                )));
            }
            Ok(())
        }
        Command::Curves { c, r, pmin, pmax, steps, out } => emit(out.as_deref(), &sweep::curves(c, &r, pmin, pmax, steps)?),
        Command::Report { spec, eta, format, out, solver } => {
            emit(out.as_deref(), &report(&spec, eta, format, &solver.options()?)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
