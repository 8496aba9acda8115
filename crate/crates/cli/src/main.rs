use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hitchin::cone::{ConeKind, FlowKind};
use hitchin::parabolicity::Variant;

mod commands;
mod input;
mod output;

use commands::Report;
use input::{load, load_or_default, UsageError};

#[derive(Parser, Debug)]
#[command(name = "hitchin", version, about = "Stable forms, torsion, symbols, spectra and cone checks")]
struct Cli {
    /// Input document: a path, `-` for stdin, or inline JSON.
    #[arg(long, global = true)]
    input: Option<String>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Residual tolerance for verdicts.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SymbolFlow {
    NkLaplacian,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split a form into its SU(3) or G₂ type components.
    Decompose,
    /// Validate SU(3) data `{omega, rho}` or G₂ data `{phi}`.
    StructureCheck,
    /// Intrinsic torsion of a 1-jet, with scalar curvature.
    Torsion,
    /// Coercivity report of the principal symbol of the flow.
    Symbol {
        #[arg(long, value_enum, default_value = "nk-laplacian")]
        flow: SymbolFlow,
        /// DeTurck-modified flow.
        #[arg(long, conflicts_with = "modified")]
        deturck: bool,
        /// DeTurck flow with the extra τ₀ term.
        #[arg(long)]
        modified: bool,
    },
    /// The constants B and A from sampled Λ⁴₈ forms.
    Schur {
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Hitchin or Einstein index from spectral data.
    Index,
    /// Stability table for the homogeneous nearly Kähler S⁶.
    S6Report {
        #[arg(long, default_value_t = 12.0)]
        cutoff: f64,
    },
    /// Closure of the cone forms in exact arithmetic.
    ConeCheck {
        #[arg(long, value_parser = parse_cone)]
        cone: Option<ConeKind>,
    },
    /// Scaling flow trajectory.
    Flow {
        #[arg(value_parser = parse_flow)]
        kind: Option<FlowKind>,
        #[arg(long = "flow", value_parser = parse_flow, conflicts_with = "kind")]
        flow: Option<FlowKind>,
        /// Initial value, or one value per component, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2", allow_hyphen_values = true)]
        x0: Vec<f64>,
        #[arg(long, default_value_t = 5.0)]
        t: f64,
        #[arg(long, default_value_t = hitchin::cone::DEFAULT_DT)]
        dt: f64,
        /// Integrate backwards in time.
        #[arg(long)]
        reverse: bool,
    },
    /// Run the acceptance checks.
    Selftest {
        #[arg(long)]
        only: Option<usize>,
    },
}

fn parse_cone(s: &str) -> Result<ConeKind, String> {
    ConeKind::parse(s).map_err(|e| e.to_string())
}

fn parse_flow(s: &str) -> Result<FlowKind, String> {
    FlowKind::parse(s).map_err(|e| e.to_string())
}

const DEFAULT_SEED: u64 = 20240607;

fn run(cli: &Cli) -> anyhow::Result<(Report, Format)> {
    let inp = cli.input.as_deref();
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let tol = cli.tol.unwrap_or(1e-10);
    let mut default_format = Format::Json;
    let report = match &cli.command {
        Command::Decompose => commands::decompose(load(inp, "decompose")?, tol)?,
        Command::StructureCheck => commands::structure_check(load(inp, "structure-check")?, tol)?,
        Command::Torsion => commands::torsion(load(inp, "torsion")?)?,
        Command::Symbol { flow: SymbolFlow::NkLaplacian, deturck: _, modified } => {
            let variant = if *modified { Variant::Tau0Term } else { Variant::None };
            commands::symbol(load_or_default(inp)?, variant)?
        }
        Command::Schur { samples } => commands::schur(load_or_default(inp)?, *samples, seed)?,
        Command::Index => commands::index(load(inp, "index")?)?,
        Command::S6Report { cutoff } => commands::s6_report(*cutoff)?,
        Command::ConeCheck { cone } => commands::cone_check(load_or_default(inp)?, *cone)?,
        Command::Flow { kind, flow, x0, t, dt, reverse } => {
            default_format = Format::Csv;
            let kind = kind.or(*flow).unwrap_or(FlowKind::NkLaplacian);
            commands::flow(kind, x0, *t, *dt, *reverse)?
        }
        Command::Selftest { only } => commands::selftest(*only, seed)?,
    };
    Ok((report, cli.format.unwrap_or(default_format)))
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match e.downcast_ref::<hitchin::Error>() {
        Some(hitchin::Error::InvalidInput(_) | hitchin::Error::DimensionMismatch(_) | hitchin::Error::DegreeMismatch(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(report, format)| {
        let text = match format {
            Format::Json => output::to_json(&report.json),
            Format::Csv => report.table.to_csv()?,
        };
        output::emit(&text, cli.output.as_deref())?;
        Ok(report.ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
