//! Command line front end for the weak product laboratory.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure in some cell,
//! 3 bracket inversion (an internal bug in the norm estimators).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use weakprod::harness::{execute, render, CellFailure, Command, ExperimentConfig, OutputFormat};
use weakprod::io::{space_from_file, write_text};
use weakprod::parse::parse_poly;
use weakprod::space::SpaceSpec;
use weakprod::{Error, Result};

#[derive(Parser)]
#[command(
    name = "weakprod",
    version,
    about = "Numerical experiments on multipliers of weak products of CNP spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Column/row norms of the binomial multiplier family and the transpose
    /// gap certificate on the two-variable Drury-Arveson space
    Gap(CommonArgs),
    /// Seeded checks of the Hankel intertwining identity and kernel rank-one
    /// structure
    HankelCheck(CommonArgs),
    /// Weak product norm bracket for a polynomial
    Wp(CommonArgs),
    /// Coefficient positivity test for the complete Nevanlinna-Pick property
    Cnp(CommonArgs),
    /// Truncated multiplier norm scan over the truncation degree
    MultNorm(CommonArgs),
    /// Export a multiplication operator matrix as JSON
    DumpMatrix(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// hardy | da<d> | dirichlet | custom:<file.json>
    #[arg(long, default_value = "hardy")]
    space: String,
    /// Family parameter or trial grid: "A..B", a comma list, or one value
    #[arg(long)]
    n: Option<String>,
    /// Truncation degree grid N
    #[arg(long)]
    trunc: Option<String>,
    /// Degree cap grid D
    #[arg(long)]
    deg: Option<String>,
    /// Rank cap grid r
    #[arg(long)]
    rank: Option<String>,
    /// Polynomial literal, e.g. "(1+z)^2" or "z1 z2 - 0.5i"
    #[arg(long)]
    h: Option<String>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 0x5EED)]
    seed: u64,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv | json
    #[arg(long, default_value = "json")]
    format: String,
}

fn parse_space(text: &str) -> Result<SpaceSpec> {
    match text {
        "hardy" => Ok(SpaceSpec::hardy()),
        "dirichlet" => Ok(SpaceSpec::dirichlet()),
        _ => {
            if let Some(d) = text.strip_prefix("da") {
                let d: usize = d.parse().map_err(|_| {
                    Error::InvalidArgument(format!("bad space '{text}': expected da<d>"))
                })?;
                SpaceSpec::drury_arveson(d)
            } else if let Some(path) = text.strip_prefix("custom:") {
                space_from_file(std::path::Path::new(path))
            } else {
                Err(Error::InvalidArgument(format!(
                    "unknown space '{text}' (hardy | da<d> | dirichlet | custom:<file>)"
                )))
            }
        }
    }
}

/// "A..B" (inclusive), "a,b,c", or a single value.
fn parse_grid<T: TryFrom<u64>>(text: &str) -> Result<Vec<T>> {
    let bad = || Error::InvalidArgument(format!("bad grid '{text}'"));
    let values: Vec<u64> = if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        (a..=b).collect()
    } else {
        text.split(',')
            .map(|v| v.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    values
        .into_iter()
        .map(|v| T::try_from(v).map_err(|_| bad()))
        .collect()
}

fn build_config(command: Command, args: &CommonArgs) -> Result<ExperimentConfig> {
    let space = parse_space(&args.space)?;
    let mut config = ExperimentConfig::new(command, space);
    if let Some(n) = &args.n {
        config.ns = parse_grid(n)?;
    }
    if let Some(t) = &args.trunc {
        config.truncs = parse_grid(t)?;
    }
    if let Some(d) = &args.deg {
        config.degs = parse_grid(d)?;
    }
    if let Some(r) = &args.rank {
        config.ranks = parse_grid(r)?;
    }
    if let Some(h) = &args.h {
        config.h = Some(parse_poly(h, config.space.dim())?);
    }
    config.tol = args.tol;
    config.seed = args.seed;
    config.format = match args.format.as_str() {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown format '{other}' (csv | json)"
            )))
        }
    };
    config.out = args.out.clone();
    config.validate()?;
    Ok(config)
}

fn run() -> Result<u8> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own exit code convention differs; the contract here is
            // 1 for every usage error
            let _ = e.print();
            return Ok(1);
        }
    };
    let (command, args) = match &cli.command {
        Cmd::Gap(a) => (Command::Gap, a),
        Cmd::HankelCheck(a) => (Command::HankelCheck, a),
        Cmd::Wp(a) => (Command::Wp, a),
        Cmd::Cnp(a) => (Command::Cnp, a),
        Cmd::MultNorm(a) => (Command::MultNorm, a),
        Cmd::DumpMatrix(a) => (Command::DumpMatrix, a),
    };
    let config = match build_config(command, args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(1);
        }
    };
    let report = execute(&config);
    let text = render(&report, config.format)?;
    match &config.out {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    if report
        .cells
        .iter()
        .any(|c| c.failure == Some(CellFailure::BracketInversion))
    {
        eprintln!("error: bracket inversion detected; see report");
        return Ok(3);
    }
    if report.cells.iter().any(|c| c.failure.is_some()) {
        eprintln!("warning: some cells failed; see report");
        return Ok(2);
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BracketInversion { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
