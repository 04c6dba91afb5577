//! `ramify` — ramification invariants of totally ramified (ℤ/pℤ)² extensions
//! of p-adic fields.
//!
//! Three subcommands:
//!
//! * `verify` — enumerate rank-2 Kummer subgroups with a given ramification
//!   break b, compute the index of inseparability i₁ and the refined break b₊
//!   of each associated extension by the class-field-theoretic pipeline
//!   (optionally cross-checked against the brute-force Kummer-tower oracle),
//!   check the identity b₊ = i₁ − p²b + pb + b, and stream one JSON object
//!   per extension;
//! * `invariants` — the same computation for a single extension given the
//!   digit strings of its Kummer generators;
//! * `pairing` — evaluate the Kummer pairing ⟨α, β⟩ ∈ μ_p of two principal
//!   units via the explicit residue formula.
//!
//! Exit codes: 0 = success, 1 = a checked identity was violated,
//! 2 = unusable configuration, 3 = insufficient working precision.
//! Identical configuration (including the seed) produces byte-identical
//! output; exhaustive enumeration ignores the seed.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ramify::parse::parse_field_spec;
use ramify::{Error, Field, Result};

mod single;
mod verify;

/// Exit code when at least one cross-checked identity fails.
const EXIT_VIOLATION: u8 = 1;
/// Exit code for unusable configuration (flags, field file, digit strings).
const EXIT_CONFIG: u8 = 2;
/// Exit code when a computation runs out of tracked p-adic digits.
const EXIT_PRECISION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "ramify",
    version,
    about = "Ramification invariants of totally ramified (ℤ/pℤ)² extensions of p-adic fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate extensions with a given break and verify b₊ = i₁ − p²b + pb + b
    Verify(VerifyArgs),
    /// Compute the invariants of one extension from its Kummer generator digits
    Invariants(InvariantsArgs),
    /// Evaluate the Kummer pairing ⟨α, β⟩ of two principal units
    Pairing(PairingArgs),
}

#[derive(Args)]
struct FieldArgs {
    /// Path to a field description file
    #[arg(long, value_name = "PATH")]
    field: PathBuf,

    /// Override the tracked p-adic precision from the field file
    #[arg(long, value_name = "N")]
    precision: Option<i64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report to a file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Emit JSON-lines (one object per line; the default)
    #[arg(long, conflicts_with = "pretty")]
    json: bool,

    /// Emit a human-readable rendering instead of JSON
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    field: FieldArgs,

    /// Ramification break to examine: an integer, or `all` valid breaks
    #[arg(long = "break", value_name = "n|all")]
    break_level: String,

    /// Enumerate every rank-2 Kummer subgroup with the given break (default)
    #[arg(long, conflicts_with = "samples")]
    exhaustive: bool,

    /// Sample this many extensions per break instead of enumerating
    #[arg(long, value_name = "N")]
    samples: Option<usize>,

    /// RNG seed for sampling (ignored in exhaustive mode)
    #[arg(long, value_name = "S", default_value_t = 0)]
    seed: u64,

    /// Cross-check every extension against the Kummer-tower oracle
    #[arg(long)]
    oracle: bool,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct InvariantsArgs {
    #[command(flatten)]
    field: FieldArgs,

    /// Digit string of ρ₁ (the first Kummer generator is 1 + ρ₁)
    #[arg(value_name = "RHO1")]
    rho1: String,

    /// Digit string of ρ₂ (the second Kummer generator is 1 + ρ₂)
    #[arg(value_name = "RHO2")]
    rho2: String,

    /// Cross-check against the Kummer-tower oracle
    #[arg(long)]
    oracle: bool,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PairingArgs {
    #[command(flatten)]
    field: FieldArgs,

    /// Digit string of the principal unit α
    #[arg(value_name = "ALPHA")]
    alpha: String,

    /// Digit string of the principal unit β
    #[arg(value_name = "BETA")]
    beta: String,

    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify(args) => verify::run(args),
        Command::Invariants(args) => single::run_invariants(args),
        Command::Pairing(args) => single::run_pairing(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ramify: {e}");
            match e {
                Error::Config(_) => ExitCode::from(EXIT_CONFIG),
                Error::Precision(_) => ExitCode::from(EXIT_PRECISION),
            }
        }
    }
}

/// Reads and parses the field file, applying the `--precision` override.
fn load_field(args: &FieldArgs) -> Result<Field> {
    let text = fs::read_to_string(&args.field).map_err(|e| {
        Error::config(format!("cannot read field file {}: {e}", args.field.display()))
    })?;
    let mut spec = parse_field_spec(&text)?;
    if let Some(n) = args.precision {
        spec.precision = Some(n);
    }
    Field::new(&spec)
}

/// Opens the output sink: stdout by default, a file with `--out`.
fn open_sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(std::io::BufWriter::new(std::io::stdout()))),
        Some(p) => {
            let f = fs::File::create(p).map_err(|e| {
                Error::config(format!("cannot create output file {}: {e}", p.display()))
            })?;
            Ok(Box::new(std::io::BufWriter::new(f)))
        }
    }
}

/// Writes one line, mapping I/O failures to configuration errors.
fn emit(w: &mut dyn Write, line: &str) -> Result<()> {
    writeln!(w, "{line}").map_err(|e| Error::config(format!("cannot write output: {e}")))
}
