use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use matpoly_cli::{format_report, run, Command, Flags, Format};
use matpoly_core::Tolerance;

#[derive(Parser)]
#[command(name = "matpoly", version, about = "Spectral data, solvents and right factors of matrix polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Residual tolerance; rank and cluster tolerances derive from it.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Relative singular value cutoff for rank and kernel decisions.
    #[arg(long, global = true)]
    rank_tol: Option<f64>,

    /// Radius within which eigenvalues are identified.
    #[arg(long, global = true)]
    cluster_radius: Option<f64>,

    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    format: OutputFormat,

    /// Selection cap for enumerations.
    #[arg(long, default_value_t = 1_000_000, global = true)]
    max_enum: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Regularity and Weierstrass data.
    Analyze { input: PathBuf },
    /// Maximal standard pair, optionally with eigenvalues moved to the Z side.
    Pair {
        input: PathBuf,
        /// Comma-separated eigenvalues such as `2,-1+0.5i`.
        #[arg(long, value_delimiter = ',')]
        invert: Vec<Complex64>,
    },
    /// Right solvents `S` with `Σ A_i S^i = 0`.
    Solvents { input: PathBuf },
    /// Cosolvents `S` with `Σ A_i S^{k-i} = 0`.
    Cosolvents { input: PathBuf },
    /// Separable bisolvents `(S1, S2, Π)`.
    Bisolvents { input: PathBuf },
    /// Right factors and left quotients from every bisolvent.
    Factor { input: PathBuf },
    /// Re-check a pair, solvent, bisolvent or factor stored in a companion file.
    Verify { input: PathBuf, companion: PathBuf },
    /// Polynomial from a pair file.
    Reconstruct { input: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut tol = cli.tol.map_or_else(Tolerance::default, Tolerance::from_residual);
    if let Some(r) = cli.rank_tol {
        tol.rank_tol = r;
    }
    if let Some(c) = cli.cluster_radius {
        tol.cluster_radius = c;
    }
    let mut flags = Flags {
        tol,
        format: match cli.format {
            OutputFormat::Json => Format::Json,
            OutputFormat::Text => Format::Text,
        },
        max_enum: cli.max_enum,
        ..Flags::default()
    };
    let (command, input) = match cli.command {
        Cmd::Analyze { input } => (Command::Analyze, input),
        Cmd::Pair { input, invert } => {
            flags.invert = invert;
            (Command::Pair, input)
        }
        Cmd::Solvents { input } => (Command::Solvents, input),
        Cmd::Cosolvents { input } => (Command::Cosolvents, input),
        Cmd::Bisolvents { input } => (Command::Bisolvents, input),
        Cmd::Factor { input } => (Command::Factor, input),
        Cmd::Verify { input, companion } => {
            flags.companion = Some(companion.display().to_string());
            (Command::Verify, input)
        }
        Cmd::Reconstruct { input } => (Command::Reconstruct, input),
    };
    match run(command, &input, &flags) {
        Ok(outcome) => {
            print!("{}", format_report(&outcome.report, flags.format));
            for w in &outcome.report.warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
