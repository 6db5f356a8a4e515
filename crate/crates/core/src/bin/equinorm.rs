use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use equinorm::cli::{analyze, oracle_check, AnalyzeArgs};

#[derive(Parser)]
#[command(name = "equinorm", version, about = "Normal forms of equivariant polynomial vector fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify, normalize and optionally renormalize a system specification.
    Analyze {
        spec: PathBuf,
        /// Truncation order N (grade of the highest kept term).
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        renormalize: bool,
        #[arg(long)]
        flow_check: bool,
        /// Report path (default: SPEC with extension .report.json).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check structure constants and quaternion relations against the polynomial bracket.
    OracleCheck {
        #[arg(long)]
        group: Option<String>,
        /// Largest power of r^2 in the checked basis elements.
        #[arg(long, default_value_t = 4)]
        max_grade: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout();
    let code = match cli.command {
        Command::Analyze {
            spec,
            order,
            renormalize,
            flow_check,
            out,
        } => analyze(
            &AnalyzeArgs {
                spec,
                order,
                renormalize,
                flow_check,
                out,
            },
            &mut stdout,
        ),
        Command::OracleCheck { group, max_grade } => oracle_check(group.as_deref(), max_grade, &mut stdout),
    };
    ExitCode::from(code as u8)
}
