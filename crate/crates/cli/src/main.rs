use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kmsurf_cli::report::{emit, render, Format};
use kmsurf_cli::{explore_frobenius, load_scenario, run_repro, run_scenario, CliError};

#[derive(Parser)]
#[command(
    name = "kmsurf",
    version,
    about = "Exact intersection-theory checks on blown-up rational surfaces"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the bundled characteristic-3 scenario.
    Repro,
    /// Run a scenario file.
    Run {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Build the (p, n) construction and report deg(-K_T).
    Explore {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        points: u64,
    },
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Repro => finish(&run_repro(), cli.format, out),
        Command::Run { scenario } => {
            let s = load_scenario(scenario)?;
            let report = run_scenario(&s).map_err(|source| CliError::Invalid {
                path: scenario.display().to_string(),
                source,
            })?;
            finish(&report, cli.format, out)
        }
        Command::Explore { p, points } => {
            let e = explore_frobenius(*p, *points)?;
            let text = match cli.format {
                Format::Text => e.to_text(),
                Format::Json => e.to_json(),
            };
            emit(&text, out)?;
            Ok(0)
        }
    }
}

fn finish(
    report: &kmsurf_cli::Report,
    format: Format,
    out: Option<&std::path::Path>,
) -> Result<i32, CliError> {
    emit(&render(report, format), out)?;
    if let Some(first) = report.first_failure() {
        eprintln!("check failed: {first}");
    }
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = execute(&cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
