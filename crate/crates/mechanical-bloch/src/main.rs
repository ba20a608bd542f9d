use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mechanical_bloch::app::{exit_code, run_command, CommandKind, OutputFormat};
use mechanical_bloch::config::RunConfig;
use mechanical_bloch::error::{Error, Result};
use mechanical_bloch::protocol::Model;

#[derive(Parser)]
#[command(
    name = "mechanical-bloch",
    about = "Coupled-oscillator analogue of a driven two-level system",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenfrequency sweep over the spring detuning (anticrossing curve)
    Spectrum(CommonArgs),
    /// Raw Newtonian trajectory of both oscillators
    Simulate(CommonArgs),
    /// Continuous-drive Rabi oscillation run
    Rabi(CommonArgs),
    /// Ramsey fringe scan over the wait time
    Ramsey(CommonArgs),
    /// Hahn-echo scan over the total wait time
    Hahn(CommonArgs),
    /// Cross-layer discrepancy report (Newton vs Bloch) over drive ratios
    Compare(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Model layer evaluating the protocol
    #[arg(long, value_enum, default_value_t = ModelArg::Bloch)]
    model: ModelArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Bloch,
    Rwa,
    Newton,
}

impl Command {
    fn split(&self) -> (CommandKind, &CommonArgs) {
        match self {
            Command::Spectrum(a) => (CommandKind::Spectrum, a),
            Command::Simulate(a) => (CommandKind::Simulate, a),
            Command::Rabi(a) => (CommandKind::Rabi, a),
            Command::Ramsey(a) => (CommandKind::Ramsey, a),
            Command::Hahn(a) => (CommandKind::Hahn, a),
            Command::Compare(a) => (CommandKind::Compare, a),
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let (kind, args) = cli.command.split();
    let text = std::fs::read_to_string(&args.config)?;
    let cfg = RunConfig::from_json(&text)?;
    let format = match args.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    let model = match args.model {
        ModelArg::Bloch => Model::BlochExact,
        ModelArg::Rwa => Model::EnvelopeRwa,
        ModelArg::Newton => Model::NewtonFull,
    };
    let rendered = run_command(kind, &cfg, format, model)?;
    match &args.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            file.write_all(rendered.as_bytes())?;
        }
        None => {
            std::io::stdout()
                .write_all(rendered.as_bytes())
                .map_err(Error::Io)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
