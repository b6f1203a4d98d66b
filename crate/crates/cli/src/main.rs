//! `helmscat` command-line entry point.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use helmscat_cli::config::bundled_summary;
use helmscat_cli::{execute, load, CliError, ExperimentKind, BUNDLED};

#[derive(Parser)]
#[command(name = "helmscat", version, about = "2-D Helmholtz scattering workbench")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// List the bundled configs and exit.
    #[arg(long)]
    list_bundled: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct RunArgs {
    /// Config file, or the name of a bundled config such as `table1`.
    #[arg(long)]
    config: String,

    /// Output directory; defaults to `out/<config name>`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Multipole least-squares solve for bounded obstacles.
    DirectMrc(RunArgs),
    /// Boundary-integral far fields for smooth obstacles.
    DirectBiem(RunArgs),
    /// Multipole least-squares solve for periodic gratings.
    GratingMrc(RunArgs),
    /// Support function method.
    InverseSfm(RunArgs),
    /// Linear sampling method.
    InverseLsm(RunArgs),
    /// Far-field fit versus boundary values.
    IllposedDemo(RunArgs),
    /// Write a far-field file for a known obstacle.
    SynthesizeFarField(RunArgs),
}

impl Command {
    fn split(&self) -> (ExperimentKind, &RunArgs) {
        match self {
            Command::DirectMrc(a) => (ExperimentKind::DirectMrc, a),
            Command::DirectBiem(a) => (ExperimentKind::DirectBiem, a),
            Command::GratingMrc(a) => (ExperimentKind::GratingMrc, a),
            Command::InverseSfm(a) => (ExperimentKind::InverseSfm, a),
            Command::InverseLsm(a) => (ExperimentKind::InverseLsm, a),
            Command::IllposedDemo(a) => (ExperimentKind::IllposedDemo, a),
            Command::SynthesizeFarField(a) => (ExperimentKind::SynthesizeFarField, a),
        }
    }
}

fn run(command: &Command) -> Result<(), CliError> {
    let (kind, args) = command.split();
    let loaded = load(&args.config)?;
    if loaded.config.kind() != kind {
        return Err(CliError::KindMismatch {
            expected: kind.name().to_string(),
            found: loaded.config.kind().name().to_string(),
        });
    }
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(loaded.config.name()));
    let manifest = execute(&loaded, &out)?;
    println!("{} ({}) -> {}", manifest.name, manifest.kind, out.display());
    for file in &manifest.outputs {
        println!("  {file}");
    }
    for (key, value) in &manifest.residuals {
        println!("  {key}: {value}");
    }
    println!("  wall time {:.2}s", manifest.wall_time_seconds);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_bundled {
        for (name, text) in BUNDLED {
            let kind = load(name).map(|l| l.config.kind().name()).unwrap_or("invalid");
            println!("{name:<8} {kind:<22} {}", bundled_summary(text));
        }
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        return ExitCode::SUCCESS;
    };
    match run(&command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
