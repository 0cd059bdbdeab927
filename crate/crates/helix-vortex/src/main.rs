use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use helix_vortex::harness::{self, Command, ExperimentSpec};

#[derive(Parser)]
#[command(
    name = "helix-vortex",
    version,
    about = "Vortex-blob experiments for helically symmetric Euler flows"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Cross-validate the two Green's function representations.
    GreensCheck(RunArgs),
    /// Check kernel log-asymptotics, upper bounds and antisymmetry.
    KernelCheck(RunArgs),
    /// Run a vortex-blob simulation with conservation checks.
    Simulate(RunArgs),
    /// Fit the rotation law over a range of filament widths.
    RotationSweep(RunArgs),
    /// Confinement of a straight filament pinned to the axis.
    StraightFilament(RunArgs),
    /// Confinement uniformly in the translation parameter sigma.
    SigmaSweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV artifacts and manifest.json.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Config override key=value; dotted paths reach nested fields.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Override for the command's primary tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for randomized sweeps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        CliCommand::GreensCheck(a) => (Command::GreensCheck, a),
        CliCommand::KernelCheck(a) => (Command::KernelCheck, a),
        CliCommand::Simulate(a) => (Command::Simulate, a),
        CliCommand::RotationSweep(a) => (Command::RotationSweep, a),
        CliCommand::StraightFilament(a) => (Command::StraightFilament, a),
        CliCommand::SigmaSweep(a) => (Command::SigmaSweep, a),
    };
    let spec = ExperimentSpec {
        command,
        config_path: args.config,
        out_dir: args.out,
        seed: args.seed,
        tol: args.tol,
        overrides: args.set,
    };
    match harness::run(&spec) {
        Ok(manifest) => {
            for check in &manifest.checks {
                println!("{check}");
            }
            println!(
                "{}: {} in {:.2} s -> {}",
                manifest.command,
                if manifest.passed { "pass" } else { "check failure" },
                manifest.duration_seconds,
                spec.out_dir.display()
            );
            if manifest.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
