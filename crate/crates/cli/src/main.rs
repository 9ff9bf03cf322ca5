use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use leakywire::runner::{cmd_check, cmd_spectrum, cmd_sweep, cmd_trial, cmd_validate, RunConfig};

#[derive(Parser)]
#[command(name = "leakywire", version, about = "Bound states of leaky quantum wires")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML run configuration.
    config: PathBuf,
    /// Override a config key, e.g. `--set numerics.nodes=2048`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the chord-arc and asymptotic straightness assumptions.
    Check(Common),
    /// Find the bound states and write states.json.
    Spectrum(Common),
    /// Tabulate the leading Birman-Schwinger eigenvalues over a kappa grid.
    Sweep(Common),
    /// Gaussian trial-function scan of the form gap.
    Trial(Common),
    /// Cross-check against finite-width ditch potentials.
    Validate(Common),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (run, common): (fn(&RunConfig) -> _, &Common) = match &cli.command {
        Command::Check(c) => (cmd_check, c),
        Command::Spectrum(c) => (cmd_spectrum, c),
        Command::Sweep(c) => (cmd_sweep, c),
        Command::Trial(c) => (cmd_trial, c),
        Command::Validate(c) => (cmd_validate, c),
    };
    let result = RunConfig::load(&common.config, &common.overrides).and_then(|mut cfg| {
        if let Some(o) = &common.output {
            cfg.output_dir = o.clone();
        }
        run(&cfg)
    });
    match result {
        Ok(out) => {
            println!("{}", out.summary);
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
