use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use metasim_cli::{
    bundled, check, load_source, output_dir, parse_scenario, run_scenario, CliError,
};

/// Metasurface transceiver simulator.
#[derive(Parser)]
#[command(name = "metasim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or bundled scenario and write its artifacts.
    Run {
        /// Path to a scenario JSON file, or the name of a bundled scenario.
        scenario: String,
        /// Replace the scenario's rng_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for CSVs and summary.json (default: out/<name>).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Set a field by dotted path, e.g. --override noise_variance=1e-3.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Check a scenario and list every violated rule.
    Validate {
        scenario: String,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Print the names of the bundled scenarios.
    ListScenarios,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            scenario,
            seed,
            out_dir,
            overrides,
        } => {
            let (origin, text) = load_source(&scenario)?;
            let mut s = parse_scenario(&origin, &text, &overrides)?;
            if let Some(seed) = seed {
                s.rng_seed = seed;
            }
            let dir = output_dir(&s, out_dir.as_deref());
            let (sim, files) = run_scenario(&s, &dir)?;
            if let Some(r) = sim.link() {
                println!(
                    "{}: EVM {:.4}%  BER {:.3e}  cond {:.3}",
                    s.name, r.evm_percent, r.ber, r.condition_number
                );
            }
            for seg in &sim.segments {
                if let Some(l) = &seg.line {
                    println!(
                        "{}: dominant line {:+.6} MHz (expected {:+.6} MHz), desired fraction {:.9}",
                        seg.tag,
                        l.dominant_line_hz / 1e6,
                        l.expected_line_hz / 1e6,
                        l.desired_fraction
                    );
                }
            }
            println!("wrote {} files to {}", files.len(), dir.display());
            Ok(())
        }
        Command::Validate {
            scenario,
            overrides,
        } => {
            let (origin, text) = load_source(&scenario)?;
            let s = parse_scenario(&origin, &text, &overrides)?;
            check(&s)?;
            println!("{origin}: ok");
            Ok(())
        }
        Command::ListScenarios => {
            for name in bundled::NAMES {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
