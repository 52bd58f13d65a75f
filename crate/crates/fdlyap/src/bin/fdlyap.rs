use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fdlyap::cli::{self, Overrides};

#[derive(Parser)]
#[command(
    name = "fdlyap",
    about = "Sampled-data model-free quantum state stabilization experiments",
    version
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a shipped experiment preset
    RunPreset {
        /// Preset name (see list-presets)
        name: String,
        /// Override the run seed
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: $FDLYAP_OUT or ./fdlyap-out)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the number of sampling steps
        #[arg(long)]
        steps: Option<usize>,
        /// Switch the observable to finite-shot readout with this many shots
        #[arg(long)]
        shots: Option<u64>,
        /// Switch the observable to bounded noise with this bound
        #[arg(long)]
        eta_max: Option<f64>,
    },
    /// Run a JSON experiment config
    RunConfig {
        /// Path to the config file
        path: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        eta_max: Option<f64>,
    },
    /// Run the acceptance suite and write verify-report.json
    Verify {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the shipped presets
    ListPresets,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.command {
        Command::RunPreset {
            name,
            seed,
            out,
            steps,
            shots,
            eta_max,
        } => {
            let out_dir = cli::default_out_dir(out);
            cli::run_preset(
                &name,
                Overrides {
                    seed,
                    steps,
                    shots,
                    eta_max,
                },
                &out_dir,
            )
            .map(|()| {
                println!("wrote outputs to {}", out_dir.display());
                ExitCode::SUCCESS
            })
        }
        Command::RunConfig {
            path,
            seed,
            out,
            steps,
            shots,
            eta_max,
        } => {
            let out_dir = cli::default_out_dir(out);
            cli::run_config_file(
                &path,
                Overrides {
                    seed,
                    steps,
                    shots,
                    eta_max,
                },
                &out_dir,
            )
            .map(|()| {
                println!("wrote outputs to {}", out_dir.display());
                ExitCode::SUCCESS
            })
        }
        Command::Verify { out } => {
            let out_dir = cli::default_out_dir(out);
            cli::verify(&out_dir).map(|passed| {
                if passed {
                    println!("all criteria passed");
                    ExitCode::SUCCESS
                } else {
                    eprintln!("one or more criteria failed");
                    ExitCode::FAILURE
                }
            })
        }
        Command::ListPresets => {
            for (name, summary) in cli::list_presets() {
                println!("{name:<18} {summary}");
            }
            Ok(ExitCode::SUCCESS)
        }
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
