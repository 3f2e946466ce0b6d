use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mic_utility::harness::commands::{self, seed_list};
use mic_utility::harness::{load_config, RunConfig};
use mic_utility::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "micutil",
    version,
    about = "Microphone utility estimation pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Render one scene to WAV files (dry.wav, mic_NN.wav) plus scene.json.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Room name from the configuration; the first room by default.
        #[arg(long)]
        room: Option<String>,
        #[arg(long, default_value = "scene")]
        out: PathBuf,
    },
    /// Node side: extract features from mic_NN.wav files into a .csff frame file.
    Extract {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "scene")]
        input: PathBuf,
        #[arg(long, default_value = "features.csff")]
        out: PathBuf,
    },
    /// Access-point side: estimate utilities from a .csff file.
    Estimate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "features.csff")]
        input: PathBuf,
        /// Directory with dry.wav and mic_NN.wav for ground-truth coherence.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, default_value = "utility.csv")]
        out: PathBuf,
    },
    /// Run the trial batch and write per-trial and summary CSVs.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value = "evaluation")]
        out: PathBuf,
    },
    /// Feature-importance sweep over all 18 features.
    Lasso {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value = "weights.csv")]
        out: PathBuf,
    },
    /// Fit T60 of simulated impulse responses for every configured room.
    RirCheck {
        #[command(flatten)]
        common: Common,
        /// Random source/microphone pairs per room.
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value = "rir_check.csv")]
        out: PathBuf,
    },
}

fn config(common: &Common) -> mic_utility::Result<RunConfig> {
    match &common.config {
        Some(path) => load_config(path),
        None => Ok(RunConfig::default()),
    }
}

fn run(cli: Cli) -> mic_utility::Result<Value> {
    match cli.command {
        Command::Simulate { common, room, out } => commands::simulate_cmd(
            &config(&common)?,
            common.seed.unwrap_or(0),
            room.as_deref(),
            &out,
        ),
        Command::Extract { common, input, out } => {
            commands::extract_cmd(&config(&common)?, &input, &out)
        }
        Command::Estimate {
            common,
            input,
            reference,
            out,
        } => commands::estimate_cmd(&config(&common)?, &input, reference.as_deref(), &out),
        Command::Evaluate {
            common,
            trials,
            out,
        } => {
            let cfg = config(&common)?;
            commands::evaluate_cmd(&cfg, &seed_list(&cfg, common.seed, trials), &out)
        }
        Command::Lasso {
            common,
            trials,
            out,
        } => {
            let cfg = config(&common)?;
            commands::lasso_cmd(&cfg, &seed_list(&cfg, common.seed, trials), &out)
        }
        Command::RirCheck {
            common,
            trials,
            out,
        } => commands::rir_check_cmd(&config(&common)?, common.seed.unwrap_or(0), trials, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(summary) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&summary).expect("summary serializes")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            let mut body = json!({"error": e.code(), "message": e.to_string()});
            if let Error::Schema { path, .. } = &e {
                body["path"] = json!(path);
            }
            eprintln!("{body}");
            ExitCode::FAILURE
        }
    }
}
