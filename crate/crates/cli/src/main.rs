mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{parse_split, Flags};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(streetlabel::Error),
}

impl From<streetlabel::Error> for CliError {
    fn from(e: streetlabel::Error) -> Self {
        CliError::Data(e)
    }
}

#[derive(Parser)]
#[command(name = "streetlabel", version, about = "Label placement for street-view images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn per-category importance priors from a training split
    LearnPriors {
        #[command(flatten)]
        flags: Flags,
        /// Category table JSON (defaults to the built-in street-scene table)
        #[arg(long)]
        categories: Option<PathBuf>,
    },
    /// Fit energy weights so greedy layouts match participant consensus
    LearnWeights {
        #[command(flatten)]
        flags: Flags,
        /// Maximum number of objective evaluations
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Place labels for every scene and render overlays
    Place {
        #[command(flatten)]
        flags: Flags,
    },
    /// Compute layout metrics, from saved layouts or by placing on the fly
    Evaluate {
        #[command(flatten)]
        flags: Flags,
        /// Directory of layout files written by `place`
        #[arg(long)]
        layouts: Option<PathBuf>,
    },
    /// Write saliency, edge and guidance maps for inspection
    ExportMaps {
        #[command(flatten)]
        flags: Flags,
    },
    /// Generate a synthetic street-scene dataset
    GenerateSynthetic {
        #[command(flatten)]
        flags: Flags,
        /// Number of scenes
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, value_parser = parse_split)]
        split: Option<streetlabel::dataset::Split>,
        /// Standard deviation of participant jitter in pixels
        #[arg(long)]
        noise: Option<f64>,
        #[arg(long)]
        participants: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    use config::Options;
    match cli.command {
        Command::LearnPriors { flags, categories } => commands::learn_priors(Options::resolve(flags, categories, None, None)?),
        Command::LearnWeights { flags, budget } => commands::learn_weights(Options::resolve(flags, None, None, budget)?),
        Command::Place { flags } => commands::place(Options::resolve(flags, None, None, None)?),
        Command::Evaluate { flags, layouts } => commands::evaluate(Options::resolve(flags, None, layouts, None)?),
        Command::ExportMaps { flags } => commands::export_maps(Options::resolve(flags, None, None, None)?),
        Command::GenerateSynthetic {
            flags,
            count,
            split,
            noise,
            participants,
        } => {
            let mut opts = Options::resolve(flags, None, None, None)?;
            let spec = &mut opts.synthetic;
            if let Some(c) = count {
                spec.image_count = c;
            }
            if let Some(s) = split {
                spec.split = s;
            }
            if let Some(n) = noise {
                spec.noise_scale = n;
            }
            if let Some(p) = participants {
                spec.participant_count = p;
            }
            commands::generate_synthetic(opts)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
