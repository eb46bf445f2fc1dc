mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use clc_core::metrics::{Metric, WeightScheme};

/// Cross-lingual consistency of factual knowledge probes.
#[derive(Debug, Parser)]
#[command(name = "clc", version)]
pub struct Cli {
    /// Output file (stdout when omitted, except where noted)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// RankC weighting scheme
    #[arg(long, global = true, default_value = "softmax")]
    pub scheme: WeightScheme,

    /// Consistency metric
    #[arg(long, global = true, default_value = "rankc")]
    pub metric: Metric,

    /// Only report errors
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a dataset against every invariant; prints a JSON report
    Validate { dataset: PathBuf },
    /// Dataset statistics as JSON
    Stats { dataset: PathBuf },
    /// Pairwise consistency matrix (CSV at --out, plus a .json sidecar)
    Matrix {
        dataset: PathBuf,
        scores: PathBuf,
        /// Also render the matrix as an SVG heatmap
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Per-language probing accuracy as JSON
    Accuracy { dataset: PathBuf, scores: PathBuf },
    /// Pearson correlation of matrix values with pair similarities
    Correlate {
        matrix: PathBuf,
        #[arg(required = true)]
        similarity: Vec<PathBuf>,
    },
    /// Pairwise vocabulary overlap as a similarity CSV
    VocabOverlap {
        #[arg(required = true, num_args = 2..)]
        vocabularies: Vec<PathBuf>,
        /// Feature name written to the CSV
        #[arg(long, default_value = "vocab_overlap")]
        feature: String,
    },
    /// Least-squares fit of matrix values on one similarity feature
    Regress {
        matrix: PathBuf,
        similarity: PathBuf,
        /// Feature to use when the file holds several
        #[arg(long)]
        feature: Option<String>,
    },
    /// Normalized pre/post editing values per query and language
    EditReport {
        logits: PathBuf,
        /// `language,rankc` CSV of consistency with the edited language
        rankc: PathBuf,
        /// High/low consistency split (default: mean of the supplied values)
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Render a matrix CSV as an SVG heatmap
    Heatmap { matrix: PathBuf },
}

/// Failure classes mapped onto the exit code contract.
#[derive(Debug)]
pub enum Failure {
    /// Bad invocation or unreadable input (exit 2).
    Usage(anyhow::Error),
    /// Inputs read but rejected by the domain logic (exit 1).
    Domain(anyhow::Error),
    /// Command ran and reported a negative result (exit 1, nothing to add).
    Rejected,
}

impl From<clc_core::Error> for Failure {
    fn from(e: clc_core::Error) -> Self {
        match &e {
            clc_core::Error::Io { .. } => Failure::Usage(e.into()),
            _ => Failure::Domain(e.into()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default_level = if cli.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CLC_LOG", default_level))
        .format_timestamp(None)
        .init();

    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected) => ExitCode::from(1),
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
