//! `dsrs` command-line tool.

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "dsrs", version, about = "Journal influence scores from bibliometric indicator tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run feature downselection and fit a scoring model.
    Fit(FitArgs),
    /// Score one journal from indicator values.
    Score(ScoreArgs),
    /// Split scores into National and International clusters.
    Classify(ClassifyArgs),
    /// Compare model scores with a reference column.
    Validate(ValidateArgs),
    /// Write the data behind feature and cluster scatter plots.
    Plotdata(PlotdataArgs),
}

/// Output table delimiter.
#[derive(Args, Clone, Copy)]
pub struct DelimiterArg {
    /// Field delimiter for emitted tables (a single character, or `tab`).
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    pub delimiter: u8,
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "tab" | "\\t" | "\t" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() && s != "\"" && s != "\n" => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be one ASCII character, got {s:?}")),
    }
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "model_source")]
pub struct ModelSource {
    /// Model file written by `dsrs fit`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Use the published five-feature model.
    #[arg(long)]
    pub published: bool,
}

#[derive(Args)]
pub struct PublishedPrecisionArg {
    /// With --published, use the midpoints of the published 95% confidence
    /// bounds instead of the printed constants.
    #[arg(long, requires = "published")]
    pub full_precision: bool,
}

#[derive(Args)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "SJR")]
    pub response: String,
    #[arg(long, default_value_t = dsrs_core::dsrs::DEFAULT_P_THRESHOLD)]
    pub p_threshold: f64,
    #[arg(long, default_value_t = dsrs_core::dsrs::DEFAULT_CORR_THRESHOLD)]
    pub corr_threshold: f64,
    #[arg(long, default_value_t = dsrs_core::dsrs::DEFAULT_PAIRWISE_THRESHOLD)]
    pub pairwise_threshold: f64,
    /// Largest missing fraction for an indicator to stay a candidate.
    #[arg(long, default_value_t = dsrs_core::ingest::DEFAULT_MAX_MISSING)]
    pub max_missing: f64,
    #[arg(long)]
    pub max_features: Option<usize>,
    /// Comma-separated candidate features; replaces the default candidates.
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    /// Where to write the model file.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub delimiter: DelimiterArg,
}

#[derive(Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub source: ModelSource,
    #[command(flatten)]
    pub precision: PublishedPrecisionArg,
    #[arg(long, allow_negative_numbers = true)]
    pub quarter: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub h_index: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub total_docs: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub total_refs: Option<f64>,
    #[arg(long = "cites-per-doc-2y", allow_negative_numbers = true)]
    pub cites_per_doc_2y: Option<f64>,
    /// Any model feature as NAME=VALUE; repeatable.
    #[arg(long = "feature", value_name = "NAME=VALUE")]
    pub features: Vec<String>,
}

#[derive(Args)]
#[group(id = "score_source", required = true, multiple = false)]
pub struct ScoreSource {
    /// Table of precomputed scores (`id` and `score` columns).
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Indicator table to score with --model or --published.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub source: ScoreSource,
    #[arg(long, conflicts_with = "scores")]
    pub model: Option<PathBuf>,
    #[arg(long, conflicts_with_all = ["scores", "model"])]
    pub published: bool,
    /// Where to write the labeled table; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Draw the initial means from the scores with this seed instead of
    /// starting from the minimum and maximum.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub delimiter: DelimiterArg,
}

#[derive(Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub source: ModelSource,
    #[command(flatten)]
    pub precision: PublishedPrecisionArg,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "SJR")]
    pub reference_column: String,
    #[command(flatten)]
    pub delimiter: DelimiterArg,
}

#[derive(Args)]
pub struct PlotdataArgs {
    #[command(flatten)]
    pub source: ModelSource,
    #[command(flatten)]
    pub precision: PublishedPrecisionArg,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output_dir: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub delimiter: DelimiterArg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => commands::fit(&a),
        Command::Score(a) => commands::score(&a),
        Command::Classify(a) => commands::classify(&a),
        Command::Validate(a) => commands::validate(&a),
        Command::Plotdata(a) => commands::plotdata(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
