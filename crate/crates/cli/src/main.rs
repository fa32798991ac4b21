mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "qaforge",
    version,
    about = "Synthesize extractive QA datasets by translation and word alignment, and score QA predictions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split dataset contexts into sentences (SQuAD JSON -> work JSON)
    Split(SplitArgs),
    /// Translate titles, sentences and questions of a work file
    Translate(TranslateArgs),
    /// Convert the translations of a work file to another script
    Transliterate(TransliterateArgs),
    /// Word-align sentence pairs and write Pharaoh alignments
    Align(AlignArgs),
    /// Project answers through alignments (work JSON + Pharaoh -> SQuAD JSON)
    Retrieve(RetrieveArgs),
    /// Run split, translate, transliterate, align and retrieve in one go
    Synthesize(SynthesizeArgs),
    /// Sample count and mean context, question and answer lengths
    Stats(StatsArgs),
    /// Exact match and F1 of a predictions file
    Evaluate(EvalArgs),
    /// Per-question-type scores and lengths as a table
    Analyze(EvalArgs),
}

#[derive(Args, Clone)]
pub struct IoArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// TOML file with defaults for any of the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads; 1 gives bit-reproducible output
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Recompute even if the stage manifest says the outputs are current
    #[arg(long)]
    pub force: bool,
}

#[derive(Args, Clone)]
pub struct LangArgs {
    #[arg(long)]
    pub src_lang: Option<String>,
    #[arg(long)]
    pub tgt_lang: Option<String>,
    /// Abbreviation list for sentence splitting (default: shipped list for --src-lang)
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct ProviderArgs {
    /// identity | file:<path> | http:<url>
    #[arg(long)]
    pub provider: Option<String>,
    /// Units per provider request
    #[arg(long)]
    pub batch_size: Option<usize>,
}

#[derive(Args, Clone)]
pub struct TranslitArgs {
    /// off | latin | cyrillic
    #[arg(long)]
    pub translit: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlignerKind {
    Em,
    Gibbs,
    Diagonal,
}

#[derive(Args, Clone)]
pub struct TrainingArgs {
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub aligner: Option<AlignerKind>,
    /// Longer sentence pairs are left out of training
    #[arg(long)]
    pub max_tokens: Option<usize>,
}

#[derive(Args, Clone)]
pub struct RetrieveFlags {
    /// Drop report (JSONL); defaults to <output>.drops.jsonl
    #[arg(long)]
    pub drop_report: Option<PathBuf>,
    /// Drop answers that contain no letters or digits
    #[arg(long)]
    pub drop_punctuation_only: bool,
}

#[derive(Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub langs: LangArgs,
}

#[derive(Args)]
pub struct TranslateArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub provider: ProviderArgs,
}

#[derive(Args)]
pub struct TransliterateArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub translit: TranslitArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlignFormat {
    /// Work JSON from the translate stage
    Work,
    /// JSONL of {"src": [..], "tgt": [..]}
    Jsonl,
    /// Two line-aligned token files (--input and --target)
    Text,
    /// Existing Pharaoh file, rewritten in canonical order
    Pharaoh,
}

#[derive(Args)]
pub struct AlignArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub training: TrainingArgs,
    #[arg(long, value_enum, default_value = "work")]
    pub format: AlignFormat,
    /// Target side for --format text
    #[arg(long)]
    pub target: Option<PathBuf>,
}

#[derive(Args)]
pub struct RetrieveArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Pharaoh alignments, one line per sentence of the work file
    #[arg(long)]
    pub alignments: Option<PathBuf>,
    #[command(flatten)]
    pub flags: RetrieveFlags,
}

#[derive(Args)]
pub struct SynthesizeArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub langs: LangArgs,
    #[command(flatten)]
    pub provider: ProviderArgs,
    #[command(flatten)]
    pub translit: TranslitArgs,
    #[command(flatten)]
    pub training: TrainingArgs,
    /// Use these Pharaoh alignments instead of training an aligner
    #[arg(long)]
    pub alignments: Option<PathBuf>,
    #[command(flatten)]
    pub flags: RetrieveFlags,
}

#[derive(Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// JSON object mapping question id to predicted answer
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Official English SQuAD normalization (articles, ASCII punctuation)
    #[arg(long)]
    pub english: bool,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Split(a) => commands::split(a),
        Command::Translate(a) => commands::translate(a),
        Command::Transliterate(a) => commands::transliterate(a),
        Command::Align(a) => commands::align(a),
        Command::Retrieve(a) => commands::retrieve(a),
        Command::Synthesize(a) => commands::synthesize(a),
        Command::Stats(a) => commands::stats(a),
        Command::Evaluate(a) => commands::evaluate(a, false),
        Command::Analyze(a) => commands::evaluate(a, true),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::usage(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.code as u8)
        }
    }
}
