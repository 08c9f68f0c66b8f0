//! Command-line front end. [`run`] parses arguments, dispatches, and maps
//! failures onto exit codes.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{AppConfig, MetricOptions, Paths, SplitOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_BACKEND: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Backend(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Backend(_) => EXIT_BACKEND,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
            CliError::Backend(_) => "backend",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "skillmind", about = "Skill-of-mind dataset and evaluation toolkit", disable_version_flag = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random choice (overrides the config file)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Replace every backend with an offline mock
    #[arg(long, global = true)]
    pub mock: bool,
    /// Machine-readable output and errors
    #[arg(long, global = true)]
    pub json: bool,
    /// Print version and taxonomy fingerprint
    #[arg(long, short = 'V')]
    pub version: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect the skill taxonomy
    #[command(subcommand)]
    Taxonomy(TaxonomyCmd),
    /// Split, sample and summarize dialogue corpora
    #[command(subcommand)]
    Corpus(CorpusCmd),
    /// Annotate sub-dialogues with skill-of-mind
    #[command(subcommand)]
    Annotate(AnnotateCmd),
    /// Split datasets and export training records
    #[command(subcommand)]
    Dataset(DatasetCmd),
    /// Run the planner and responder
    #[command(subcommand)]
    Som(SomCmd),
    /// Compute evaluation statistics
    #[command(subcommand)]
    Eval(EvalCmd),
}

#[derive(Debug, Subcommand)]
pub enum TaxonomyCmd {
    /// List every skill by category
    List,
    /// Resolve a free-form skill name
    Resolve { name: String },
}

#[derive(Debug, Subcommand)]
pub enum CorpusCmd {
    /// Cut dialogues into sub-dialogues
    Split {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        stride: Option<usize>,
        #[arg(long)]
        min_turns: Option<usize>,
    },
    /// Draw a source-proportional sample of sub-dialogues
    Sample {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        total: usize,
        /// JSON object mapping source tag to proportion (default: uniform)
        #[arg(long)]
        proportions: Option<PathBuf>,
    },
    /// Summarize a dialogue corpus
    Stats {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        stride: Option<usize>,
        #[arg(long)]
        min_turns: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum AnnotateCmd {
    /// Annotate every sub-dialogue in a file
    Run {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Failure log (default: OUTPUT with a .failures.jsonl suffix)
        #[arg(long)]
        failures: Option<PathBuf>,
        /// JSONL of {"id", "output"} fixtures served by the mock annotator
        #[arg(long)]
        mock_outputs: Option<PathBuf>,
        /// Exclude skills outside the taxonomy
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        concurrency: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum DatasetCmd {
    /// Seeded train/test split
    Split {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        test_fraction: f64,
    },
    /// Write {"input", "target"} training records
    ExportTrain {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct DialogueInput {
    /// Dialogue JSON file; standard input when omitted or "-"
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Ignore any social context in the input
    #[arg(long)]
    pub no_context: bool,
}

#[derive(Debug, Subcommand)]
pub enum SomCmd {
    /// Plan skills for the next turn
    Infer(DialogueInput),
    /// Plan and generate the next turn
    Respond {
        #[command(flatten)]
        dialogue: DialogueInput,
        /// Skip planning and use the unguided prompt
        #[arg(long)]
        baseline: bool,
    },
    /// Interactive loop over standard input
    Chat {
        #[arg(long)]
        context: Option<String>,
        #[arg(long)]
        baseline: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TextMetric {
    All,
    Bleu1,
    Bleu2,
    Bleu4,
    RougeL,
}

#[derive(Debug, Subcommand)]
pub enum EvalCmd {
    /// Skill classification accuracy
    Skills {
        #[arg(long)]
        input: PathBuf,
        /// Require the predicted set to equal the gold set
        #[arg(long)]
        exact: bool,
    },
    /// BLEU and ROUGE-L
    Text {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = TextMetric::All)]
        metric: TextMetric,
        #[arg(long)]
        smoothing: bool,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Skill frequency over a dataset
    Distribution {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
    },
    /// Krippendorff's alpha per criterion
    Agreement {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        level: Option<crate::evaluation::Level>,
    },
    /// Safety-label ratios
    Safety {
        #[arg(long)]
        input: PathBuf,
        /// JSONL of {"text", "label"} fixtures for the mock classifier
        #[arg(long)]
        mock_labels: Option<PathBuf>,
    },
    /// Head-to-head preference tallies
    H2h {
        #[arg(long)]
        input: PathBuf,
    },
}

pub fn version_string(config: Option<&AppConfig>) -> String {
    let taxonomy = config
        .and_then(|c| commands::load_taxonomy(c).ok())
        .unwrap_or_else(crate::taxonomy::builtin_taxonomy);
    format!(
        "skillmind {} (taxonomy {})",
        env!("CARGO_PKG_VERSION"),
        taxonomy.fingerprint()
    )
}

fn report_error(err: &CliError, json: bool) {
    if json {
        let line = serde_json::json!({
            "error": err.kind(),
            "message": err.to_string(),
            "exit_code": err.exit_code(),
        });
        eprintln!("{line}");
    } else {
        eprintln!("error: {err}");
    }
}

/// Runs the program on `argv` (including the program name) and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let json = argv.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            if json {
                report_error(&CliError::Usage(e.kind().to_string()), true);
            } else {
                eprint!("{e}");
            }
            return EXIT_USAGE;
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            report_error(&e, json);
            e.exit_code()
        }
    }
}
