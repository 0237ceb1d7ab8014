//! Command-line front end. Every command merges a JSON config file with its
//! flags (flags win) and maps failures to exit codes: 0 success, 1 runtime
//! or model failure, 2 usage or configuration error.

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Default seed when neither flag nor config sets one.
pub const SEED_ENV: &str = "TOPICEVAL_SEED";

/// Largest relative error accepted by `gradcheck`.
pub const GRADCHECK_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(name = "topiceval", version, about = "Topic-based evaluation of conversational agents")]
struct Cli {
    /// JSON object of option values; keys are flag names.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the resolved configuration to stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a DAN or ADAN topic classifier.
    Train(TrainArgs),
    /// Assign topics, entropies and keywords to conversation utterances.
    Classify(ClassifyArgs),
    /// Segment classified conversations and compute per-bot metrics.
    Metrics(MetricsArgs),
    /// Rank-correlate per-bot metric columns with the mean rating.
    Correlate(CorrelateArgs),
    /// Finite-difference check of a small random model's gradients.
    Gradcheck(GradcheckArgs),
    /// Generate synthetic corpora.
    #[command(subcommand)]
    Synth(SynthCommand),
}

#[derive(Debug, Subcommand)]
enum SynthCommand {
    /// Labeled utterances with planted topic keywords.
    Corpus(SynthCorpusArgs),
    /// Multi-bot conversations with ground-truth segmentation and ratings.
    Dialogs(SynthDialogsArgs),
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub(crate) struct TrainArgs {
    /// dan or adan.
    #[arg(long)]
    pub model: Option<String>,
    /// Labeled training JSONL ({"text", "topic"} per line).
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub dev: Option<PathBuf>,
    /// Output model file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Model name recorded in the file and used as the label-map key;
    /// defaults to the output file stem.
    #[arg(long)]
    pub name: Option<String>,
    /// Per-epoch history TSV; defaults to the model path with a
    /// `.history.tsv` extension.
    #[arg(long)]
    pub history: Option<PathBuf>,
    /// Pretrained embeddings in GloVe text format.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Update embeddings during training.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub fine_tune: Option<bool>,
    /// Keep each LABEL example with probability P.
    #[arg(long, value_name = "LABEL:P")]
    pub downsample: Option<String>,
    /// Start from an existing model's embeddings and hidden layers.
    #[arg(long)]
    pub transfer_from: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// Epochs without dev improvement before stopping; 0 disables.
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub word_dropout: Option<f64>,
    #[arg(long)]
    pub min_count: Option<usize>,
    #[arg(long)]
    pub embedding_dim: Option<usize>,
    /// Hidden layer sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub hidden: Option<Vec<usize>>,
    /// ADAN: keep the 1/L factor in topic representations.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub length_scaling: Option<bool>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub(crate) struct ClassifyArgs {
    /// Conversation JSONL, raw or classified.
    #[arg(long)]
    pub conversations: Option<PathBuf>,
    #[arg(long)]
    pub model_a: Option<PathBuf>,
    /// Second model; enables the entropy ensemble.
    #[arg(long)]
    pub model_b: Option<PathBuf>,
    /// JSON map of model name -> native label -> canonical topic.
    #[arg(long)]
    pub label_map: Option<PathBuf>,
    /// ADAN model used for keywords regardless of the winning classifier.
    #[arg(long)]
    pub keyword_model: Option<PathBuf>,
    #[arg(long)]
    pub n_keywords: Option<usize>,
    /// File of words never reported as keywords, one per line.
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub(crate) struct MetricsArgs {
    /// Classified conversation JSONL.
    #[arg(long)]
    pub classified: Option<PathBuf>,
    /// Comma-separated topic list, or @FILE with one topic per line.
    #[arg(long)]
    pub canonical_topics: Option<String>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
    #[arg(long)]
    pub out_tsv: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub(crate) struct CorrelateArgs {
    /// Per-bot metrics TSV with a mean_rating column.
    #[arg(long)]
    pub metrics_tsv: Option<PathBuf>,
    /// Output TSV; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub(crate) struct GradcheckArgs {
    /// dan or adan.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Deliberately corrupt one analytic gradient (checker self-test).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub corrupt: Option<bool>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub(crate) struct SynthCorpusArgs {
    /// JSON list of topic specs; the built-in eight topics when omitted.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Planted-keyword sidecar; defaults to `<out>.planted.jsonl`.
    #[arg(long)]
    pub planted_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub(crate) struct SynthDialogsArgs {
    /// JSON dialog spec: bot profiles, optional topics and convs_per_bot.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub convs_per_bot: Option<usize>,
    /// Raw transcripts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Transcripts with ground-truth topics and planted keywords.
    #[arg(long)]
    pub labeled_out: Option<PathBuf>,
    /// Ground-truth segmentation and ratings.
    #[arg(long)]
    pub truth_out: Option<PathBuf>,
}

/// A failed command: message plus exit code.
#[derive(Debug)]
pub(crate) struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_FAILURE,
            message: message.into(),
        }
    }
}

pub(crate) type CliResult<T = ()> = std::result::Result<T, CliError>;

/// Errors reading or validating user input are usage errors.
pub(crate) fn bad_input(e: Error) -> CliError {
    CliError::usage(e.to_string())
}

pub(crate) fn runtime(e: Error) -> CliError {
    CliError::failure(e.to_string())
}

pub(crate) fn require<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::usage(format!("missing required option --{flag}")))
}

fn load_config(path: &PathBuf) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map
            .into_iter()
            .map(|(k, v)| (k.replace('-', "_"), v))
            .collect()),
        Ok(_) => Err(CliError::usage(format!("{}: config must be a JSON object", path.display()))),
        Err(e) => Err(CliError::usage(format!("{}: {e}", path.display()))),
    }
}

/// Fills options the flags left unset from the config file, then the seed
/// from the environment. Config keys that the command does not know are
/// ignored so one file can serve several commands.
fn resolve<T: Serialize + DeserializeOwned>(args: T, config: Option<&Map<String, Value>>) -> CliResult<(T, Value)> {
    let mut value = serde_json::to_value(&args).map_err(|e| CliError::usage(e.to_string()))?;
    let fields = value.as_object_mut().expect("args serialize to an object");
    if let Some(config) = config {
        for (key, v) in config {
            if let Some(slot) = fields.get_mut(key) {
                if slot.is_null() {
                    *slot = v.clone();
                }
            }
        }
    }
    if let Some(slot) = fields.get_mut("seed") {
        if slot.is_null() {
            if let Ok(raw) = std::env::var(SEED_ENV) {
                let seed: u64 = raw
                    .trim()
                    .parse()
                    .map_err(|_| CliError::usage(format!("{SEED_ENV}={raw:?} is not an unsigned integer")))?;
                *slot = seed.into();
            }
        }
    }
    let resolved = serde_json::from_value(value.clone()).map_err(|e| CliError::usage(format!("config: {e}")))?;
    Ok((resolved, value))
}

fn dispatch(cli: Cli) -> CliResult {
    let config = cli.config.as_ref().map(load_config).transpose()?;
    let config = config.as_ref();
    macro_rules! run {
        ($name:expr, $args:expr, $f:path) => {{
            let (args, resolved) = resolve($args, config)?;
            if cli.verbose {
                eprintln!("{}", serde_json::json!({ "command": $name, "options": resolved }));
            }
            $f(args)
        }};
    }
    match cli.command {
        Command::Train(a) => run!("train", a, commands::train),
        Command::Classify(a) => run!("classify", a, commands::classify),
        Command::Metrics(a) => run!("metrics", a, commands::metrics),
        Command::Correlate(a) => run!("correlate", a, commands::correlate),
        Command::Gradcheck(a) => run!("gradcheck", a, commands::gradcheck),
        Command::Synth(SynthCommand::Corpus(a)) => run!("synth corpus", a, commands::synth_corpus),
        Command::Synth(SynthCommand::Dialogs(a)) => run!("synth dialogs", a, commands::synth_dialogs),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}
