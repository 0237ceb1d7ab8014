use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{bad_input, require, runtime, CliError, CliResult, GRADCHECK_TOLERANCE};
use super::{ClassifyArgs, CorrelateArgs, GradcheckArgs, MetricsArgs, SynthCorpusArgs, SynthDialogsArgs, TrainArgs};
use crate::classifiers::{
    gradcheck_model, load_model, load_model_as, random_gradcheck_model, save_model, train as train_model,
    transfer_finetune, Architecture, Downsample, GradcheckOptions, LabelMap, LabeledExample, ModelKind,
    TopicModel, TrainConfig, TrainOutcome, DEFAULT_KEYWORD_COUNT,
};
use crate::dialog::{read_conversations, write_conversations, ConversationClassifier};
use crate::error::Error;
use crate::io::{read_jsonl, write_jsonl, write_string_atomic};
use crate::metrics::{compute_report, correlate_tsv};
use crate::synth::{
    builtin_topic_specs, generate_conversations, generate_corpus, strip_labels, DialogSpec, TopicSpec,
};

fn parse_kind(raw: &str) -> CliResult<ModelKind> {
    raw.parse().map_err(bad_input)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    path.with_file_name(format!("{stem}{suffix}"))
}

/// A model file that exists but cannot be used is a model failure; a
/// missing one is a usage error.
fn open_model(path: &Path, kind: Option<ModelKind>) -> CliResult<TopicModel> {
    if !path.exists() {
        return Err(CliError::usage(format!("{}: no such file", path.display())));
    }
    match kind {
        Some(kind) => load_model_as(path, kind),
        None => load_model(path),
    }
    .map_err(runtime)
}

fn history_tsv(outcome: &TrainOutcome) -> String {
    let mut out = String::from("epoch\ttrain_loss\tdev_accuracy\n");
    for r in &outcome.history {
        let _ = writeln!(out, "{}\t{}\t{}", r.epoch, r.train_loss, r.dev_accuracy);
    }
    out
}

pub(super) fn train(args: TrainArgs) -> CliResult {
    let kind = parse_kind(&require(args.model, "model")?)?;
    let data_path = require(args.data, "data")?;
    let dev_path = require(args.dev, "dev")?;
    let out = require(args.out, "out")?;

    let defaults = TrainConfig::default();
    let config = TrainConfig {
        epochs: args.epochs.unwrap_or(defaults.epochs),
        batch_size: args.batch_size.unwrap_or(defaults.batch_size),
        lr: args.lr.unwrap_or(defaults.lr),
        seed: args.seed.unwrap_or(defaults.seed),
        word_dropout: args.word_dropout.unwrap_or(defaults.word_dropout),
        fine_tune_embeddings: args.fine_tune.unwrap_or(defaults.fine_tune_embeddings),
        downsample: args
            .downsample
            .as_deref()
            .map(str::parse::<Downsample>)
            .transpose()
            .map_err(bad_input)?,
        patience: args.patience.unwrap_or(defaults.patience),
        min_count: args.min_count.unwrap_or(defaults.min_count),
    };
    config.validate().map_err(bad_input)?;
    let arch_defaults = Architecture::default();
    let arch = Architecture {
        embedding_dim: args.embedding_dim.unwrap_or(arch_defaults.embedding_dim),
        hidden: args.hidden.unwrap_or(arch_defaults.hidden),
        length_scaling: args.length_scaling.unwrap_or(arch_defaults.length_scaling),
    };

    let train_data: Vec<LabeledExample> = read_jsonl(&data_path).map_err(bad_input)?;
    let dev: Vec<LabeledExample> = read_jsonl(&dev_path).map_err(bad_input)?;
    if let Some(p) = args.embeddings.as_deref().filter(|p| !p.exists()) {
        return Err(CliError::usage(format!("{}: no such file", p.display())));
    }

    let outcome = match &args.transfer_from {
        Some(source) => {
            let source = open_model(source, Some(kind))?;
            transfer_finetune(&source, &train_data, &dev, &arch, &config)
        }
        None => train_model(kind, &train_data, &dev, &arch, &config, args.embeddings.as_deref()),
    }
    .map_err(runtime)?;

    let mut model = outcome.model.clone();
    let name = args
        .name
        .unwrap_or_else(|| out.file_stem().unwrap_or_default().to_string_lossy().into_owned());
    model.set_name(name);
    save_model(&model, &out).map_err(runtime)?;
    let history = args.history.unwrap_or_else(|| with_suffix(&out, ".history.tsv"));
    write_string_atomic(&history, &history_tsv(&outcome)).map_err(runtime)?;
    if outcome.skipped_empty > 0 {
        eprintln!("warning: skipped {} training rows without tokens", outcome.skipped_empty);
    }
    println!(
        "best dev accuracy: {:.4} (epoch {})",
        outcome.best_dev_accuracy, outcome.best_epoch
    );
    Ok(())
}

fn read_stoplist(path: &Path) -> CliResult<HashSet<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| bad_input(Error::Io {
        path: path.to_path_buf(),
        source: e,
    }))?;
    Ok(text
        .lines()
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty())
        .collect())
}

pub(super) fn classify(args: ClassifyArgs) -> CliResult {
    let conv_path = require(args.conversations, "conversations")?;
    let model_a_path = require(args.model_a, "model-a")?;
    let out = require(args.out, "out")?;

    let conversations = read_conversations(&conv_path).map_err(bad_input)?;
    let model_a = open_model(&model_a_path, None)?;
    let model_b = args.model_b.as_deref().map(|p| open_model(p, None)).transpose()?;
    let label_map = args
        .label_map
        .as_deref()
        .map(LabelMap::load)
        .transpose()
        .map_err(bad_input)?;
    let keyword_model = args
        .keyword_model
        .as_deref()
        .map(|p| open_model(p, Some(ModelKind::Adan)))
        .transpose()?;
    let stoplist = args.stoplist.as_deref().map(read_stoplist).transpose()?;

    let classifier = ConversationClassifier {
        model_a: &model_a,
        model_b: model_b.as_ref(),
        label_map: label_map.as_ref(),
        keyword_model: keyword_model.as_ref().and_then(TopicModel::as_adan),
        n_keywords: args.n_keywords.unwrap_or(DEFAULT_KEYWORD_COUNT),
        stoplist: stoplist.as_ref(),
    };
    let classified = conversations
        .iter()
        .map(|c| classifier.classify_conversation(c))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(runtime)?;
    let flagged = classified
        .iter()
        .flat_map(|c| c.turns.iter().flat_map(|t| [&t.user, &t.bot]))
        .filter(|u| u.flagged)
        .count();
    if flagged > 0 {
        eprintln!("warning: {flagged} utterances without tokens were labeled Phatic");
    }
    write_conversations(&out, &classified).map_err(runtime)?;
    println!("classified {} conversations", classified.len());
    Ok(())
}

fn parse_topics(raw: &str) -> CliResult<Vec<String>> {
    let items: Vec<String> = match raw.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| bad_input(Error::Io {
                path: path.into(),
                source: e,
            }))?
            .lines()
            .map(str::to_string)
            .collect(),
        None => raw.split(',').map(str::to_string).collect(),
    };
    Ok(items
        .into_iter()
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect())
}

pub(super) fn metrics(args: MetricsArgs) -> CliResult {
    let input = require(args.classified, "classified")?;
    let topics = match args.canonical_topics.as_deref() {
        Some(raw) => parse_topics(raw)?,
        None => Vec::new(),
    };
    let conversations = read_conversations(&input).map_err(bad_input)?;
    let report = compute_report(&conversations, &topics).map_err(runtime)?;
    let tsv = report.to_tsv();
    if let Some(path) = &args.out_json {
        write_string_atomic(path, &report.to_json().map_err(runtime)?).map_err(runtime)?;
    }
    match &args.out_tsv {
        Some(path) => write_string_atomic(path, &tsv).map_err(runtime)?,
        None if args.out_json.is_none() => print!("{tsv}"),
        None => {}
    }
    Ok(())
}

pub(super) fn correlate(args: CorrelateArgs) -> CliResult {
    let path = require(args.metrics_tsv, "metrics-tsv")?;
    let text = std::fs::read_to_string(&path).map_err(|e| bad_input(Error::Io { path: path.clone(), source: e }))?;
    let (_, out) = correlate_tsv(&text).map_err(bad_input)?;
    match &args.out {
        Some(p) => write_string_atomic(p, &out).map_err(runtime)?,
        None => print!("{out}"),
    }
    Ok(())
}

pub(super) fn gradcheck(args: GradcheckArgs) -> CliResult {
    let kind = parse_kind(&require(args.model, "model")?)?;
    let seed = args.seed.unwrap_or(0);
    let (model, examples) = random_gradcheck_model(kind, seed);
    let options = GradcheckOptions {
        seed,
        corrupt: args.corrupt.unwrap_or(false),
        ..Default::default()
    };
    let report = gradcheck_model(&model, &examples, &options).map_err(runtime)?;
    println!(
        "{kind} seed {seed}: max relative error {:.3e} over {} coordinates",
        report.max_relative_error, report.coordinates_checked
    );
    for (block, err) in &report.per_block {
        println!("  {block}: {err:.3e}");
    }
    if report.max_relative_error <= GRADCHECK_TOLERANCE {
        Ok(())
    } else {
        Err(CliError::failure(format!(
            "gradient check failed: {:.3e} > {GRADCHECK_TOLERANCE:e}",
            report.max_relative_error
        )))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| bad_input(Error::Io {
        path: path.to_path_buf(),
        source: e,
    }))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub(super) fn synth_corpus(args: SynthCorpusArgs) -> CliResult {
    let n = require(args.n, "n")?;
    let out = require(args.out, "out")?;
    let specs: Vec<TopicSpec> = match &args.spec {
        Some(p) => read_json(p)?,
        None => builtin_topic_specs(),
    };
    let corpus = generate_corpus(&specs, n, args.seed.unwrap_or(0)).map_err(bad_input)?;
    write_jsonl(&out, &corpus.examples).map_err(runtime)?;
    let planted = args.planted_out.unwrap_or_else(|| with_suffix(&out, ".planted.jsonl"));
    write_jsonl(&planted, &corpus.planted).map_err(runtime)?;
    println!("wrote {} utterances over {} topics", corpus.examples.len(), specs.len());
    Ok(())
}

pub(super) fn synth_dialogs(args: SynthDialogsArgs) -> CliResult {
    let spec: DialogSpec = read_json(&require(args.spec, "spec")?)?;
    let out = require(args.out, "out")?;
    let per_bot = args.convs_per_bot.unwrap_or(spec.convs_per_bot);
    let dialogs =
        generate_conversations(&spec.topics, &spec.bots, per_bot, args.seed.unwrap_or(0)).map_err(bad_input)?;
    let raw: Vec<_> = dialogs.conversations.iter().map(strip_labels).collect();
    write_conversations(&out, &raw).map_err(runtime)?;
    let labeled = args.labeled_out.unwrap_or_else(|| with_suffix(&out, ".labeled.jsonl"));
    write_conversations(&labeled, &dialogs.conversations).map_err(runtime)?;
    let truth = args.truth_out.unwrap_or_else(|| with_suffix(&out, ".truth.jsonl"));
    write_jsonl(&truth, &dialogs.truth).map_err(runtime)?;
    println!(
        "wrote {} conversations for {} bots",
        dialogs.conversations.len(),
        spec.bots.len()
    );
    Ok(())
}
