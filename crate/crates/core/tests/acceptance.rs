//! End-to-end acceptance checks. Runs every criterion in sequence, prints
//! one PASS/FAIL line each and exits non-zero if any fails.

use std::collections::HashSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topiceval::classifiers::{
    ensemble_predict, load_model, load_model_as, save_model, train, Architecture, GradcheckOptions, ModelKind,
    TopicModel, TopicPrediction, TrainConfig, PHATIC,
};
use topiceval::dialog::{segment, segment_topics, Conversation, SegmentationResult, Speaker, Turn, Utterance};
use topiceval::metrics::{
    dialog_depth, keyword_metrics, keyword_stream_metrics, rer, spearman, system_depth, topic_histogram,
};
use topiceval::synth::{builtin_topic_specs, generate_corpus, BotProfile, SynthCorpus};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_topiceval"))
        .env_remove("TOPICEVAL_SEED")
        .args(args)
        .output()
        .expect("run topiceval");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

// 1 ------------------------------------------------------------------------

fn gradient_correctness() -> Outcome {
    assert_eq!(GradcheckOptions::default().eps, 1e-5);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for kind in ["dan", "adan"] {
        for seed in 0..5 {
            let (code, out) = cli(&["gradcheck", "--model", kind, "--seed", &seed.to_string()]);
            let err: f64 = out
                .lines()
                .find_map(|l| l.split("max relative error ").nth(1))
                .and_then(|rest| rest.split_whitespace().next())
                .and_then(|v| v.parse().ok())
                .unwrap_or(f64::INFINITY);
            worst = worst.max(err);
            if code != 0 || err > 1e-4 {
                failures.push(format!("{kind}/{seed}"));
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && elapsed < Duration::from_secs(10),
        format!("max rel err {worst:.2e} over 10 runs in {elapsed:.2?}; failing: {failures:?}"),
    )
}

// 2 and 3 --------------------------------------------------------------------

struct Classification {
    dev: SynthCorpus,
    adan: Option<TopicModel>,
}

fn synthetic_classification() -> (Outcome, Classification) {
    let specs = builtin_topic_specs();
    let train_set = generate_corpus(&specs, 2000, 1).unwrap();
    let dev = generate_corpus(&specs, 400, 2).unwrap();
    let config = TrainConfig {
        epochs: 30,
        seed: 7,
        ..Default::default()
    };
    let arch = Architecture::default();
    let mut details = Vec::new();
    let mut pass = true;
    let mut adan = None;
    for (kind, floor) in [(ModelKind::Dan, 0.99), (ModelKind::Adan, 0.95)] {
        let start = Instant::now();
        match train(kind, &train_set.examples, &dev.examples, &arch, &config, None) {
            Ok(out) => {
                let elapsed = start.elapsed();
                let ok = out.best_dev_accuracy >= floor
                    && out.best_epoch <= 30
                    && elapsed < Duration::from_secs(120);
                pass &= ok;
                details.push(format!(
                    "{kind} acc {:.4} (floor {floor}) at epoch {} in {elapsed:.1?}",
                    out.best_dev_accuracy, out.best_epoch
                ));
                if kind == ModelKind::Adan {
                    adan = Some(out.model);
                }
            }
            Err(e) => {
                pass = false;
                details.push(format!("{kind} failed: {e}"));
            }
        }
    }
    (outcome(pass, details.join("; ")), Classification { dev, adan })
}

fn keyword_recovery(c: &Classification) -> Outcome {
    let Some(model) = &c.adan else {
        return outcome(false, "no ADAN model");
    };
    let hits = c
        .dev
        .examples
        .iter()
        .zip(&c.dev.planted)
        .filter(|(ex, planted)| {
            let kws = model.predict_with_keywords(&ex.text, 2, None).keywords.unwrap_or_default();
            kws.iter().any(|k| planted.keywords.contains(&k.token))
        })
        .count();
    let rate = hits as f64 / c.dev.examples.len() as f64;
    outcome(rate >= 0.90, format!("{hits}/{} utterances ({rate:.4}) >= 0.90", c.dev.examples.len()))
}

// 4 --------------------------------------------------------------------------

const SEG_TOPICS: [&str; 6] = ["T0", "T1", "T2", "T3", "T4", PHATIC];

/// Turn resolution written out as a lookup over the four cases.
fn oracle_resolve<'a>(user: &'a str, bot: &'a str) -> &'a str {
    if user == bot {
        user
    } else if user == PHATIC {
        bot
    } else if bot == PHATIC {
        user
    } else {
        bot
    }
}

/// Quadratic scan: drop Phatic turns, then from each run start extend while
/// the topic repeats.
fn oracle_runs(topics: &[&str]) -> (Vec<(String, Vec<usize>)>, usize) {
    let kept: Vec<(usize, &str)> = topics
        .iter()
        .enumerate()
        .filter(|(_, t)| **t != PHATIC)
        .map(|(i, t)| (i + 1, *t))
        .collect();
    let mut runs = Vec::new();
    for start in 0..kept.len() {
        if start > 0 && kept[start - 1].1 == kept[start].1 {
            continue;
        }
        let mut end = start;
        while end + 1 < kept.len() && kept[end + 1].1 == kept[start].1 {
            end += 1;
        }
        if end > start {
            runs.push((kept[start].1.to_string(), kept[start..=end].iter().map(|k| k.0).collect()));
        }
    }
    (runs, kept.len())
}

fn table2() -> Conversation {
    let mut c = Conversation::new("table2", "bot");
    c.push_labeled(("Let's talk about music", "Music"), ("Sure, what's your favorite musician?", "Music"));
    c.push_labeled(
        ("Bob Dylan", "Music"),
        ("Bob Dylan is an American songwriter, singer, painter, and writer.", "Music"),
    );
    c.push_labeled(("Cool", PHATIC), ("Do you want to know more about Bob Dylan?", "Music"));
    c.push_labeled(
        ("No, let's talk about politics instead", "Politics"),
        ("Sure, here are the latest updates about Donald Trump", "Politics"),
    );
    c
}

fn segmentation_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut mismatches = 0;
    for i in 0..10_000 {
        let len = rng.random_range(0..=40);
        let mut conv = Conversation::new(format!("c{i}"), "b");
        let mut resolved = Vec::with_capacity(len);
        for _ in 0..len {
            let u = SEG_TOPICS[rng.random_range(0..SEG_TOPICS.len())];
            let b = SEG_TOPICS[rng.random_range(0..SEG_TOPICS.len())];
            conv.push_labeled(("u", u), ("b", b));
            resolved.push(oracle_resolve(u, b));
        }
        let seg = segment(&conv).unwrap();
        let (runs, l_c) = oracle_runs(&resolved);
        let got: Vec<(String, Vec<usize>)> =
            seg.subconvs.iter().map(|s| (s.topic.clone(), s.turn_indices.clone())).collect();
        let lengths_ok = seg.subconvs.iter().all(|s| s.l_s == s.turn_indices.len());
        if got != runs || seg.l_c != l_c || seg.turn_topics != resolved || !lengths_ok {
            mismatches += 1;
        }
    }
    let seg = segment(&table2()).unwrap();
    let music = seg.subconvs.iter().find(|s| s.topic == "Music");
    let worked = music.map(|s| s.l_s) == Some(3)
        && seg.subconvs.len() == 1
        && seg.l_c == 4
        && dialog_depth(&seg) == Some(3.0)
        && topiceval::metrics::dialog_breadth(&seg) == 1;
    outcome(
        mismatches == 0 && worked,
        format!("{mismatches} mismatches in 10000 sequences; worked example l_s=3 l_c=4 D=3 Br=1: {worked}"),
    )
}

// 5 --------------------------------------------------------------------------

fn random_segmentation(rng: &mut ChaCha8Rng) -> SegmentationResult {
    let len = rng.random_range(0..=30);
    let topics: Vec<&str> = (0..len).map(|_| SEG_TOPICS[rng.random_range(0..SEG_TOPICS.len())]).collect();
    let (subconvs, l_c) = segment_topics(&topics);
    SegmentationResult {
        subconvs,
        l_c,
        turn_topics: topics.iter().map(|s| s.to_string()).collect(),
        mixed_turns: vec![],
    }
}

fn lengths(ls: &[usize]) -> SegmentationResult {
    let subconvs = ls
        .iter()
        .map(|&l| topiceval::dialog::SubConversation {
            topic: "A".into(),
            turn_indices: (1..=l).collect(),
            l_s: l,
        })
        .collect();
    SegmentationResult {
        subconvs,
        l_c: ls.iter().sum(),
        turn_topics: vec![],
        mixed_turns: vec![],
    }
}

fn metric_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let canonical: Vec<String> = SEG_TOPICS[..5].iter().map(|s| s.to_string()).collect();
    let (mut depth_bad, mut freq_bad, mut worst) = (0, 0, 0.0f64);
    for _ in 0..1000 {
        let n = rng.random_range(1..=12);
        let segs: Vec<_> = (0..n).map(|_| random_segmentation(&mut rng)).collect();
        let (num, den) = segs.iter().fold((0.0, 0usize), |(num, den), s| match dialog_depth(s) {
            Some(d) => (num + d * s.subconvs.len() as f64, den + s.subconvs.len()),
            None => (num, den),
        });
        match (system_depth(&segs), den) {
            (None, 0) => {}
            (Some(d), den) if den > 0 => {
                let diff = (d - num / den as f64).abs();
                worst = worst.max(diff);
                if diff > 1e-12 {
                    depth_bad += 1;
                }
            }
            _ => depth_bad += 1,
        }
        if let Some(freq) = topic_histogram(&segs, &canonical).frequency {
            if (freq.values().sum::<f64>() - 1.0).abs() > 1e-12 {
                freq_bad += 1;
            }
        }
    }
    let pooled = system_depth(&[lengths(&[2]), lengths(&[3, 5])]);
    let pooled_ok = pooled == Some(10.0 / 3.0);
    outcome(
        depth_bad == 0 && freq_bad == 0 && pooled_ok,
        format!(
            "depth mismatches {depth_bad} (worst {worst:.1e}), frequency-sum failures {freq_bad}, pooled {{2}},{{3,5}} = {pooled:?}"
        ),
    )
}

// 6 --------------------------------------------------------------------------

/// Rank of each value: count of smaller values plus the mean position
/// among equal ones.
fn oracle_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|x| {
            let less = v.iter().filter(|y| *y < x).count() as f64;
            let equal = v.iter().filter(|y| *y == x).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

fn oracle_spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    let (rx, ry) = (oracle_ranks(x), oracle_ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    (vx > 0.0 && vy > 0.0).then(|| cov / (vx * vy).sqrt())
}

fn spearman_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut oracle_bad, mut invariance_bad, mut worst) = (0, 0, 0.0f64);
    for _ in 0..1000 {
        let n = rng.random_range(2..=25);
        let levels = rng.random_range(2..=8);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..50.0f64).round()).collect();
        match (spearman(&x, &y), oracle_spearman(&x, &y)) {
            (Some(a), Some(b)) => {
                worst = worst.max((a - b).abs());
                if (a - b).abs() > 1e-12 {
                    oracle_bad += 1;
                }
            }
            (None, None) => {}
            _ => oracle_bad += 1,
        }
        let cubic: Vec<f64> = x.iter().map(|v| v * v * v + 2.0 * v).collect();
        let expo: Vec<f64> = y.iter().map(|v| (v / 20.0).exp()).collect();
        let base = spearman(&x, &y);
        if spearman(&cubic, &y) != base || spearman(&x, &expo) != base {
            invariance_bad += 1;
        }
    }
    let worked = spearman(&[1.0, 2.0, 2.0, 4.0], &[10.0, 20.0, 30.0, 40.0]).unwrap_or(f64::NAN);
    let worked_ok = (worked - 0.9487).abs() < 1e-4;
    outcome(
        oracle_bad == 0 && invariance_bad == 0 && worked_ok,
        format!(
            "oracle mismatches {oracle_bad} (worst {worst:.1e}), invariance failures {invariance_bad}, ties example {worked:.6}"
        ),
    )
}

// 7 --------------------------------------------------------------------------

const TOPICS: &str = "Music,Sports,Politics,Movies,Science,Food,Travel,Technology";

fn correlate_rows(dir: &Path, seed: u64) -> Result<Vec<(String, String, String)>, String> {
    let bots: Vec<BotProfile> = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.5, 10.0]
        .iter()
        .enumerate()
        .map(|(i, &d)| BotProfile::new(format!("bot{i}"), d))
        .collect();
    let spec = dir.join(format!("spec{seed}.json"));
    std::fs::write(&spec, serde_json::json!({"bots": bots, "convs_per_bot": 60}).to_string()).unwrap();
    let raw = dir.join(format!("d{seed}.jsonl"));
    let labeled = dir.join(format!("d{seed}.labeled.jsonl"));
    let tsv = dir.join(format!("m{seed}.tsv"));
    let seed_arg = seed.to_string();
    let steps: [Vec<&str>; 2] = [
        vec!["synth", "dialogs", "--spec", p(&spec), "--seed", &seed_arg, "--out", p(&raw)],
        vec!["metrics", "--classified", p(&labeled), "--canonical-topics", TOPICS, "--out-tsv", p(&tsv)],
    ];
    for step in &steps {
        let (code, _) = cli(step);
        if code != 0 {
            return Err(format!("{} exited {code}", step[0]));
        }
    }
    let (code, out) = cli(&["correlate", "--metrics-tsv", p(&tsv)]);
    if code != 0 {
        return Err(format!("correlate exited {code}"));
    }
    Ok(out
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[0].to_string(), f[1].to_string(), f[3].to_string())
        })
        .collect())
}

fn end_to_end_validation() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut depth_rhos = Vec::new();
    let mut breadth_rhos = Vec::new();
    for seed in 0..10 {
        match correlate_rows(dir.path(), seed) {
            Ok(rows) => {
                let get = |m: &str| rows.iter().find(|r| r.0 == m).map(|r| r.1.clone()).unwrap_or_default();
                depth_rhos.push(get("depth"));
                breadth_rhos.push(get("breadth_avg").parse::<f64>().unwrap_or(f64::NAN));
            }
            Err(e) => return outcome(false, e),
        }
    }
    let depth_exact = depth_rhos.iter().all(|r| r.parse::<f64>() == Ok(1.0));
    let mean_breadth = breadth_rhos.iter().sum::<f64>() / breadth_rhos.len() as f64;
    outcome(
        depth_exact && mean_breadth.abs() < 0.5,
        format!(
            "rho(D(B)) per seed {depth_rhos:?}; rho(Br_avg) per seed {:?}, mean {mean_breadth:.3}",
            breadth_rhos.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()
        ),
    )
}

// 8 --------------------------------------------------------------------------

fn random_probs(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let sharp = rng.random_range(0.1..8.0);
    let raw: Vec<f64> = (0..k).map(|_| (rng.random::<f64>() * sharp).exp()).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / z).collect()
}

fn ensemble_rule() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut bad, mut ties) = (0, 0);
    for i in 0..1000 {
        let k = rng.random_range(2..=8);
        let labels: Vec<String> = (0..k).map(|j| format!("L{j}")).collect();
        let pa = random_probs(&mut rng, k);
        let pb = match i % 4 {
            0 => pa.clone(),
            1 => vec![1.0 / k as f64; k],
            _ => random_probs(&mut rng, k),
        };
        let pa = if i % 4 == 1 { pb.clone() } else { pa };
        let a = TopicPrediction::from_probs(pa, &labels, "a");
        let b = TopicPrediction::from_probs(pb, &labels, "b");
        let chosen = ensemble_predict(&a, &b, None).unwrap();
        let other = if chosen.source == "a" { &b } else { &a };
        if chosen.normalized_entropy > other.normalized_entropy {
            bad += 1;
        }
        if a.normalized_entropy == b.normalized_entropy {
            ties += 1;
            if chosen.source != "a" {
                bad += 1;
            }
        }
    }
    outcome(bad == 0 && ties >= 250, format!("{bad} violations over 1000 pairs ({ties} exact ties)"))
}

// 9 --------------------------------------------------------------------------

fn serialization_round_trip() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let specs = builtin_topic_specs();
    let train_set = generate_corpus(&specs, 400, 11).unwrap();
    let dev = generate_corpus(&specs, 80, 12).unwrap();
    let arch = Architecture {
        embedding_dim: 24,
        hidden: vec![16],
        length_scaling: true,
    };
    let config = TrainConfig {
        epochs: 3,
        lr: 1e-2,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut problems = Vec::new();
    for kind in [ModelKind::Dan, ModelKind::Adan] {
        let model = train(kind, &train_set.examples, &dev.examples, &arch, &config, None).unwrap().model;
        let path = dir.path().join(format!("{kind}.json"));
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        let mut vocab: Vec<String> = model.vocab().tokens().to_vec();
        vocab.push("zzzunseen".into());
        for _ in 0..100 {
            let n = rng.random_range(1..=12);
            let text = (0..n).map(|_| vocab.choose(&mut rng).unwrap().as_str()).collect::<Vec<_>>().join(" ");
            let (x, y) = (model.predict(&text), loaded.predict(&text));
            let same = x.probs.iter().zip(&y.probs).all(|(u, v)| u.to_bits() == v.to_bits()) && x.topic == y.topic;
            if !same {
                problems.push(format!("{kind}: prediction differs for {text:?}"));
                break;
            }
        }

        let text = std::fs::read_to_string(&path).unwrap();
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let mut corruptions: Vec<(&str, String)> = vec![
            ("truncated", text[..text.len() * 2 / 3].to_string()),
            ("garbage", "\u{1}\u{2}not a model".into()),
            ("empty", String::new()),
        ];
        value["format_version"] = 99.into();
        corruptions.push(("version", value.to_string()));
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["embeddings"].as_array_mut().unwrap().pop();
        corruptions.push(("embedding rows", value.to_string()));
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["output"]["bias"].as_array_mut().unwrap().push(0.5.into());
        corruptions.push(("output bias", value.to_string()));
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["labels"] = serde_json::json!(["only"]);
        corruptions.push(("labels", value.to_string()));
        for (what, body) in corruptions {
            let bad = dir.path().join("bad.json");
            std::fs::write(&bad, body).unwrap();
            if load_model(&bad).is_ok() {
                problems.push(format!("{kind}: {what} corruption accepted"));
            }
        }
        let other = if kind == ModelKind::Dan { ModelKind::Adan } else { ModelKind::Dan };
        if load_model_as(&path, other).is_ok() {
            problems.push(format!("{kind}: loaded as {other}"));
        }
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            "bitwise-equal predictions on 2x100 utterances; 14 corruptions rejected".to_string()
        } else {
            problems.join("; ")
        },
    )
}

// 10 -------------------------------------------------------------------------

fn arithmetic_fixtures() -> Outcome {
    let mut checks = Vec::new();
    let kw = keyword_stream_metrics(["x", "x", "y"]);
    checks.push(("stream [x,x,y]", kw.coverage == 2 && kw.total == 3 && kw.frequency == 1.5));
    let kw = keyword_stream_metrics(["a", "b", "c", "a"]);
    checks.push(("stream [a,b,c,a]", kw.coverage == 3 && kw.total == 4 && kw.frequency == 4.0 / 3.0));

    let mut conv = Conversation::new("c", "b");
    for i in 0..10 {
        let mut bot = Utterance::new(Speaker::Bot, "b").with_topic("Music");
        bot.keywords = match i {
            0 | 1 => vec!["x".into()],
            2 => vec!["y".into()],
            _ => vec![],
        };
        conv.turns.push(Turn {
            index: i + 1,
            user: Utterance::new(Speaker::User, "u").with_topic("Music"),
            bot,
            response_error: Some(i < 3),
        });
    }
    let corpus = keyword_metrics([&conv], Speaker::Bot);
    checks.push(("corpus keywords", corpus.coverage == 2 && corpus.total == 3 && corpus.frequency == 1.5));
    let r = rer([&conv]);
    checks.push(("3/10 errors", r.rer == Some(0.3) && r.annotated_turns == 10));
    conv.turns.push(Turn {
        index: 11,
        user: Utterance::new(Speaker::User, "u"),
        bot: Utterance::new(Speaker::Bot, "b"),
        response_error: None,
    });
    checks.push(("unannotated turn ignored", rer([&conv]).rer == Some(0.3)));
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(
        failed.is_empty(),
        format!("{} fixtures, failed: {failed:?}", checks.len()),
    )
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut record = |name, f: &dyn Fn() -> Outcome| {
        let o = f();
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((name, o));
    };

    record("1 gradient correctness", &gradient_correctness);
    let (classification, trained) = synthetic_classification();
    println!(
        "[{}] 2 synthetic classification: {}",
        if classification.pass { "PASS" } else { "FAIL" },
        classification.detail
    );
    let kw = keyword_recovery(&trained);
    println!("[{}] 3 keyword recovery: {}", if kw.pass { "PASS" } else { "FAIL" }, kw.detail);
    record("4 segmentation oracle", &segmentation_oracle);
    record("5 metric identities", &metric_identities);
    record("6 spearman correctness", &spearman_correctness);
    record("7 end-to-end depth/rating validation", &end_to_end_validation);
    record("8 ensemble rule", &ensemble_rule);
    record("9 serialization round-trip", &serialization_round_trip);
    record("10 RER and keyword arithmetic", &arithmetic_fixtures);
    results.push(("2", classification));
    results.push(("3", kw));

    let failed: HashSet<&str> = results.iter().filter(|r| !r.1.pass).map(|r| r.0).collect();
    println!("acceptance: {}/10 criteria passed", 10 - failed.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
