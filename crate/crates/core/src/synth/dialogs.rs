use std::collections::{HashMap, HashSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use super::builtin::{builtin_topic_specs, PHATIC_PHRASES};
use super::corpus::utterance;
use super::{validate_specs, TopicSpec};
use crate::dialog::{Conversation, Speaker, SubConversation, Turn, Utterance, PHATIC};
use crate::error::{Error, Result};

const MIN_RUN: usize = 2;
const MAX_RUN: usize = 10;

/// How a conversation's rating is derived. Ratings are clamped to [1, 5].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RatingRule {
    /// `intercept + slope * D(B)` on the bot's realized pooled depth, shared
    /// by all of its conversations.
    DepthLinear { intercept: f64, slope: f64 },
    /// `intercept + slope * D(C)` per conversation.
    DialogDepthLinear { intercept: f64, slope: f64 },
    /// Independent uniform draw from [1, 5].
    Uniform,
    Fixed { value: f64 },
}

impl Default for RatingRule {
    /// Maps depths 2..=10 linearly onto ratings 1..=5.
    fn default() -> Self {
        RatingRule::DepthLinear {
            intercept: 0.0,
            slope: 0.5,
        }
    }
}

fn default_max_segments() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BotProfile {
    pub bot_id: String,
    /// Target mean sub-conversation length, in [2, 10].
    pub target_depth: f64,
    /// Probability of opening another sub-conversation after each one.
    pub switch_prob: f64,
    /// Rate of fully-Phatic turns and of Phatic user acknowledgements.
    pub phatic_prob: f64,
    /// Probability that a bot keyword repeats one the bot already used on
    /// that topic.
    pub keyword_repetition: f64,
    #[serde(default)]
    pub rating: RatingRule,
    #[serde(default = "default_max_segments")]
    pub max_segments: usize,
    /// When set, every turn is annotated with a response error drawn at
    /// this rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_prob: Option<f64>,
}

impl BotProfile {
    pub fn new(bot_id: impl Into<String>, target_depth: f64) -> Self {
        BotProfile {
            bot_id: bot_id.into(),
            target_depth,
            switch_prob: 0.5,
            phatic_prob: 0.1,
            keyword_repetition: 0.0,
            rating: RatingRule::default(),
            max_segments: default_max_segments(),
            error_prob: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Config(format!("bot {}: {m}", self.bot_id)));
        if self.bot_id.is_empty() {
            return Err(Error::Config("empty bot_id".into()));
        }
        let probs = [
            ("switch_prob", Some(self.switch_prob)),
            ("phatic_prob", Some(self.phatic_prob)),
            ("keyword_repetition", Some(self.keyword_repetition)),
            ("error_prob", self.error_prob),
        ];
        for (name, p) in probs {
            if let Some(p) = p {
                if !(0.0..=1.0).contains(&p) {
                    return err(format!("{name} = {p} outside [0, 1]"));
                }
            }
        }
        if !(MIN_RUN as f64..=MAX_RUN as f64).contains(&self.target_depth) {
            return err(format!("target_depth {} outside [{MIN_RUN}, {MAX_RUN}]", self.target_depth));
        }
        if self.max_segments == 0 {
            return err("max_segments must be positive".into());
        }
        match self.rating {
            RatingRule::DepthLinear { intercept, slope } | RatingRule::DialogDepthLinear { intercept, slope }
                if !(intercept.is_finite() && slope.is_finite()) =>
            {
                err("non-finite rating coefficients".into())
            }
            RatingRule::Fixed { value } if !(1.0..=5.0).contains(&value) => err(format!("fixed rating {value} outside [1, 5]")),
            _ => Ok(()),
        }
    }
}

fn builtin_topics() -> Vec<TopicSpec> {
    builtin_topic_specs()
}

fn default_convs_per_bot() -> usize {
    50
}

/// Dialog generator input file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogSpec {
    #[serde(default = "builtin_topics")]
    pub topics: Vec<TopicSpec>,
    pub bots: Vec<BotProfile>,
    #[serde(default = "default_convs_per_bot")]
    pub convs_per_bot: usize,
}

/// Ground-truth segmentation of one generated conversation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConversationTruth {
    pub id: String,
    pub bot_id: String,
    pub rating: f64,
    pub turn_topics: Vec<String>,
    pub subconvs: Vec<SubConversation>,
    pub l_c: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthDialogs {
    /// Conversations with ground-truth topics and planted keywords filled in.
    pub conversations: Vec<Conversation>,
    pub truth: Vec<ConversationTruth>,
}

/// Run length: 2 + geometric, truncated to [2, 10] by rejection, with the
/// untruncated mean at the target.
fn run_length<R: Rng>(target: f64, rng: &mut R) -> usize {
    if target <= MIN_RUN as f64 {
        return MIN_RUN;
    }
    let geo = Geometric::new(1.0 / (target - 1.0)).expect("target validated");
    loop {
        let extra = geo.sample(rng);
        if extra <= (MAX_RUN - MIN_RUN) as u64 {
            return MIN_RUN + extra as usize;
        }
    }
}

fn phatic<R: Rng>(speaker: Speaker, rng: &mut R) -> Utterance {
    Utterance::new(speaker, *PHATIC_PHRASES.choose(rng).expect("non-empty")).with_topic(PHATIC)
}

struct BotState<'a> {
    profile: &'a BotProfile,
    specs: &'a [TopicSpec],
    used: HashMap<usize, Vec<String>>,
}

impl BotState<'_> {
    fn conversation(&mut self, id: String, rng: &mut ChaCha8Rng) -> (Conversation, ConversationTruth) {
        let p = self.profile;
        let mut conv = Conversation::new(id.clone(), p.bot_id.clone());
        let mut subconvs = Vec::new();
        let mut prev: Option<usize> = None;

        let push = |conv: &mut Conversation, user: Utterance, bot: Utterance, rng: &mut ChaCha8Rng| {
            let response_error = p.error_prob.map(|e| rng.random_bool(e));
            let index = conv.turns.len() + 1;
            conv.turns.push(Turn {
                index,
                user,
                bot,
                response_error,
            });
            index
        };

        for _ in 0..p.max_segments {
            let choices: Vec<usize> = (0..self.specs.len()).filter(|&t| Some(t) != prev).collect();
            let topic = *choices.choose(rng).expect("at least two topics");
            let spec = &self.specs[topic];
            let len = run_length(p.target_depth, rng);
            let mut indices = Vec::with_capacity(len);
            for j in 0..len {
                if rng.random_bool(p.phatic_prob) {
                    let (u, b) = (phatic(Speaker::User, rng), phatic(Speaker::Bot, rng));
                    push(&mut conv, u, b, rng);
                }
                let user = if j > 0 && rng.random_bool(p.phatic_prob) {
                    phatic(Speaker::User, rng)
                } else {
                    let (text, kws) = utterance(spec, rng, |r| spec.keywords.choose(r).expect("validated").clone());
                    let mut u = Utterance::new(Speaker::User, text).with_topic(&spec.name);
                    u.keywords = kws;
                    u
                };
                let used = self.used.entry(topic).or_default();
                let (text, kws) = utterance(spec, rng, |r| {
                    let kw = if !used.is_empty() && r.random_bool(p.keyword_repetition) {
                        used.choose(r).expect("non-empty").clone()
                    } else {
                        spec.keywords.choose(r).expect("validated").clone()
                    };
                    if !used.contains(&kw) {
                        used.push(kw.clone());
                    }
                    kw
                });
                let mut bot = Utterance::new(Speaker::Bot, text).with_topic(&spec.name);
                bot.keywords = kws;
                indices.push(push(&mut conv, user, bot, rng));
            }
            subconvs.push(SubConversation {
                topic: spec.name.clone(),
                l_s: indices.len(),
                turn_indices: indices,
            });
            prev = Some(topic);
            if !rng.random_bool(p.switch_prob) {
                break;
            }
        }
        if rng.random_bool(p.phatic_prob) {
            let (u, b) = (phatic(Speaker::User, rng), phatic(Speaker::Bot, rng));
            push(&mut conv, u, b, rng);
        }

        let turn_topics: Vec<String> = conv
            .turns
            .iter()
            .map(|t| t.bot.topic.clone().expect("generated with topics"))
            .collect();
        let l_c = turn_topics.iter().filter(|t| *t != PHATIC).count();
        let truth = ConversationTruth {
            id,
            bot_id: p.bot_id.clone(),
            rating: 0.0,
            turn_topics,
            subconvs,
            l_c,
        };
        (conv, truth)
    }
}

fn mean_depth(subconvs: &[&SubConversation]) -> f64 {
    if subconvs.is_empty() {
        return 0.0;
    }
    subconvs.iter().map(|s| s.l_s).sum::<usize>() as f64 / subconvs.len() as f64
}

/// Generates `convs_per_bot` conversations per profile. Each bot draws from
/// its own ChaCha stream of `seed`, so bots can be generated independently.
pub fn generate_conversations(
    topics: &[TopicSpec],
    profiles: &[BotProfile],
    convs_per_bot: usize,
    seed: u64,
) -> Result<SynthDialogs> {
    validate_specs(topics)?;
    let mut seen = HashSet::new();
    for p in profiles {
        p.validate()?;
        if !seen.insert(p.bot_id.as_str()) {
            return Err(Error::Config(format!("duplicate bot_id {}", p.bot_id)));
        }
    }

    let mut conversations = Vec::with_capacity(profiles.len() * convs_per_bot);
    let mut truth = Vec::with_capacity(profiles.len() * convs_per_bot);
    for (b, profile) in profiles.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let mut state = BotState {
            profile,
            specs: topics,
            used: HashMap::new(),
        };
        let (mut convs, mut truths): (Vec<_>, Vec<_>) = (0..convs_per_bot)
            .map(|i| state.conversation(format!("{}-{i:04}", profile.bot_id), &mut rng))
            .unzip();

        let pooled: Vec<&SubConversation> = truths.iter().flat_map(|t| &t.subconvs).collect();
        let system_depth = mean_depth(&pooled);
        for (conv, t) in convs.iter_mut().zip(truths.iter_mut()) {
            let raw = match profile.rating {
                RatingRule::DepthLinear { intercept, slope } => intercept + slope * system_depth,
                RatingRule::DialogDepthLinear { intercept, slope } => {
                    intercept + slope * mean_depth(&t.subconvs.iter().collect::<Vec<_>>())
                }
                RatingRule::Uniform => rng.random_range(1.0..=5.0),
                RatingRule::Fixed { value } => value,
            };
            let rating = raw.clamp(1.0, 5.0);
            conv.rating = Some(rating);
            t.rating = rating;
        }
        conversations.append(&mut convs);
        truth.append(&mut truths);
    }
    Ok(SynthDialogs { conversations, truth })
}

/// Copy of a conversation with topics, keywords and classifier output
/// removed, as a raw transcript.
pub fn strip_labels(conv: &Conversation) -> Conversation {
    let mut out = conv.clone();
    for turn in &mut out.turns {
        for u in [&mut turn.user, &mut turn.bot] {
            *u = Utterance::new(u.speaker, std::mem::take(&mut u.text));
        }
    }
    out
}
