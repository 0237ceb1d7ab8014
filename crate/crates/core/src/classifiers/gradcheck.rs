use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AdanModel, DanModel, ModelKind, TopicModel};
use crate::error::Result;
use crate::netcore::{finite_diff_gradcheck, sample_coordinates, Matrix};
use crate::text::{EmbeddingTable, Vocabulary};

#[derive(Debug, Clone)]
pub struct GradcheckOptions {
    pub eps: f64,
    /// Upper bound on checked coordinates per example (never below 200).
    pub max_coords: usize,
    pub seed: u64,
    /// Doubles the analytic output-layer weight gradient. Mutation testing
    /// only: a working checker must flag it.
    pub corrupt: bool,
}

impl Default for GradcheckOptions {
    fn default() -> Self {
        GradcheckOptions {
            eps: 1e-5,
            max_coords: 5000,
            seed: 0,
            corrupt: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GradcheckReport {
    pub max_relative_error: f64,
    pub coordinates_checked: usize,
    /// Worst error per parameter block.
    pub per_block: Vec<(String, f64)>,
}

/// Checks analytic gradients of `model` against central differences on each
/// `(ids, label)` example.
pub fn gradcheck_model(
    model: &TopicModel,
    examples: &[(Vec<usize>, usize)],
    options: &GradcheckOptions,
) -> Result<GradcheckReport> {
    let names = model.block_names();
    let sizes: Vec<usize> = model.param_blocks().iter().map(|b| b.len()).collect();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &n| {
            let start = *acc;
            *acc += n;
            Some(start)
        })
        .collect();
    let total: usize = sizes.iter().sum();
    let flat: Vec<f64> = model.param_blocks().concat();
    let mut per_block = vec![0.0f64; sizes.len()];
    let mut checked = 0;
    let mut work = model.clone();

    for (n, (ids, label)) in examples.iter().enumerate() {
        let mut grads = model.zero_grads();
        model.accumulate_gradients(ids, *label, 1.0, &mut grads)?;
        if options.corrupt {
            let output_weights = grads.len() - 2;
            grads[output_weights].iter_mut().for_each(|g| *g *= 2.0);
        }
        let analytic = grads.concat();
        let coords = sample_coordinates(total, options.max_coords, options.seed.wrapping_add(n as u64));
        checked += coords.len();

        for (b, &start) in offsets.iter().enumerate() {
            let block_coords: Vec<usize> = coords
                .iter()
                .copied()
                .filter(|&c| c >= start && c < start + sizes[b])
                .collect();
            if block_coords.is_empty() {
                continue;
            }
            let err = finite_diff_gradcheck(&flat, &analytic, &block_coords, options.eps, |theta| {
                write_flat(&mut work, theta);
                work.loss(ids, *label).expect("non-empty input")
            });
            per_block[b] = per_block[b].max(err);
        }
    }

    Ok(GradcheckReport {
        max_relative_error: per_block.iter().copied().fold(0.0, f64::max),
        coordinates_checked: checked,
        per_block: names.into_iter().zip(per_block).collect(),
    })
}

fn write_flat(model: &mut TopicModel, theta: &[f64]) {
    let mut offset = 0;
    for block in model.param_blocks_mut() {
        let n = block.len();
        block.copy_from_slice(&theta[offset..offset + n]);
        offset += n;
    }
}

/// Small random model (4 topics, 50 words, 16-d embeddings, one 8-unit
/// hidden layer) with trainable embeddings, plus three random examples.
pub fn random_gradcheck_model(kind: ModelKind, seed: u64) -> (TopicModel, Vec<(Vec<usize>, usize)>) {
    const TOPICS: usize = 4;
    const VOCAB: usize = 50;
    const DIM: usize = 16;
    const HIDDEN: usize = 8;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<String> = (0..TOPICS).map(|k| format!("topic{k}")).collect();
    let tokens: Vec<String> = std::iter::once("<unk>".to_string())
        .chain((1..VOCAB).map(|i| format!("w{i}")))
        .collect();
    let vocab = Vocabulary::from_tokens(tokens).expect("valid synthetic vocabulary");
    let embeddings = EmbeddingTable {
        matrix: Matrix::from_fn(VOCAB, DIM, |_, _| rng.random_range(-0.5..=0.5)),
        trainable: true,
    };

    let model: TopicModel = match kind {
        ModelKind::Dan => DanModel::new("gradcheck", labels, vocab, embeddings, &[HIDDEN], &mut rng).into(),
        ModelKind::Adan => {
            let mut m = AdanModel::new("gradcheck", labels, vocab, embeddings, &[HIDDEN], &mut rng);
            m.attention = Matrix::from_fn(TOPICS, VOCAB, |_, _| rng.random_range(-1.0..=1.0));
            m.into()
        }
    };

    let examples = (0..3)
        .map(|_| {
            let len = rng.random_range(1..=8);
            let ids = (0..len).map(|_| rng.random_range(0..VOCAB)).collect();
            (ids, rng.random_range(0..TOPICS))
        })
        .collect();
    (model, examples)
}
