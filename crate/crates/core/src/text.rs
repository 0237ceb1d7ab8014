//! Tokenization, vocabularies and word embedding tables.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcore::Matrix;

pub const UNK: &str = "<unk>";
pub const UNK_ID: usize = 0;

/// Range of the uniform initializer for rows not covered by a pretrained file.
pub const OOV_INIT_RANGE: f64 = 0.1;

/// Lowercases, splits on whitespace and trims every piece down to its
/// letter/digit/apostrophe core. Empty pieces are dropped.
pub fn tokenize(raw: &str) -> Vec<String> {
    raw.to_lowercase()
        .split_whitespace()
        .filter_map(|piece| {
            let trimmed = piece.trim_matches(|c: char| !is_token_char(c));
            (!trimmed.is_empty()).then(|| trimmed.to_string())
        })
        .collect()
}

fn is_token_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\''
}

/// Settings recorded alongside a model so that prediction tokenizes the same
/// way training did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub kind: String,
    pub lowercase: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            kind: "whitespace-strip-punct".to_string(),
            lowercase: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds a vocabulary from tokenized utterances. Tokens seen at least
    /// `min_count` times are kept, most frequent first, ties in lexicographic
    /// order. `<unk>` always takes id 0.
    pub fn build<S: AsRef<str>>(corpus: &[Vec<S>], min_count: usize) -> Self {
        let min_count = min_count.max(1);
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for utterance in corpus {
            for token in utterance {
                let token = token.as_ref();
                if token != UNK {
                    *counts.entry(token).or_default() += 1;
                }
            }
        }
        let mut kept: Vec<(&str, usize)> =
            counts.into_iter().filter(|&(_, c)| c >= min_count).collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

        let tokens = std::iter::once(UNK.to_string())
            .chain(kept.into_iter().map(|(t, _)| t.to_string()))
            .collect();
        Self::from_tokens(tokens).expect("freshly built vocabulary is valid")
    }

    /// Reconstructs a vocabulary from its ordered token list (as stored in a
    /// model file).
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        if tokens.first().map(String::as_str) != Some(UNK) {
            return Err(Error::Load(format!("vocabulary must start with {UNK}")));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if t.is_empty() || t.chars().any(char::is_whitespace) {
                return Err(Error::Load(format!("invalid vocabulary token {t:?}")));
            }
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::Load(format!("duplicate vocabulary token {t:?}")));
            }
        }
        Ok(Vocabulary { tokens, index })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }

    pub fn unk_id(&self) -> usize {
        UNK_ID
    }

    /// Maps tokens to ids; unknown tokens map to the `<unk>` id.
    pub fn lookup<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<usize> {
        tokens
            .iter()
            .map(|t| self.id(t.as_ref()).unwrap_or(UNK_ID))
            .collect()
    }
}

/// `|V| x D` word embedding matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub matrix: Matrix,
    pub trainable: bool,
}

impl EmbeddingTable {
    /// Every row drawn uniformly from `[-0.1, 0.1]`.
    pub fn random(vocab_size: usize, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let matrix = Matrix::from_fn(vocab_size, dim, |_, _| {
            rng.random_range(-OOV_INIT_RANGE..=OOV_INIT_RANGE)
        });
        EmbeddingTable {
            matrix,
            trainable: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn row(&self, id: usize) -> &[f64] {
        self.matrix.row(id)
    }
}

/// Loads a GloVe-style text file (`token f1 f2 ... fD` per line) into a table
/// aligned with `vocab`. Vocabulary tokens missing from the file, `<unk>`
/// included, get seeded uniform rows in `[-0.1, 0.1]`.
pub fn load_embeddings(
    path: &Path,
    vocab: &Vocabulary,
    dim: usize,
    seed: u64,
) -> Result<EmbeddingTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut table = EmbeddingTable::random(vocab.len(), dim, seed);
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(' ').filter(|f| !f.is_empty());
        let token = fields.next().unwrap_or_default();
        let values = fields
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: format!("bad float: {e}"),
            })?;
        if values.len() != dim {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: format!("expected {dim} floats, found {}", values.len()),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: "non-finite value".to_string(),
            });
        }
        if let Some(id) = vocab.id(token) {
            table.matrix.row_mut(id).copy_from_slice(&values);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn tokenize_examples() {
        assert_eq!(
            tokenize("Let's talk about music"),
            vec!["let's", "talk", "about", "music"]
        );
        assert!(tokenize("").is_empty());
        assert_eq!(
            tokenize("Who is pitching for the Red Sox?"),
            vec!["who", "is", "pitching", "for", "the", "red", "sox"]
        );
        assert!(tokenize("  ?! ... ").is_empty());
    }

    #[test]
    fn build_vocab_examples() {
        let v = Vocabulary::build(&[vec!["a", "b"], vec!["a"]], 2);
        assert_eq!(v.tokens(), ["<unk>", "a"]);

        let empty: Vec<Vec<&str>> = vec![];
        assert_eq!(Vocabulary::build(&empty, 1).tokens(), ["<unk>"]);

        let v = Vocabulary::build(&[vec!["x", "y"], vec!["y", "x"], vec!["z"]], 1);
        assert_eq!(v.tokens(), ["<unk>", "x", "y", "z"]);
    }

    #[test]
    fn lookup_examples() {
        let v = Vocabulary::build(&[vec!["music", "a"]], 1);
        let music = v.id("music").unwrap();
        assert_eq!(v.lookup(&["music", "qqqxyz"]), vec![music, UNK_ID]);
        assert!(v.lookup::<&str>(&[]).is_empty());
        let a = v.id("a").unwrap();
        assert_eq!(v.lookup(&["a", "a"]), vec![a, a]);
    }

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_embeddings_copies_and_fills() {
        let f = write_tmp("music 0.1 0.2 -0.3\nother 1 2 3\n");
        let vocab = Vocabulary::build(&[vec!["music", "absent"]], 1);
        let t = load_embeddings(f.path(), &vocab, 3, 7).unwrap();
        assert_eq!(t.rows(), vocab.len());
        assert_eq!(t.row(vocab.id("music").unwrap()), &[0.1, 0.2, -0.3]);
        for id in [UNK_ID, vocab.id("absent").unwrap()] {
            assert!(t.row(id).iter().all(|v| v.abs() <= 0.1));
        }
        let again = load_embeddings(f.path(), &vocab, 3, 7).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn load_embeddings_rejects_wrong_width() {
        let f = write_tmp("a 0.1 0.2 0.3\nb 0.1 0.2\n");
        let vocab = Vocabulary::build(&[vec!["a", "b"]], 1);
        match load_embeddings(f.path(), &vocab, 3, 0) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        // dimension disagreement with the whole file
        assert!(load_embeddings(f.path(), &vocab, 4, 0).is_err());
    }

    #[test]
    fn vocab_from_tokens_validates() {
        assert!(Vocabulary::from_tokens(vec!["a".into()]).is_err());
        assert!(Vocabulary::from_tokens(vec![UNK.into(), "a".into(), "a".into()]).is_err());
        assert!(Vocabulary::from_tokens(vec![UNK.into(), "a b".into()]).is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn tokenize_is_idempotent(s in "\\PC{0,60}") {
                let once = tokenize(&s);
                let twice = tokenize(&once.join(" "));
                prop_assert_eq!(once, twice);
            }

            #[test]
            fn lookup_preserves_length(s in "[a-z ?!.']{0,60}") {
                let toks = tokenize(&s);
                let vocab = Vocabulary::build(std::slice::from_ref(&toks), 2);
                prop_assert_eq!(vocab.lookup(&toks).len(), toks.len());
                for t in &toks {
                    prop_assert!(!t.chars().any(char::is_whitespace));
                    prop_assert_eq!(t.to_lowercase(), t.clone());
                }
            }
        }
    }
}
