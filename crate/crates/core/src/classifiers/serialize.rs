use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AdanModel, DanModel, Mlp, ModelKind, TopicModel};
use crate::error::{Error, Result};
use crate::netcore::{DenseLayer, Matrix};
use crate::text::{EmbeddingTable, TokenizerConfig, Vocabulary};

pub const FORMAT_VERSION: u32 = 1;

/// On-disk JSON layout of a classifier.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: u32,
    pub model_type: ModelKind,
    pub name: String,
    pub labels: Vec<String>,
    pub tokenizer: TokenizerConfig,
    pub vocab: Vec<String>,
    pub embeddings: Matrix,
    pub embeddings_trainable: bool,
    pub hidden: Vec<DenseLayer>,
    pub output: DenseLayer,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attention: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_scaling: Option<bool>,
}

impl From<&TopicModel> for ModelFile {
    fn from(model: &TopicModel) -> Self {
        let (attention, length_scaling) = match model {
            TopicModel::Dan(_) => (None, None),
            TopicModel::Adan(m) => (Some(m.attention.clone()), Some(m.length_scaling)),
        };
        let (embeddings, trainable) = match model {
            TopicModel::Dan(m) => (&m.embeddings, m.embeddings.trainable),
            TopicModel::Adan(m) => (&m.embeddings, m.embeddings.trainable),
        };
        ModelFile {
            format_version: FORMAT_VERSION,
            model_type: model.kind(),
            name: model.name().to_string(),
            labels: model.labels().to_vec(),
            tokenizer: model.tokenizer().clone(),
            vocab: model.vocab().tokens().to_vec(),
            embeddings: embeddings.matrix.clone(),
            embeddings_trainable: trainable,
            hidden: model.head().hidden.clone(),
            output: model.head().output.clone(),
            attention,
            length_scaling,
        }
    }
}

impl TryFrom<ModelFile> for TopicModel {
    type Error = Error;

    fn try_from(file: ModelFile) -> Result<Self> {
        if file.format_version != FORMAT_VERSION {
            return Err(Error::Load(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                file.format_version
            )));
        }
        for layer in file.hidden.iter().chain(std::iter::once(&file.output)) {
            if layer.bias.len() != layer.weights.rows() {
                return Err(Error::Load("layer bias length does not match its weights".into()));
            }
        }
        let vocab = Vocabulary::from_tokens(file.vocab)?;
        let embeddings = EmbeddingTable {
            matrix: file.embeddings,
            trainable: file.embeddings_trainable,
        };
        let head = Mlp {
            hidden: file.hidden,
            output: file.output,
        };
        let model: TopicModel = match file.model_type {
            ModelKind::Dan => {
                if file.attention.is_some() {
                    return Err(Error::Load("DAN model file carries an attention table".into()));
                }
                DanModel {
                    name: file.name,
                    labels: file.labels,
                    tokenizer: file.tokenizer,
                    vocab,
                    embeddings,
                    head,
                }
                .into()
            }
            ModelKind::Adan => AdanModel {
                name: file.name,
                labels: file.labels,
                tokenizer: file.tokenizer,
                vocab,
                embeddings,
                attention: file
                    .attention
                    .ok_or_else(|| Error::Load("ADAN model file lacks an attention table".into()))?,
                length_scaling: file.length_scaling.unwrap_or(true),
                head,
            }
            .into(),
        };
        model.validate().map_err(|e| Error::Load(format!("inconsistent model: {e}")))?;
        Ok(model)
    }
}

/// Writes the model as JSON via a temporary file in the target directory.
pub fn save_model(model: &TopicModel, path: &Path) -> Result<()> {
    let file = ModelFile::from(model);
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    serde_json::to_writer(&mut tmp, &file)?;
    tmp.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<TopicModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ModelFile =
        serde_json::from_str(&text).map_err(|e| Error::Load(format!("{}: {e}", path.display())))?;
    TopicModel::try_from(file)
}

/// Like [`load_model`] but insists on a particular model type.
pub fn load_model_as(path: &Path, kind: ModelKind) -> Result<TopicModel> {
    let model = load_model(path)?;
    if model.kind() != kind {
        return Err(Error::Load(format!(
            "model_type mismatch: file holds {}, expected {kind}",
            model.kind()
        )));
    }
    Ok(model)
}
