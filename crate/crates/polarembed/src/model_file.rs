//! Trained model as a TOML document: classifier, vocabulary, term weighting,
//! one embedding row per word, the training configuration and trace.

use anyhow::{bail, ensure, Context, Result};
use polarembed_core::{
    Classifier, EmbeddingMatrix, Matrix, TermWeighting, TrainConfig, TrainTrace, TrainedModel,
    Vocabulary,
};
use serde::{Deserialize, Serialize};

const FORMAT_VERSION: u32 = 1;

// Plain values precede tables so the document serializes in field order.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    k: usize,
    gamma: f64,
    lambda_theta: f64,
    theta: Vec<f64>,
    vocabulary: Vec<String>,
    /// `embeddings[j]` is the unit vector of `vocabulary[j]`.
    embeddings: Vec<Vec<f64>>,
    weighting: TermWeighting,
    config: TrainConfig,
    trace: TrainTrace,
}

/// Serializes `model` after a comment `header`.
pub fn model_to_string(model: &TrainedModel, header: &str) -> Result<String> {
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        k: model.k(),
        gamma: model.classifier.gamma,
        lambda_theta: model.classifier.lambda_theta,
        theta: model.classifier.theta.clone(),
        vocabulary: model.vocab.words().to_vec(),
        embeddings: (0..model.embeddings.n_words())
            .map(|j| model.embeddings.column(j).to_vec())
            .collect(),
        weighting: model.weighting.clone(),
        config: model.config.clone(),
        trace: model.trace.clone(),
    };
    let body = toml::to_string(&file).context("cannot serialize model")?;
    Ok(format!("{header}{body}"))
}

pub fn model_from_str(text: &str) -> Result<TrainedModel> {
    let f: ModelFile = toml::from_str(text).context("malformed model file")?;
    if f.format_version != FORMAT_VERSION {
        bail!("unsupported model format version {}", f.format_version);
    }
    ensure!(
        f.theta.len() == f.k,
        "theta has {} entries, expected k = {}",
        f.theta.len(),
        f.k
    );
    ensure!(
        f.embeddings.len() == f.vocabulary.len(),
        "{} embedding rows for {} vocabulary words",
        f.embeddings.len(),
        f.vocabulary.len()
    );
    if let Some((j, row)) = f
        .embeddings
        .iter()
        .enumerate()
        .find(|(_, r)| r.len() != f.k)
    {
        bail!(
            "embedding row {j} has {} values, expected {}",
            row.len(),
            f.k
        );
    }
    if let Some(idf) = &f.weighting.idf {
        ensure!(
            idf.len() == f.vocabulary.len(),
            "idf has {} entries for {} words",
            idf.len(),
            f.vocabulary.len()
        );
    }
    let vocab = Vocabulary::from_words(f.vocabulary)?;
    let embeddings = EmbeddingMatrix::from_unit_columns(Matrix::from_columns(f.k, &f.embeddings))?;
    Ok(TrainedModel {
        vocab,
        weighting: f.weighting,
        embeddings,
        classifier: Classifier {
            theta: f.theta,
            gamma: f.gamma,
            lambda_theta: f.lambda_theta,
        },
        config: f.config,
        trace: f.trace,
    })
}
