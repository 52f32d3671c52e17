//! Metrics, the train/test split protocol, cross-validated `λ_θ` selection
//! and cosine-similarity word queries.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Label, LabeledDocument, SplitSet, TrainingSet};
use crate::linalg::dot;
use crate::model::{log_sigmoid, EmbeddingMatrix};
use crate::optimizer::{label_from_proba, train_with_initial, TrainConfig, TrainedModel};
use crate::{Error, Result};

/// Precision at a fixed threshold. `Undefined` when nothing was predicted
/// positive.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Precision {
    Defined(f64),
    Undefined,
}

impl Precision {
    pub fn value(self) -> Option<f64> {
        match self {
            Precision::Defined(v) => Some(v),
            Precision::Undefined => None,
        }
    }
}

/// `tp / (tp + fp)` over the positive predictions.
pub fn precision(predictions: &[Label], labels: &[Label]) -> Result<Precision> {
    if predictions.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            what: "prediction count",
            expected: labels.len(),
            found: predictions.len(),
        });
    }
    let (mut tp, mut fp) = (0usize, 0usize);
    for (p, y) in predictions.iter().zip(labels) {
        if p.is_positive() {
            if y.is_positive() {
                tp += 1;
            } else {
                fp += 1;
            }
        }
    }
    Ok(if tp + fp == 0 {
        Precision::Undefined
    } else {
        Precision::Defined(tp as f64 / (tp + fp) as f64)
    })
}

/// Area under the ROC curve by the trapezoidal rule over distinct score
/// thresholds; tied scores contribute a diagonal segment.
pub fn roc_auc(scores: &[f64], labels: &[Label]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            what: "score count",
            expected: labels.len(),
            found: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite("score"));
    }
    let n_pos = labels.iter().filter(|l| l.is_positive()).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass { n_pos, n_neg });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(Ordering::Equal));

    let (mut tp, mut fp) = (0usize, 0usize);
    let mut area = 0.0;
    let mut i = 0;
    while i < order.len() {
        let (tp0, fp0) = (tp, fp);
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]].is_positive() {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        area += (fp - fp0) as f64 * (tp + tp0) as f64 / 2.0;
    }
    Ok(area / (n_pos as f64 * n_neg as f64))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitMetrics {
    pub split: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub k: usize,
    pub lambda_theta: f64,
    pub precision: Precision,
    pub auc: f64,
    pub outer_iterations: usize,
    pub final_objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub config: TrainConfig,
    pub seed: u64,
    pub splits: Vec<SplitMetrics>,
}

/// Mean and sample standard deviation; `None` for an empty slice.
fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Some((mean, libm::sqrt(var)))
}

impl EvalReport {
    /// Mean and standard deviation of precision over splits where it is defined.
    pub fn precision_summary(&self) -> Option<(f64, f64)> {
        let v: Vec<f64> = self
            .splits
            .iter()
            .filter_map(|s| s.precision.value())
            .collect();
        mean_std(&v)
    }

    pub fn auc_summary(&self) -> Option<(f64, f64)> {
        let v: Vec<f64> = self.splits.iter().map(|s| s.auc).collect();
        mean_std(&v)
    }

    pub fn undefined_precision_count(&self) -> usize {
        self.splits
            .iter()
            .filter(|s| s.precision == Precision::Undefined)
            .count()
    }
}

fn subset(docs: &[LabeledDocument], idx: &[usize]) -> Vec<LabeledDocument> {
    idx.iter().map(|&i| docs[i].clone()).collect()
}

/// Source of `W₀` for each training partition; `None` defers to the config.
pub type InitialEmbeddings<'a> = dyn FnMut(&TrainingSet) -> Result<Option<EmbeddingMatrix>> + 'a;

fn score_documents(model: &TrainedModel, docs: &[LabeledDocument]) -> Result<Vec<f64>> {
    docs.iter()
        .map(|d| {
            let p = model.predict_text(&d.text);
            if p.is_finite() {
                Ok(p)
            } else {
                Err(Error::NonFinite("predicted probability"))
            }
        })
        .collect()
}

fn metrics_for(
    split: usize,
    model: &TrainedModel,
    n_train: usize,
    test: &[LabeledDocument],
) -> Result<SplitMetrics> {
    let probs = score_documents(model, test)?;
    let labels: Vec<Label> = test.iter().map(|d| d.label).collect();
    let preds: Vec<Label> = probs.iter().map(|&p| label_from_proba(p)).collect();
    Ok(SplitMetrics {
        split,
        n_train,
        n_test: test.len(),
        k: model.k(),
        lambda_theta: model.classifier.lambda_theta,
        precision: precision(&preds, &labels)?,
        auc: roc_auc(&probs, &labels)?,
        outer_iterations: model.trace.iterations(),
        final_objective: model.trace.final_objective(),
    })
}

fn run_splits(
    docs: &[LabeledDocument],
    splits: &SplitSet,
    config: &TrainConfig,
    mut pick_lambda: impl FnMut(&[LabeledDocument]) -> Result<f64>,
    initial: &mut InitialEmbeddings<'_>,
) -> Result<EvalReport> {
    let mut out = Vec::with_capacity(splits.pairs.len());
    for (i, pair) in splits.pairs.iter().enumerate() {
        let wrap = |e: Error| Error::Split {
            split: i,
            source: alloc::boxed::Box::new(e),
        };
        let result = (|| {
            let train_docs = subset(docs, &pair.train);
            let test_docs = subset(docs, &pair.test);
            let lambda = pick_lambda(&train_docs)?;
            let cfg = TrainConfig {
                lambda_theta: lambda,
                ..config.clone()
            };
            let set = TrainingSet::from_documents(&train_docs, cfg.weighting)?;
            let w0 = initial(&set)?;
            let model = train_with_initial(&set, &cfg, w0)?;
            metrics_for(i, &model, train_docs.len(), &test_docs)
        })();
        out.push(result.map_err(wrap)?);
    }
    Ok(EvalReport {
        config: config.clone(),
        seed: splits.seed,
        splits: out,
    })
}

/// Trains one model per split on its training partition only and scores the
/// held-out partition. Vocabulary, idf and effective rank never see test text.
pub fn evaluate_splits(
    docs: &[LabeledDocument],
    splits: &SplitSet,
    config: &TrainConfig,
) -> Result<EvalReport> {
    evaluate_splits_with(docs, splits, config, &mut |_| Ok(None))
}

/// [`evaluate_splits`] with a per-partition source for `W₀`.
pub fn evaluate_splits_with(
    docs: &[LabeledDocument],
    splits: &SplitSet,
    config: &TrainConfig,
    initial: &mut InitialEmbeddings<'_>,
) -> Result<EvalReport> {
    run_splits(docs, splits, config, |_| Ok(config.lambda_theta), initial)
}

/// [`evaluate_splits`] with `λ_θ` chosen per split by [`tune_lambda`] on that
/// split's training partition.
pub fn evaluate_splits_tuned(
    docs: &[LabeledDocument],
    splits: &SplitSet,
    config: &TrainConfig,
    grid: &[f64],
    folds: usize,
    initial: &mut InitialEmbeddings<'_>,
) -> Result<EvalReport> {
    let mut split_no = 0u64;
    run_splits(
        docs,
        splits,
        config,
        |train_docs| {
            split_no += 1;
            let seed = splits.seed.wrapping_add(split_no);
            Ok(tune_lambda(train_docs, grid, config, folds, seed)?.best)
        },
        initial,
    )
}

/// One row of the tuning table.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LambdaScore {
    pub lambda_theta: f64,
    pub fold_aucs: Vec<f64>,
    pub mean_auc: f64,
    /// Mean validation cross-entropy; breaks exact AUC ties.
    pub mean_log_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LambdaSelection {
    pub best: f64,
    pub folds: usize,
    pub seed: u64,
    pub table: Vec<LambdaScore>,
}

/// Stratified fold assignment: each class is shuffled and dealt round-robin.
fn stratified_folds(labels: &[Label], folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<usize> = (0..labels.len())
        .filter(|&i| labels[i].is_positive())
        .collect();
    let mut neg: Vec<usize> = (0..labels.len())
        .filter(|&i| !labels[i].is_positive())
        .collect();
    if pos.len() < folds || neg.len() < folds {
        return Err(Error::InvalidSplit(alloc::format!(
            "{folds} folds need at least {folds} documents per class, found {} positive and {} negative",
            pos.len(),
            neg.len()
        )));
    }
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let mut out = vec![Vec::new(); folds];
    for (r, &i) in pos.iter().enumerate() {
        out[r % folds].push(i);
    }
    for (r, &i) in neg.iter().enumerate() {
        out[r % folds].push(i);
    }
    for f in &mut out {
        f.sort_unstable();
    }
    Ok(out)
}

/// Stratified `folds`-fold cross-validation over `docs` (a training partition)
/// for every `λ_θ` in `grid`. Selects the highest mean validation AUC;
/// exact ties go to the lower validation cross-entropy, then to grid order.
pub fn tune_lambda(
    docs: &[LabeledDocument],
    grid: &[f64],
    config: &TrainConfig,
    folds: usize,
    seed: u64,
) -> Result<LambdaSelection> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig(String::from("lambda grid is empty")));
    }
    if let Some(bad) = grid.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
        return Err(Error::InvalidConfig(alloc::format!(
            "lambda {bad} must be finite and nonnegative"
        )));
    }
    if folds < 2 {
        return Err(Error::InvalidSplit(String::from(
            "cross-validation needs at least 2 folds",
        )));
    }
    let labels: Vec<Label> = docs.iter().map(|d| d.label).collect();
    let assignment = stratified_folds(&labels, folds, seed)?;

    let mut parts = Vec::with_capacity(folds);
    for held in &assignment {
        let train_idx: Vec<usize> = (0..docs.len())
            .filter(|i| held.binary_search(i).is_err())
            .collect();
        let set = TrainingSet::from_documents(&subset(docs, &train_idx), config.weighting)?;
        parts.push((set, subset(docs, held)));
    }

    let mut table = Vec::with_capacity(grid.len());
    for &lambda in grid {
        let cfg = TrainConfig {
            lambda_theta: lambda,
            ..config.clone()
        };
        let mut fold_aucs = Vec::with_capacity(folds);
        let mut loss = 0.0;
        for (set, valid) in &parts {
            let model = train_with_initial(set, &cfg, None)?;
            let probs = score_documents(&model, valid)?;
            let vl: Vec<Label> = valid.iter().map(|d| d.label).collect();
            fold_aucs.push(roc_auc(&probs, &vl)?);
            let ce: f64 = valid
                .iter()
                .map(|d| {
                    let phi = model.weights_for(&d.text);
                    let s = model
                        .classifier
                        .score(&crate::model::embed_sparse(model.embeddings.matrix(), &phi));
                    -log_sigmoid(d.label.sign() * s)
                })
                .sum();
            loss += ce / valid.len() as f64;
        }
        let mean_auc = fold_aucs.iter().sum::<f64>() / folds as f64;
        table.push(LambdaScore {
            lambda_theta: lambda,
            fold_aucs,
            mean_auc,
            mean_log_loss: loss / folds as f64,
        });
    }

    let mut best = 0;
    for (i, row) in table.iter().enumerate().skip(1) {
        let b = &table[best];
        if row.mean_auc > b.mean_auc
            || (row.mean_auc == b.mean_auc && row.mean_log_loss < b.mean_log_loss)
        {
            best = i;
        }
    }
    Ok(LambdaSelection {
        best: table[best].lambda_theta,
        folds,
        seed,
        table,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Nearest,
    Farthest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborResult {
    pub query: String,
    pub direction: Direction,
    /// `(word, cosine similarity)`, most similar first for `Nearest` and
    /// least similar first for `Farthest`.
    pub ranked: Vec<(String, f64)>,
}

fn levenshtein(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = (up + 1).min(row[j] + 1).min(diag + usize::from(ca != cb));
            diag = up;
        }
    }
    row[b.len()]
}

/// Vocabulary words within edit distance 2 of `query`, closest first, at most five.
fn near_misses(model: &TrainedModel, query: &str) -> Vec<String> {
    let mut c: Vec<(usize, &String)> = model
        .vocab
        .words()
        .iter()
        .map(|w| (levenshtein(query, w), w))
        .filter(|(d, _)| *d <= 2)
        .collect();
    c.sort();
    c.into_iter().take(5).map(|(_, w)| w.clone()).collect()
}

/// Ranks every other vocabulary word by cosine similarity to `query`.
/// Columns are unit norm, so similarity is their dot product clamped to
/// `[-1, 1]`. Ties keep vocabulary order.
pub fn neighbors(
    model: &TrainedModel,
    query: &str,
    top_n: usize,
    direction: Direction,
) -> Result<NeighborResult> {
    let q = model
        .vocab
        .get(query)
        .ok_or_else(|| Error::OutOfVocabulary {
            query: String::from(query),
            suggestions: near_misses(model, query),
        })?;
    let w = &model.embeddings;
    let qv = w.column(q);
    let mut sims: Vec<(usize, f64)> = (0..w.n_words())
        .filter(|&j| j != q)
        .map(|j| (j, dot(qv, w.column(j)).clamp(-1.0, 1.0)))
        .collect();
    match direction {
        Direction::Nearest => sims.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal)),
        Direction::Farthest => {
            sims.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
        }
    }
    sims.truncate(top_n);
    Ok(NeighborResult {
        query: String::from(query),
        direction,
        ranked: sims
            .into_iter()
            .map(|(j, s)| (String::from(model.vocab.word(j)), s))
            .collect(),
    })
}
