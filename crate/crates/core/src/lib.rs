//! Supervised, polarity-aware word embeddings.
//!
//! Word vectors `W` (one unit-norm column per vocabulary word) and a logistic
//! classifier `(theta, gamma)` are learned jointly from a labeled document
//! corpus by alternating minimization: an exact convex solve for the
//! classifier, then one epoch of projected SGD with suffix averaging over `W`.
//!
//! The crate is `no_std` (it needs `alloc`). File formats and the command
//! line live in the companion `polarembed` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod corpus;
mod error;
pub mod eval;
pub mod linalg;
pub mod model;
pub mod optimizer;
pub mod spectrum;
pub mod synth;

pub use corpus::{
    build_term_matrix, build_vocabulary, class_costs, stratified_splits, tokenize, ClassCosts,
    DocTermMatrix, Label, LabeledDocument, SparseVector, SplitPair, SplitSet, TermWeighting,
    TrainingSet, Vocabulary, Weighting,
};
pub use error::{Error, Result};
pub use eval::{
    evaluate_splits, evaluate_splits_tuned, evaluate_splits_with, neighbors, precision, roc_auc,
    tune_lambda, Direction, EvalReport, InitialEmbeddings, LambdaScore, LambdaSelection,
    NeighborResult, Precision, SplitMetrics,
};
pub use linalg::{Matrix, Svd};
pub use model::{
    doc_embedding, grad_theta, grad_w_single, log_sigmoid, objective, predict_proba, sigmoid,
    Classifier, EmbeddingMatrix, ModelInputs, RankOneGradient,
};
pub use optimizer::{
    sgd_epoch_w, solve_theta, train, train_with_initial, Dimension, Init, SolverOptions,
    StepSchedule, StopReason, TrainConfig, TrainTrace, TrainedModel,
};
pub use spectrum::{
    effective_rank, effective_rank_of, embeddings_from_lookup, lsa_init, normalize_columns,
    random_unit_columns, EffectiveRankCurve, LsaScaling,
};
pub use synth::{generate_synthetic, SynthConfig};
