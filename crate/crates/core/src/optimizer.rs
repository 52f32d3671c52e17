//! Alternating minimization: a convex solve for the classifier, then one
//! projected SGD epoch over the word vectors with suffix averaging.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{
    class_costs, Label, SparseVector, TermWeighting, TrainingSet, Vocabulary, Weighting,
};
use crate::linalg::{axpy, cholesky_solve, dot, norm2, Matrix};
use crate::model::{
    data_term, embed_all, embed_sparse, grad_theta_cached, objective, regularizer, sigmoid,
    Classifier, EmbeddingMatrix, ModelInputs,
};
use crate::spectrum::{effective_rank, lsa_init, random_unit_columns, LsaScaling};
use crate::{Error, Result};

/// Embedding dimension: fixed, or the effective rank of `Φ` at `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Dimension {
    Fixed(usize),
    Auto { epsilon: f64 },
}

/// How `W₀` is obtained.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Init {
    Lsa(LsaScaling),
    /// Vectors read from an embedding file; the caller resolves the path and
    /// passes the matrix to [`train_with_initial`].
    File(String),
    /// Seeded uniform unit columns.
    Random,
}

/// Step size for SGD step `t` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StepSchedule {
    /// `η_t = η₀ / t`.
    #[default]
    Harmonic,
    /// `η ← η / t` after every step, i.e. `η_t = η₀ / (t − 1)!`. Kept for
    /// comparison only.
    LiteralFactorial,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverOptions {
    /// Stop once `‖∇_{θ,γ} J‖_∞` is at most this.
    pub tolerance: f64,
    pub max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-8,
            max_iters: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub dimension: Dimension,
    pub lambda_theta: f64,
    pub eta0: f64,
    pub tau: usize,
    pub max_outer_iters: usize,
    pub convergence_tol: f64,
    pub seed: u64,
    pub init: Init,
    pub weighting: Weighting,
    pub solver: SolverOptions,
    pub schedule: StepSchedule,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dimension: Dimension::Auto { epsilon: 0.3 },
            lambda_theta: 0.01,
            eta0: 0.1,
            tau: 50,
            max_outer_iters: 50,
            convergence_tol: 1e-5,
            seed: 0,
            init: Init::Lsa(LsaScaling::Unscaled),
            weighting: Weighting::Tf,
            solver: SolverOptions::default(),
            schedule: StepSchedule::Harmonic,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(String::from(m)));
        if !(self.eta0.is_finite() && self.eta0 > 0.0) {
            return bad("eta0 must be positive");
        }
        if self.tau == 0 {
            return bad("tau must be at least 1");
        }
        if self.max_outer_iters == 0 {
            return bad("the iteration count must be at least 1");
        }
        if self.convergence_tol.is_nan() || self.convergence_tol <= 0.0 {
            return bad("convergence tolerance must be positive");
        }
        if !(self.lambda_theta.is_finite() && self.lambda_theta >= 0.0) {
            return bad("lambda_theta must be finite and nonnegative");
        }
        if self.solver.tolerance.is_nan()
            || self.solver.tolerance <= 0.0
            || self.solver.max_iters == 0
        {
            return bad("solver tolerance and iteration cap must be positive");
        }
        match self.dimension {
            Dimension::Fixed(0) => bad("k must be at least 1"),
            Dimension::Auto { epsilon } if !(0.0..=1.0).contains(&epsilon) => {
                Err(Error::InvalidEpsilon(epsilon))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StopReason {
    /// `|J_t − J_{t−1}|` fell to the tolerance.
    Converged,
    /// The outer iteration cap was reached.
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainTrace {
    /// `J(0, W₀)` before the first outer iteration.
    pub initial_objective: f64,
    /// `J(θ_t, W_t)` after each outer iteration.
    pub objectives: Vec<f64>,
    /// Largest column-norm deviation of `W_t` from 1 after each outer iteration.
    pub norm_deviations: Vec<f64>,
    pub stop: StopReason,
}

impl TrainTrace {
    pub fn iterations(&self) -> usize {
        self.objectives.len()
    }

    pub fn converged(&self) -> bool {
        self.stop == StopReason::Converged
    }

    pub fn final_objective(&self) -> f64 {
        *self.objectives.last().unwrap_or(&self.initial_objective)
    }
}

/// Learned vocabulary, weighting, embeddings and classifier.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub vocab: Vocabulary,
    pub weighting: TermWeighting,
    pub embeddings: EmbeddingMatrix,
    pub classifier: Classifier,
    pub config: TrainConfig,
    pub trace: TrainTrace,
}

impl TrainedModel {
    pub fn k(&self) -> usize {
        self.embeddings.k()
    }

    /// Weight vector for a raw text; out-of-vocabulary tokens are ignored.
    pub fn weights_for(&self, text: &str) -> SparseVector {
        self.weighting
            .weigh(&crate::corpus::tokenize(text), &self.vocab)
    }

    /// `σ(θᵀWφ + γ)` for a weight vector over this model's vocabulary.
    pub fn predict_proba(&self, phi: &SparseVector) -> Result<f64> {
        crate::model::predict_proba(&self.classifier, &self.embeddings, phi)
    }

    /// Probability for raw text. A document with no known token scores `σ(γ)`.
    pub fn predict_text(&self, text: &str) -> f64 {
        let phi = self.weights_for(text);
        sigmoid(
            self.classifier
                .score(&embed_sparse(self.embeddings.matrix(), &phi)),
        )
    }
}

/// Minimizes `J(·, W)` over `(θ, γ)` by damped Newton iterations with a
/// backtracking line search, starting from `warm_start`.
///
/// Every accepted step decreases `J`, so the result never scores worse than
/// the warm start.
pub fn solve_theta(
    w: &EmbeddingMatrix,
    inputs: &ModelInputs<'_>,
    lambda_theta: f64,
    warm_start: &Classifier,
    opts: &SolverOptions,
) -> Result<Classifier> {
    if warm_start.k() != w.k() {
        return Err(Error::DimensionMismatch {
            what: "classifier dimension",
            expected: w.k(),
            found: warm_start.k(),
        });
    }
    let docs = embed_all(w, inputs.phi);
    let eval = |c: &Classifier| data_term(c, &docs, inputs) + regularizer(c);
    let k = w.k();
    let n = inputs.n_docs() as f64;

    let mut clf = warm_start.clone();
    clf.lambda_theta = lambda_theta;
    let mut f = eval(&clf);
    if !f.is_finite() {
        return Err(Error::NonFinite("objective"));
    }

    for _ in 0..opts.max_iters {
        let (g_theta, g_gamma) = grad_theta_cached(&clf, &docs, inputs);
        let mut g = g_theta;
        g.push(g_gamma);
        let gnorm = g.iter().fold(0.0f64, |m, x| m.max(libm::fabs(*x)));
        if !gnorm.is_finite() {
            return Err(Error::NonFinite("gradient"));
        }
        if gnorm <= opts.tolerance {
            break;
        }

        let mut hess = Matrix::zeros(k + 1, k + 1);
        let mut x = vec![0.0; k + 1];
        for (d, &y) in docs.iter().zip(inputs.labels) {
            let s = clf.score(d);
            let c = inputs.costs.for_label(y) * sigmoid(s) * sigmoid(-s) / n;
            if c == 0.0 {
                continue;
            }
            x[..k].copy_from_slice(d);
            x[k] = 1.0;
            for b in 0..=k {
                let xb = c * x[b];
                axpy(xb, &x, hess.column_mut(b));
            }
        }
        for r in 0..k {
            hess[(r, r)] += 2.0 * lambda_theta;
        }
        let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
        let scale = (0..=k)
            .map(|i| hess[(i, i)])
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let mut damping = 0.0;
        let dir = loop {
            let mut h = hess.clone();
            for i in 0..=k {
                h[(i, i)] += damping;
            }
            if let Some(p) = cholesky_solve(&h, &neg_g) {
                if p.iter().all(|v| v.is_finite()) && dot(&p, &g) < 0.0 {
                    break p;
                }
            }
            damping = if damping == 0.0 {
                1e-10 * scale
            } else {
                damping * 10.0
            };
            if damping > 1e12 * scale {
                break neg_g.clone();
            }
        };

        let slope = dot(&dir, &g);
        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-14 {
            let mut cand = clf.clone();
            axpy(step, &dir[..k], &mut cand.theta);
            cand.gamma += step * dir[k];
            let fc = eval(&cand);
            if fc.is_finite() && fc <= f + 1e-4 * step * slope {
                accepted = Some((cand, fc));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((c, fc)) => {
                clf = c;
                f = fc;
            }
            // No representable decrease left along the Newton direction.
            None => break,
        }
    }
    Ok(clf)
}

/// One shuffled pass of projected SGD over `W` with `θ` and `γ` held fixed.
///
/// Step `t` uses the document at position `t` of the shuffled order, moves
/// `W` against that document's cost-weighted stochastic gradient, and
/// re-normalizes the touched columns. The result is the mean of the last
/// `min(tau, N)` iterates, re-projected onto unit columns.
pub fn sgd_epoch_w(
    clf: &Classifier,
    w0: &EmbeddingMatrix,
    inputs: &ModelInputs<'_>,
    eta0: f64,
    tau: usize,
    schedule: StepSchedule,
    seed: u64,
) -> Result<EmbeddingMatrix> {
    if clf.k() != w0.k() {
        return Err(Error::DimensionMismatch {
            what: "classifier dimension",
            expected: w0.k(),
            found: clf.k(),
        });
    }
    if inputs.phi.n_words() != w0.n_words() {
        return Err(Error::DimensionMismatch {
            what: "vocabulary size",
            expected: w0.n_words(),
            found: inputs.phi.n_words(),
        });
    }
    let n = inputs.n_docs();
    let k = w0.k();
    let v = w0.n_words();
    let tau = tau.clamp(1, n.max(1));
    // Iterates produced by steps window_start..=n are averaged.
    let window_start = n + 1 - tau;

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut w = w0.matrix().clone();
    // Each column is piecewise constant across iterates; accumulate
    // value × (number of window iterates holding it) lazily.
    let mut acc = Matrix::zeros(k, v);
    let mut held_from = vec![0usize; v];
    let mut touched_in_window = vec![false; v];
    let flush = |acc: &mut Matrix, w: &Matrix, j: usize, from: usize, until: usize| {
        let lo = from.max(window_start);
        if until >= lo {
            let count = (until - lo + 1) as f64;
            axpy(count, w.column(j), acc.column_mut(j));
        }
    };

    // A zero classifier has a zero gradient in W; skip the no-op projections.
    let moves = clf.theta.iter().any(|t| *t != 0.0);
    let mut eta = eta0;
    for (t, &i) in order.iter().enumerate().map(|(t, i)| (t + 1, i)) {
        let eta_t = match schedule {
            StepSchedule::Harmonic => eta0 / t as f64,
            StepSchedule::LiteralFactorial => eta,
        };
        let y = inputs.labels[i];
        let ys = y.sign();
        let phi = inputs.phi.column(i);
        let d = embed_sparse(&w, phi);
        let coef = eta_t * inputs.costs.for_label(y) * ys * sigmoid(-ys * clf.score(&d));
        if moves && coef != 0.0 {
            for (j, x) in phi.iter() {
                flush(&mut acc, &w, j, held_from[j], t - 1);
                let col = w.column_mut(j);
                axpy(coef * x, &clf.theta, col);
                let nrm = norm2(col);
                if !nrm.is_finite() {
                    return Err(Error::NonFinite("projected SGD step"));
                }
                if nrm == 0.0 {
                    return Err(Error::ZeroColumn { index: j });
                }
                col.iter_mut().for_each(|c| *c /= nrm);
                held_from[j] = t;
                if t >= window_start {
                    touched_in_window[j] = true;
                }
            }
        }
        if schedule == StepSchedule::LiteralFactorial {
            eta /= t as f64;
        }
    }

    let tau_f = tau as f64;
    for j in 0..v {
        if !touched_in_window[j] {
            // Constant over the whole window: the average is the column itself.
            acc.column_mut(j).copy_from_slice(w.column(j));
            continue;
        }
        flush(&mut acc, &w, j, held_from[j], n);
        let col = acc.column_mut(j);
        col.iter_mut().for_each(|c| *c /= tau_f);
        let nrm = norm2(col);
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::ZeroColumn { index: j });
        }
        col.iter_mut().for_each(|c| *c /= nrm);
    }
    Ok(EmbeddingMatrix::new_unchecked(acc))
}

fn epoch_seed(seed: u64, t: usize) -> u64 {
    // splitmix64 finalizer over (seed, t)
    let mut z = seed ^ (t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Trains on `set`. [`Init::File`] requires [`train_with_initial`].
pub fn train(set: &TrainingSet, config: &TrainConfig) -> Result<TrainedModel> {
    train_with_initial(set, config, None)
}

/// Trains on `set`, using `initial` as `W₀` when given (it must be `k × V`).
pub fn train_with_initial(
    set: &TrainingSet,
    config: &TrainConfig,
    initial: Option<EmbeddingMatrix>,
) -> Result<TrainedModel> {
    config.validate()?;
    let phi = &set.phi;
    let costs = class_costs(&set.labels)?;
    let inputs = ModelInputs::new(phi, &set.labels, costs)?;
    let max_k = phi.n_words().min(phi.n_docs());

    let k = match (&initial, config.dimension) {
        (Some(w), _) => w.k(),
        (None, Dimension::Fixed(k)) => k,
        (None, Dimension::Auto { epsilon }) => effective_rank(phi, epsilon)?.chosen_k,
    };
    if let Dimension::Fixed(fixed) = config.dimension {
        if fixed != k {
            return Err(Error::DimensionMismatch {
                what: "initial embedding dimension",
                expected: fixed,
                found: k,
            });
        }
    }

    let w0 = match initial {
        Some(w) => {
            if w.n_words() != phi.n_words() {
                return Err(Error::DimensionMismatch {
                    what: "initial embedding columns",
                    expected: phi.n_words(),
                    found: w.n_words(),
                });
            }
            w
        }
        None => match &config.init {
            Init::Lsa(scaling) => {
                if k > max_k {
                    return Err(Error::InvalidDimension { k, max: max_k });
                }
                lsa_init(phi, k, *scaling).map_err(|e| match e {
                    Error::ZeroColumn { index } => Error::ZeroWordVector {
                        word: String::from(set.vocab.word(index)),
                    },
                    e => e,
                })?
            }
            Init::Random => random_unit_columns(k, phi.n_words(), config.seed),
            Init::File(path) => {
                return Err(Error::InvalidConfig(alloc::format!(
                    "embedding file {path:?} must be loaded by the caller"
                )))
            }
        },
    };

    let mut clf = Classifier::zeros(k, config.lambda_theta);
    let mut w = w0;
    let initial_objective = objective(&clf, &w, &inputs);
    let mut objectives = Vec::new();
    let mut norm_deviations = Vec::new();
    let mut prev = initial_objective;
    let mut stop = StopReason::MaxIterations;
    for t in 1..=config.max_outer_iters {
        clf = solve_theta(&w, &inputs, config.lambda_theta, &clf, &config.solver)?;
        w = sgd_epoch_w(
            &clf,
            &w,
            &inputs,
            config.eta0,
            config.tau,
            config.schedule,
            epoch_seed(config.seed, t),
        )?;
        let j = objective(&clf, &w, &inputs);
        if !j.is_finite() {
            return Err(Error::NonFinite("objective"));
        }
        objectives.push(j);
        norm_deviations.push(w.max_norm_deviation());
        if libm::fabs(j - prev) <= config.convergence_tol {
            stop = StopReason::Converged;
            break;
        }
        prev = j;
    }

    Ok(TrainedModel {
        vocab: set.vocab.clone(),
        weighting: phi.weighting().clone(),
        embeddings: w,
        classifier: clf,
        config: config.clone(),
        trace: TrainTrace {
            initial_objective,
            objectives,
            norm_deviations,
            stop,
        },
    })
}

/// Labels predicted at probability threshold 0.5 (ties go to positive).
pub(crate) fn label_from_proba(p: f64) -> Label {
    if p >= 0.5 {
        Label::Positive
    } else {
        Label::Negative
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ClassCosts, DocTermMatrix, LabeledDocument};
    use crate::model::{grad_theta, objective};
    use crate::spectrum::normalize_columns;
    use approx::assert_abs_diff_eq;

    fn dtm(cols: &[&[f64]]) -> DocTermMatrix {
        DocTermMatrix::from_columns(
            cols[0].len(),
            cols.iter().map(|c| SparseVector::from_dense(c)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn config_validation() {
        let ok = TrainConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            TrainConfig {
                eta0: 0.0,
                ..ok.clone()
            },
            TrainConfig {
                tau: 0,
                ..ok.clone()
            },
            TrainConfig {
                max_outer_iters: 0,
                ..ok.clone()
            },
            TrainConfig {
                convergence_tol: 0.0,
                ..ok.clone()
            },
            TrainConfig {
                lambda_theta: -1.0,
                ..ok.clone()
            },
            TrainConfig {
                dimension: Dimension::Fixed(0),
                ..ok.clone()
            },
            TrainConfig {
                dimension: Dimension::Auto { epsilon: 2.0 },
                ..ok.clone()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn single_sgd_step_matches_hand_evaluation() {
        let w0 = normalize_columns(Matrix::from_column_major(2, 1, vec![1.0, 0.0])).unwrap();
        let phi = dtm(&[&[1.0]]);
        let labels = [Label::Positive];
        let costs = ClassCosts {
            c_plus: 1.0,
            c_minus: 1.0,
            n_plus: 1,
            n_minus: 0,
        };
        let inputs = ModelInputs::new(&phi, &labels, costs).unwrap();
        let clf = Classifier {
            theta: vec![1.0, 1.0],
            gamma: 0.0,
            lambda_theta: 0.0,
        };
        let out = sgd_epoch_w(&clf, &w0, &inputs, 1.0, 1, StepSchedule::Harmonic, 9).unwrap();
        // Independent evaluation: step to (1 + s, s) with s = σ(−1), then normalize.
        let s = 1.0 / (1.0 + 1f64.exp());
        let (a, b) = (1.0 + s, s);
        let nrm = (a * a + b * b).sqrt();
        assert_abs_diff_eq!(a, 1.268_941_421_369_995, epsilon = 1e-15);
        assert_abs_diff_eq!(out.column(0)[0], a / nrm, epsilon = 1e-14);
        assert_abs_diff_eq!(out.column(0)[1], b / nrm, epsilon = 1e-14);
        assert_abs_diff_eq!(out.column(0)[0], 0.97827, epsilon = 1e-5);
        assert_abs_diff_eq!(out.column(0)[1], 0.20734, epsilon = 1e-5);
    }

    fn toy() -> (DocTermMatrix, Vec<Label>, EmbeddingMatrix) {
        let phi = dtm(&[
            &[2.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 1.0, 1.0],
            &[1.0, 0.0, 0.0, 2.0],
            &[0.0, 3.0, 1.0, 0.0],
            &[1.0, 1.0, 0.0, 0.0],
        ]);
        let labels = vec![
            Label::Positive,
            Label::Negative,
            Label::Positive,
            Label::Negative,
            Label::Negative,
        ];
        let w = random_unit_columns(3, 4, 5);
        (phi, labels, w)
    }

    #[test]
    fn zero_theta_leaves_w_unchanged() {
        let (phi, labels, w) = toy();
        let inputs = ModelInputs::with_derived_costs(&phi, &labels).unwrap();
        let out = sgd_epoch_w(
            &Classifier::zeros(3, 0.0),
            &w,
            &inputs,
            0.1,
            50,
            StepSchedule::Harmonic,
            1,
        )
        .unwrap();
        assert_eq!(out, w);
    }

    #[test]
    fn sgd_is_seeded_and_keeps_unit_columns() {
        let (phi, labels, w) = toy();
        let inputs = ModelInputs::with_derived_costs(&phi, &labels).unwrap();
        let clf = Classifier {
            theta: vec![1.5, -0.5, 2.0],
            gamma: 0.1,
            lambda_theta: 0.0,
        };
        let a = sgd_epoch_w(&clf, &w, &inputs, 0.5, 3, StepSchedule::Harmonic, 11).unwrap();
        let b = sgd_epoch_w(&clf, &w, &inputs, 0.5, 3, StepSchedule::Harmonic, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.max_norm_deviation() <= 1e-9);
        let c = sgd_epoch_w(
            &clf,
            &w,
            &inputs,
            0.5,
            3,
            StepSchedule::LiteralFactorial,
            11,
        )
        .unwrap();
        assert!(c.max_norm_deviation() <= 1e-9);
    }

    /// Brute-force suffix average: store every iterate and average the last τ'.
    #[test]
    fn suffix_average_matches_stored_iterates() {
        let (phi, labels, w) = toy();
        let inputs = ModelInputs::with_derived_costs(&phi, &labels).unwrap();
        let clf = Classifier {
            theta: vec![1.5, -0.5, 2.0],
            gamma: 0.1,
            lambda_theta: 0.0,
        };
        let seed = 4;
        for tau in [1, 2, 3, 5, 50] {
            let got =
                sgd_epoch_w(&clf, &w, &inputs, 0.7, tau, StepSchedule::Harmonic, seed).unwrap();

            let mut order: Vec<usize> = (0..5).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let mut cur = w.matrix().clone();
            let mut iterates = Vec::new();
            for (t, &i) in order.iter().enumerate() {
                let eta = 0.7 / (t + 1) as f64;
                let y = labels[i].sign();
                let dense = phi.column(i).to_dense();
                let d = cur.mul_vec(&dense);
                let s: f64 = clf.theta.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() + clf.gamma;
                let c = if y > 0.0 {
                    inputs.costs.c_plus
                } else {
                    inputs.costs.c_minus
                };
                let coef = eta * c * y / (1.0 + (y * s).exp());
                for j in 0..4 {
                    for r in 0..3 {
                        cur[(r, j)] += coef * clf.theta[r] * dense[j];
                    }
                    let nrm = (0..3).map(|r| cur[(r, j)].powi(2)).sum::<f64>().sqrt();
                    for r in 0..3 {
                        cur[(r, j)] /= nrm;
                    }
                }
                iterates.push(cur.clone());
            }
            let tp = tau.min(5);
            let mut avg = Matrix::zeros(3, 4);
            for it in &iterates[5 - tp..] {
                for j in 0..4 {
                    axpy(1.0 / tp as f64, it.column(j), avg.column_mut(j));
                }
            }
            let want = normalize_columns(avg).unwrap();
            for j in 0..4 {
                for r in 0..3 {
                    assert_abs_diff_eq!(got.column(j)[r], want.column(j)[r], epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn oversized_step_reports_zero_column() {
        // θ exactly opposite the column with a step that lands on the origin.
        let w0 = normalize_columns(Matrix::from_column_major(1, 1, vec![1.0])).unwrap();
        let phi = dtm(&[&[1.0]]);
        let labels = [Label::Negative];
        let costs = ClassCosts {
            c_plus: 1.0,
            c_minus: 1.0,
            n_plus: 0,
            n_minus: 1,
        };
        let inputs = ModelInputs::new(&phi, &labels, costs).unwrap();
        let clf = Classifier {
            theta: vec![1.0],
            gamma: 0.0,
            lambda_theta: 0.0,
        };
        // coef = −η σ(1); choose η so that 1 − η σ(1) = 0.
        let eta = 1.0 / (1.0 / (1.0 + (-1f64).exp()));
        let r = sgd_epoch_w(&clf, &w0, &inputs, eta, 1, StepSchedule::Harmonic, 0);
        assert!(matches!(r, Err(Error::ZeroColumn { index: 0 })), "{r:?}");
    }

    /// Root of the bias-only stationarity condition by bisection.
    fn bias_oracle(c_pos_total: f64, c_neg_total: f64) -> f64 {
        let f = |g: f64| c_pos_total / (1.0 + g.exp()) - c_neg_total / (1.0 + (-g).exp());
        let (mut lo, mut hi) = (-50.0, 50.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn heavy_regularization_leaves_bias_only_problem() {
        let (phi, labels, w) = toy();
        // Non-heuristic costs so the optimal bias is not zero.
        let costs = ClassCosts {
            c_plus: 0.7,
            c_minus: 0.2,
            n_plus: 2,
            n_minus: 3,
        };
        let inputs = ModelInputs::new(&phi, &labels, costs).unwrap();
        let clf = solve_theta(
            &w,
            &inputs,
            1e6,
            &Classifier::zeros(3, 1e6),
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(norm2(&clf.theta) <= 1e-4);
        let want = bias_oracle(0.7 * 2.0, 0.2 * 3.0);
        assert_abs_diff_eq!(want, (0.7f64 * 2.0 / (0.2 * 3.0)).ln(), epsilon = 1e-10);
        assert_abs_diff_eq!(clf.gamma, want, epsilon = 1e-6);
    }

    #[test]
    fn solver_meets_gradient_tolerance_and_descends() {
        let (phi, labels, w) = toy();
        let inputs = ModelInputs::with_derived_costs(&phi, &labels).unwrap();
        let warm = Classifier {
            theta: vec![0.3, 0.3, -0.2],
            gamma: 0.5,
            lambda_theta: 0.05,
        };
        let clf = solve_theta(&w, &inputs, 0.05, &warm, &SolverOptions::default()).unwrap();
        let (g, gg) = grad_theta(&clf, &w, &inputs);
        assert!(g.iter().chain([gg].iter()).all(|x| x.abs() <= 1e-8));
        assert!(objective(&clf, &w, &inputs) <= objective(&warm, &w, &inputs) + 1e-12);
    }

    #[test]
    fn separable_one_dimensional_fit_matches_grid_search() {
        // k = 1: document embeddings are the scalar weights themselves.
        let w = normalize_columns(Matrix::from_column_major(1, 1, vec![1.0])).unwrap();
        let xs = [3.0, 2.5, 2.0, 0.5, 0.3, 1.0];
        let labels = [
            Label::Positive,
            Label::Positive,
            Label::Positive,
            Label::Negative,
            Label::Negative,
            Label::Negative,
        ];
        let cols: Vec<SparseVector> = xs.iter().map(|&x| SparseVector::from_dense(&[x])).collect();
        let phi = DocTermMatrix::from_columns(1, cols).unwrap();
        let inputs = ModelInputs::with_derived_costs(&phi, &labels).unwrap();
        let lambda = 0.1;
        let clf = solve_theta(
            &w,
            &inputs,
            lambda,
            &Classifier::zeros(1, lambda),
            &SolverOptions::default(),
        )
        .unwrap();

        let j = |t: f64, g: f64| {
            let c = Classifier {
                theta: vec![t],
                gamma: g,
                lambda_theta: lambda,
            };
            objective(&c, &w, &inputs)
        };
        let (mut bt, mut bg) = (0.0, 0.0);
        let mut span = 8.0;
        for _ in 0..12 {
            let mut best = f64::INFINITY;
            let (ct, cg) = (bt, bg);
            for a in -40..=40 {
                for b in -40..=40 {
                    let t = ct + span * a as f64 / 40.0;
                    let g = cg + span * b as f64 / 40.0;
                    let v = j(t, g);
                    if v < best {
                        best = v;
                        bt = t;
                        bg = g;
                    }
                }
            }
            span /= 4.0;
        }
        assert_abs_diff_eq!(clf.theta[0], bt, epsilon = 1e-3);
        assert_abs_diff_eq!(clf.gamma, bg, epsilon = 1e-3);
    }

    fn toy_docs() -> Vec<LabeledDocument> {
        let mut v = Vec::new();
        for i in 0..12 {
            let text = match i % 4 {
                0 => "great fine great movie",
                1 => "awful bad movie plot",
                2 => "bad plot awful awful",
                _ => "boring bad movie",
            };
            v.push(LabeledDocument::new(
                text,
                if i % 4 == 0 {
                    Label::Positive
                } else {
                    Label::Negative
                },
            ));
        }
        v
    }

    #[test]
    fn one_outer_iteration_records_one_objective() {
        let set = TrainingSet::from_documents(&toy_docs(), Weighting::Tf).unwrap();
        let cfg = TrainConfig {
            dimension: Dimension::Fixed(2),
            max_outer_iters: 1,
            ..Default::default()
        };
        let m = train(&set, &cfg).unwrap();
        assert_eq!(m.trace.iterations(), 1);
        assert_eq!(m.embeddings.k(), 2);
        assert!(m.embeddings.max_norm_deviation() <= 1e-9);
        assert!(m.trace.final_objective() < m.trace.initial_objective);
    }

    #[test]
    fn file_init_needs_a_matrix() {
        let set = TrainingSet::from_documents(&toy_docs(), Weighting::Tf).unwrap();
        let cfg = TrainConfig {
            init: Init::File("x.txt".into()),
            dimension: Dimension::Fixed(2),
            ..Default::default()
        };
        assert!(matches!(train(&set, &cfg), Err(Error::InvalidConfig(_))));
        let w = random_unit_columns(2, set.vocab.len(), 3);
        let m = train_with_initial(&set, &cfg, Some(w)).unwrap();
        assert_eq!(m.k(), 2);
        let wrong = random_unit_columns(3, set.vocab.len(), 3);
        assert!(train_with_initial(&set, &cfg, Some(wrong)).is_err());
    }

    #[test]
    fn flipped_labels_negate_scores() {
        let docs = toy_docs();
        let flipped: Vec<LabeledDocument> = docs
            .iter()
            .map(|d| LabeledDocument::new(d.text.clone(), d.label.flipped()))
            .collect();
        let cfg = TrainConfig {
            dimension: Dimension::Fixed(2),
            max_outer_iters: 4,
            seed: 8,
            ..Default::default()
        };
        let a = train(
            &TrainingSet::from_documents(&docs, Weighting::Tf).unwrap(),
            &cfg,
        )
        .unwrap();
        let b = train(
            &TrainingSet::from_documents(&flipped, Weighting::Tf).unwrap(),
            &cfg,
        )
        .unwrap();
        for d in &docs {
            let sa = a.classifier.score(&embed_sparse(
                a.embeddings.matrix(),
                &a.weights_for(&d.text),
            ));
            let sb = b.classifier.score(&embed_sparse(
                b.embeddings.matrix(),
                &b.weights_for(&d.text),
            ));
            assert_abs_diff_eq!(sa, -sb, epsilon = 1e-6);
        }
    }

    #[test]
    fn oov_document_scores_sigmoid_gamma() {
        let set = TrainingSet::from_documents(&toy_docs(), Weighting::Tf).unwrap();
        let m = train(
            &set,
            &TrainConfig {
                dimension: Dimension::Fixed(2),
                max_outer_iters: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(m.predict_text("zzz qqq"), sigmoid(m.classifier.gamma));
    }
}
