//! Logistic document model `P[y = 1 | d = Wφ] = σ(θᵀWφ + γ)`, the
//! cost-weighted regularized negative log-likelihood, and its gradients.

use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::{ClassCosts, DocTermMatrix, Label, SparseVector};
use crate::linalg::{axpy, dot, norm2, Matrix};
use crate::{Error, Result};

/// Logistic function, evaluated without overflow for any finite `z`.
#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// `ln σ(z)`, finite for every finite `z`.
#[inline]
pub fn log_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        -libm::log1p(libm::exp(-z))
    } else {
        z - libm::log1p(libm::exp(z))
    }
}

/// Linear classifier over document embeddings. `gamma` is not regularized.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Classifier {
    pub theta: Vec<f64>,
    pub gamma: f64,
    pub lambda_theta: f64,
}

impl Classifier {
    pub fn zeros(k: usize, lambda_theta: f64) -> Self {
        Classifier {
            theta: vec![0.0; k],
            gamma: 0.0,
            lambda_theta,
        }
    }

    pub fn k(&self) -> usize {
        self.theta.len()
    }

    /// `θᵀd + γ` for a document embedding `d`.
    #[inline]
    pub fn score(&self, d: &[f64]) -> f64 {
        dot(&self.theta, d) + self.gamma
    }

    pub fn negated(&self) -> Classifier {
        Classifier {
            theta: self.theta.iter().map(|x| -x).collect(),
            gamma: -self.gamma,
            lambda_theta: self.lambda_theta,
        }
    }
}

/// `k × V` word-vector matrix whose columns have unit ℓ₂ norm.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmbeddingMatrix {
    w: Matrix,
}

/// Maximum allowed deviation of a column norm from 1.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-9;

impl EmbeddingMatrix {
    /// Wraps `w`, checking that every column is unit norm.
    pub fn from_unit_columns(w: Matrix) -> Result<Self> {
        for (j, c) in w.columns().enumerate() {
            let n = norm2(c);
            if !n.is_finite() {
                return Err(Error::NonFinite("embedding column"));
            }
            if libm::fabs(n - 1.0) > UNIT_NORM_TOLERANCE {
                return Err(Error::InvalidConfig(alloc::format!(
                    "column {j} has norm {n}, expected 1"
                )));
            }
        }
        Ok(EmbeddingMatrix { w })
    }

    pub(crate) fn new_unchecked(w: Matrix) -> Self {
        EmbeddingMatrix { w }
    }

    /// Embedding dimension `k`.
    pub fn k(&self) -> usize {
        self.w.rows()
    }

    /// Number of word columns `V`.
    pub fn n_words(&self) -> usize {
        self.w.cols()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        self.w.column(j)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.w
    }

    pub fn into_matrix(self) -> Matrix {
        self.w
    }

    /// Largest `|‖w_j‖ − 1|` over columns.
    pub fn max_norm_deviation(&self) -> f64 {
        self.w
            .columns()
            .map(|c| libm::fabs(norm2(c) - 1.0))
            .fold(0.0, f64::max)
    }
}

/// Data the objective is evaluated on.
#[derive(Debug, Clone, Copy)]
pub struct ModelInputs<'a> {
    pub phi: &'a DocTermMatrix,
    pub labels: &'a [Label],
    pub costs: ClassCosts,
}

impl<'a> ModelInputs<'a> {
    pub fn new(phi: &'a DocTermMatrix, labels: &'a [Label], costs: ClassCosts) -> Result<Self> {
        if labels.len() != phi.n_docs() {
            return Err(Error::DimensionMismatch {
                what: "label count",
                expected: phi.n_docs(),
                found: labels.len(),
            });
        }
        Ok(ModelInputs { phi, labels, costs })
    }

    /// Inputs with class costs derived from the labels.
    pub fn with_derived_costs(phi: &'a DocTermMatrix, labels: &'a [Label]) -> Result<Self> {
        ModelInputs::new(phi, labels, crate::corpus::class_costs(labels)?)
    }

    pub fn n_docs(&self) -> usize {
        self.labels.len()
    }
}

/// `Wφ` for a sparse weight vector.
pub(crate) fn embed_sparse(w: &Matrix, phi: &SparseVector) -> Vec<f64> {
    let mut d = vec![0.0; w.rows()];
    for (j, x) in phi.iter() {
        axpy(x, w.column(j), &mut d);
    }
    d
}

/// `d_i = Wφ_i`.
pub fn doc_embedding(w: &EmbeddingMatrix, phi_i: &SparseVector) -> Result<Vec<f64>> {
    if phi_i.dim() != w.n_words() {
        return Err(Error::DimensionMismatch {
            what: "document weight vector length",
            expected: w.n_words(),
            found: phi_i.dim(),
        });
    }
    Ok(embed_sparse(&w.w, phi_i))
}

/// `σ(θᵀWφ_i + γ)`.
pub fn predict_proba(clf: &Classifier, w: &EmbeddingMatrix, phi_i: &SparseVector) -> Result<f64> {
    check_k(clf, w)?;
    Ok(sigmoid(clf.score(&doc_embedding(w, phi_i)?)))
}

fn check_k(clf: &Classifier, w: &EmbeddingMatrix) -> Result<()> {
    if clf.k() != w.k() {
        return Err(Error::DimensionMismatch {
            what: "classifier dimension",
            expected: w.k(),
            found: clf.k(),
        });
    }
    Ok(())
}

/// Document embeddings for every column of `Φ`.
pub(crate) fn embed_all(w: &EmbeddingMatrix, phi: &DocTermMatrix) -> Vec<Vec<f64>> {
    phi.columns()
        .iter()
        .map(|c| embed_sparse(&w.w, c))
        .collect()
}

/// Data term of the objective from cached document embeddings.
pub(crate) fn data_term(clf: &Classifier, docs: &[Vec<f64>], inputs: &ModelInputs<'_>) -> f64 {
    let mut pos = 0.0;
    let mut neg = 0.0;
    for (d, &y) in docs.iter().zip(inputs.labels) {
        let s = clf.score(d);
        match y {
            Label::Positive => pos += log_sigmoid(s),
            Label::Negative => neg += log_sigmoid(-s),
        }
    }
    -(inputs.costs.c_plus * pos + inputs.costs.c_minus * neg) / inputs.n_docs() as f64
}

pub(crate) fn regularizer(clf: &Classifier) -> f64 {
    clf.lambda_theta * dot(&clf.theta, &clf.theta)
}

/// `J(θ, W) = −(1/N)[C₊ Σ₊ ln σ(s_i) + C₋ Σ₋ ln σ(−s_i)] + λ‖θ‖²`
/// with `s_i = θᵀWφ_i + γ`.
pub fn objective(clf: &Classifier, w: &EmbeddingMatrix, inputs: &ModelInputs<'_>) -> f64 {
    debug_assert_eq!(clf.k(), w.k());
    let docs = embed_all(w, inputs.phi);
    data_term(clf, &docs, inputs) + regularizer(clf)
}

/// Gradient with respect to `(θ, γ)` from cached document embeddings.
pub(crate) fn grad_theta_cached(
    clf: &Classifier,
    docs: &[Vec<f64>],
    inputs: &ModelInputs<'_>,
) -> (Vec<f64>, f64) {
    let n = inputs.n_docs() as f64;
    let mut g = vec![0.0; clf.k()];
    let mut g_gamma = 0.0;
    for (d, &y) in docs.iter().zip(inputs.labels) {
        let ys = y.sign();
        let coef = -inputs.costs.for_label(y) * ys * sigmoid(-ys * clf.score(d)) / n;
        axpy(coef, d, &mut g);
        g_gamma += coef;
    }
    axpy(2.0 * clf.lambda_theta, &clf.theta, &mut g);
    (g, g_gamma)
}

/// Exact gradient of `J` with respect to `θ` and `γ`.
pub fn grad_theta(
    clf: &Classifier,
    w: &EmbeddingMatrix,
    inputs: &ModelInputs<'_>,
) -> (Vec<f64>, f64) {
    debug_assert_eq!(clf.k(), w.k());
    grad_theta_cached(clf, &embed_all(w, inputs.phi), inputs)
}

/// Rank-one matrix `scale · θ φᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneGradient {
    pub scale: f64,
    pub theta: Vec<f64>,
    pub phi: SparseVector,
}

impl RankOneGradient {
    /// Column `j`, i.e. `scale · φ_j · θ`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        let f = self.scale * self.phi.get(j);
        self.theta.iter().map(|t| f * t).collect()
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.theta.len(), self.phi.dim());
        for (j, x) in self.phi.iter() {
            axpy(self.scale * x, &self.theta, m.column_mut(j));
        }
        m
    }
}

/// Single-document stochastic gradient of the data term with respect to `W`:
/// `−cost · y · σ(−y(θᵀWφ + γ)) · θφᵀ` (no `1/N` factor).
pub fn grad_w_single(
    clf: &Classifier,
    w: &EmbeddingMatrix,
    phi_i: &SparseVector,
    y_i: Label,
    cost_i: f64,
) -> Result<RankOneGradient> {
    check_k(clf, w)?;
    let d = doc_embedding(w, phi_i)?;
    let ys = y_i.sign();
    Ok(RankOneGradient {
        scale: -cost_i * ys * sigmoid(-ys * clf.score(&d)),
        theta: clf.theta.clone(),
        phi: phi_i.clone(),
    })
}
