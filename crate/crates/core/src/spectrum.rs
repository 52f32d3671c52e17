//! Spectral utilities: effective rank of `Φ`, LSA initialization of `W`,
//! unit-norm column projection and seeded random unit columns.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{DocTermMatrix, Vocabulary};
use crate::linalg::{norm2, svd, Matrix};
use crate::model::EmbeddingMatrix;
use crate::{Error, Result};

/// Relative tail energy `err_k = Σ_{i>k} σ_i² / Σ_i σ_i²` for every `k`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EffectiveRankCurve {
    /// `errors[k - 1] = err_k`, for `k = 1..=min(V, N)`.
    pub errors: Vec<f64>,
    pub singular_values: Vec<f64>,
    /// Smallest `k` with `err_k <= epsilon`.
    pub chosen_k: usize,
    pub epsilon: f64,
}

impl EffectiveRankCurve {
    pub fn error_at(&self, k: usize) -> f64 {
        self.errors[k - 1]
    }
}

/// Effective rank of `Φ` at threshold `epsilon`.
pub fn effective_rank(phi: &DocTermMatrix, epsilon: f64) -> Result<EffectiveRankCurve> {
    effective_rank_of(&phi.to_dense(), epsilon)
}

/// Effective rank of an arbitrary dense matrix.
pub fn effective_rank_of(m: &Matrix, epsilon: f64) -> Result<EffectiveRankCurve> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let s = svd(m).singular_values;
    curve_from_singular_values(s, epsilon)
}

pub(crate) fn curve_from_singular_values(
    singular_values: Vec<f64>,
    epsilon: f64,
) -> Result<EffectiveRankCurve> {
    let r = singular_values.len();
    // Tail sums accumulated from the smallest value upward, so the curve is
    // monotone by construction and ends at exactly 0.
    let mut tails = alloc::vec![0.0; r];
    let mut acc = 0.0;
    for k in (0..r).rev() {
        tails[k] = acc;
        acc += singular_values[k] * singular_values[k];
    }
    let total = acc;
    if total.is_nan() || total <= 0.0 {
        return Err(Error::InvalidConfig("matrix is zero".into()));
    }
    let errors: Vec<f64> = tails.iter().map(|t| t / total).collect();
    let chosen_k = errors
        .iter()
        .position(|&e| e <= epsilon)
        .map_or(r, |p| p + 1);
    Ok(EffectiveRankCurve {
        errors,
        singular_values,
        chosen_k,
        epsilon,
    })
}

/// How LSA word vectors are taken from the SVD before normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LsaScaling {
    /// Rows of `U_k`.
    #[default]
    Unscaled,
    /// Rows of `U_k Σ_k`.
    SingularValues,
}

/// `W₀` from the top-`k` left singular vectors of `Φ`: word `j` gets row `j` of
/// `U_k` (optionally scaled by `Σ_k`), projected to unit norm.
///
/// A word whose vector is zero yields [`Error::ZeroColumn`] with its index.
pub fn lsa_init(phi: &DocTermMatrix, k: usize, scaling: LsaScaling) -> Result<EmbeddingMatrix> {
    let max = phi.n_words().min(phi.n_docs());
    if k == 0 || k > max {
        return Err(Error::InvalidDimension { k, max });
    }
    let dec = svd(&phi.to_dense());
    let w = Matrix::from_fn(k, phi.n_words(), |r, j| match scaling {
        LsaScaling::Unscaled => dec.u[(j, r)],
        LsaScaling::SingularValues => dec.u[(j, r)] * dec.singular_values[r],
    });
    normalize_columns(w)
}

/// Divides every column by its ℓ₂ norm.
pub fn normalize_columns(mut w: Matrix) -> Result<EmbeddingMatrix> {
    for j in 0..w.cols() {
        let c = w.column_mut(j);
        let n = norm2(c);
        if !n.is_finite() {
            return Err(Error::NonFinite("column norm"));
        }
        if n == 0.0 {
            return Err(Error::ZeroColumn { index: j });
        }
        c.iter_mut().for_each(|x| *x /= n);
    }
    Ok(EmbeddingMatrix::new_unchecked(w))
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller; u1 in (0, 1] keeps the log finite.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
}

pub(crate) fn random_unit_vector(k: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| standard_normal(rng)).collect();
        let n = norm2(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// `V` columns drawn uniformly from the unit sphere in `ℝ^k`.
pub fn random_unit_columns(k: usize, n_words: usize, seed: u64) -> EmbeddingMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols: Vec<Vec<f64>> = (0..n_words)
        .map(|_| random_unit_vector(k, &mut rng))
        .collect();
    EmbeddingMatrix::new_unchecked(Matrix::from_columns(k, &cols))
}

/// Builds `W₀` from externally supplied vectors.
///
/// `lookup` returns the vector for a word, if known; found vectors are
/// projected to unit norm and every other word gets a seeded random unit
/// vector (drawn in vocabulary order). Returns the matrix and the number of
/// words that were not found.
pub fn embeddings_from_lookup<'a>(
    vocab: &Vocabulary,
    k: usize,
    seed: u64,
    mut lookup: impl FnMut(&str) -> Option<&'a [f64]>,
) -> Result<(EmbeddingMatrix, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut missing = 0;
    let mut cols = Vec::with_capacity(vocab.len());
    for word in vocab.words() {
        match lookup(word) {
            Some(v) => {
                if v.len() != k {
                    return Err(Error::DimensionMismatch {
                        what: "embedding dimension",
                        expected: k,
                        found: v.len(),
                    });
                }
                let n = norm2(v);
                if n == 0.0 || !n.is_finite() {
                    return Err(Error::ZeroWordVector {
                        word: String::from(word.as_str()),
                    });
                }
                cols.push(v.iter().map(|x| x / n).collect::<Vec<f64>>());
            }
            None => {
                missing += 1;
                cols.push(random_unit_vector(k, &mut rng));
            }
        }
    }
    Ok((
        EmbeddingMatrix::new_unchecked(Matrix::from_columns(k, &cols)),
        missing,
    ))
}
