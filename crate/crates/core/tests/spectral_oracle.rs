//! Singular values, effective rank and LSA vectors against nalgebra's SVD.

use nalgebra::DMatrix;
use polarembed_core::linalg::svd;
use polarembed_core::{effective_rank, lsa_init, DocTermMatrix, LsaScaling, Matrix, SparseVector};
use proptest::prelude::*;

fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_column_slice(m.rows(), m.cols(), m.as_slice())
}

fn dtm(m: &Matrix) -> DocTermMatrix {
    DocTermMatrix::from_columns(
        m.rows(),
        m.columns().map(SparseVector::from_dense).collect(),
    )
    .unwrap()
}

/// Words × documents.
fn toy() -> Matrix {
    Matrix::from_fn(4, 3, |r, c| {
        [
            [2.0, 0.0, 1.0],
            [1.0, 3.0, 0.0],
            [0.0, 1.0, 4.0],
            [1.0, 1.0, 1.0],
        ][r][c]
    })
}

/// Oracle word vectors: rows of the top-k left singular vectors, normalized.
fn oracle_lsa(m: &Matrix, k: usize) -> Vec<Vec<f64>> {
    let s = to_na(m).svd(true, false);
    let u = s.u.unwrap();
    let mut order: Vec<usize> = (0..s.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        s.singular_values[b]
            .partial_cmp(&s.singular_values[a])
            .unwrap()
    });
    (0..m.rows())
        .map(|j| {
            let v: Vec<f64> = order[..k].iter().map(|&i| u[(j, i)]).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect()
        })
        .collect()
}

#[test]
fn toy_lsa_matches_dense_oracle_up_to_sign() {
    let m = toy();
    for k in 1..=3 {
        let w = lsa_init(&dtm(&m), k, LsaScaling::Unscaled).unwrap();
        let want = oracle_lsa(&m, k);
        // A sign flip of singular vector r flips row r of every column at once.
        for r in 0..k {
            let sign = if (w.column(0)[r] * want[0][r]) < 0.0 {
                -1.0
            } else {
                1.0
            };
            for (j, wj) in want.iter().enumerate() {
                assert!(
                    (w.column(j)[r] - sign * wj[r]).abs() <= 1e-8,
                    "k={k} r={r} j={j}"
                );
            }
        }
    }
}

#[test]
fn toy_singular_values_match() {
    let m = toy();
    let mut want: Vec<f64> = to_na(&m).singular_values().iter().copied().collect();
    want.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let got = svd(&m).singular_values;
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() <= 1e-12 * want[0]);
    }
}

fn matrix() -> impl Strategy<Value = Matrix> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3.0f64..3.0, r * c)
            .prop_map(move |d| Matrix::from_column_major(r, c, d))
    })
}

proptest! {
    #[test]
    fn singular_values_and_rank_match_oracle(m in matrix(), eps in 0.0f64..1.0) {
        prop_assume!(m.frobenius_norm_sq() > 1e-6);
        let mut sv: Vec<f64> = to_na(&m).singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let got = svd(&m);
        for (a, b) in got.singular_values.iter().zip(&sv) {
            prop_assert!((a - b).abs() <= 1e-10 * sv[0]);
        }
        let total: f64 = sv.iter().map(|s| s * s).sum();
        let err = |k: usize| sv[k..].iter().map(|s| s * s).sum::<f64>() / total;
        let curve = polarembed_core::effective_rank_of(&m, eps).unwrap();
        for k in 1..=sv.len() {
            prop_assert!((curve.error_at(k) - err(k)).abs() <= 1e-10);
        }
        // Chosen k is minimal; skip instances within rounding of the threshold.
        let margin = (1..=sv.len()).all(|k| (err(k) - eps).abs() > 1e-9);
        if margin {
            let want = (1..=sv.len()).find(|&k| err(k) <= eps).unwrap();
            prop_assert_eq!(curve.chosen_k, want);
        }
    }

    #[test]
    fn svd_reconstructs_input(m in matrix()) {
        let s = svd(&m);
        let r = s.singular_values.len();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let x: f64 = (0..r).map(|t| s.u[(i, t)] * s.singular_values[t] * s.v[(j, t)]).sum();
                prop_assert!((x - m[(i, j)]).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn effective_rank_on_term_matrix_uses_same_curve() {
    let m = toy();
    let a = effective_rank(&dtm(&m), 0.1).unwrap();
    let b = polarembed_core::effective_rank_of(&m, 0.1).unwrap();
    assert_eq!(a, b);
}
