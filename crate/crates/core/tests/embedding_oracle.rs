//! Embedding checked against a direct second-quantized evaluation that works
//! on explicit occupation lists.

#![cfg(feature = "sim")]

mod common;

use common::{integer_matrix, oracle};
use faer::Mat;
use proptest::prelude::*;
use qbiv::ensemble::{build_basis, embed, sample_body_matrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn embedding_matches_second_quantization_exactly() {
    let mut cases = 0;
    for n in 1..=6 {
        for m in 1..=3.min(n) {
            let basis = build_basis(n, m).unwrap();
            for r in 0..=m {
                let d_r = build_basis(n, r).unwrap().len();
                let v = integer_matrix(d_r, (n * 100 + m * 10 + r) as u64);
                let fast = embed(&v, r, &basis).unwrap().to_dense();
                assert_eq!(fast, oracle(&v, n, m, r), "N={n} m={m} r={r}");
                cases += 1;
            }
        }
    }
    assert_eq!(cases, 43);
}

#[test]
fn real_valued_draws_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (n, m, r) in [(6, 3, 2), (6, 3, 1), (5, 2, 2), (6, 2, 1)] {
        let v: Mat<f64> = sample_body_matrix(&build_basis(n, r).unwrap(), &mut rng);
        let fast = embed(&v, r, &build_basis(n, m).unwrap())
            .unwrap()
            .to_dense();
        let slow = oracle(&v, n, m, r);
        for i in 0..fast.nrows() {
            for j in 0..fast.ncols() {
                assert!((fast[(i, j)] - slow[(i, j)]).abs() < 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn embedding_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0, r in 1usize..=3) {
        let (n, m) = (7, 3);
        let body = build_basis(n, r).unwrap();
        let basis = build_basis(n, m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v1: Mat<f64> = sample_body_matrix(&body, &mut rng);
        let v2: Mat<f64> = sample_body_matrix(&body, &mut rng);
        let mix = Mat::<f64>::from_fn(body.len(), body.len(), |i, j| a * v1[(i, j)] + b * v2[(i, j)]);
        let lhs = embed(&mix, r, &basis).unwrap().to_dense();
        let e1 = embed(&v1, r, &basis).unwrap().to_dense();
        let e2 = embed(&v2, r, &basis).unwrap().to_dense();
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                prop_assert!((lhs[(i, j)] - a * e1[(i, j)] - b * e2[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn embedding_preserves_symmetry(seed in any::<u64>(), r in 0usize..=3) {
        let basis = build_basis(7, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Mat<f64> = sample_body_matrix(&build_basis(7, r).unwrap(), &mut rng);
        let h = embed(&v, r, &basis).unwrap().to_dense();
        for i in 0..basis.len() {
            for j in 0..i {
                prop_assert_eq!(h[(i, j)], h[(j, i)]);
            }
        }
    }
}
