//! Direct second-quantized embedding on explicit occupation lists, shared by
//! the oracle tests and the acceptance run.

#![allow(dead_code)]

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Signed occupation list; `None` is the zero vector.
type Ket = Option<(f64, Vec<usize>)>;

fn annihilate(j: usize, ket: Ket) -> Ket {
    let (sign, mut occ) = ket?;
    let pos = occ.iter().position(|&o| o == j)?;
    occ.remove(pos);
    Some((if pos % 2 == 0 { sign } else { -sign }, occ))
}

fn create(j: usize, ket: Ket) -> Ket {
    let (sign, mut occ) = ket?;
    if occ.contains(&j) {
        return None;
    }
    let pos = occ.iter().filter(|&&o| o < j).count();
    occ.insert(pos, j);
    Some((if pos % 2 == 0 { sign } else { -sign }, occ))
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for last in r - 1..n {
        for mut head in subsets(last, r - 1) {
            head.push(last);
            out.push(head);
        }
    }
    out
}

fn pattern(occ: &[usize]) -> u64 {
    occ.iter().map(|&j| 1u64 << j).sum()
}

/// `H[n, m] = sum_{a, b} V[a, b] <n| a+_{a1} .. a+_{ar} a_{br} .. a_{b1} |m>`.
pub fn oracle(v: &Mat<f64>, n_orb: usize, m: usize, r: usize) -> Mat<f64> {
    let mut body = subsets(n_orb, r);
    body.sort_by_key(|s| pattern(s));
    let mut states = subsets(n_orb, m);
    states.sort_by_key(|s| pattern(s));
    let d = states.len();
    let mut h = Mat::<f64>::zeros(d, d);
    for (col, ket) in states.iter().enumerate() {
        for (a, alpha) in body.iter().enumerate() {
            for (b, beta) in body.iter().enumerate() {
                let mut k: Ket = Some((1.0, ket.clone()));
                for &j in beta {
                    k = annihilate(j, k);
                }
                for &j in alpha.iter().rev() {
                    k = create(j, k);
                }
                if let Some((sign, occ)) = k {
                    let row = states.iter().position(|s| *s == occ).unwrap();
                    h[(row, col)] += sign * v[(a, b)];
                }
            }
        }
    }
    h
}

pub fn integer_matrix(d: usize, seed: u64) -> Mat<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = Mat::<f64>::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let x = rng.random_range(-5..=5) as f64;
            v[(i, j)] = x;
            v[(j, i)] = x;
        }
    }
    v
}
