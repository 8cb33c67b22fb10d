use faer::Mat;

use super::basis::{build_basis_capped, occupied, FockBasis};
use super::eigen::col_slice;
use super::sampling::Entry;
use crate::error::{domain, Result};

/// Compressed-column matrix: entry `(row, col) = <row| Op |col>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    dim: usize,
    col_ptr: Vec<usize>,
    rows: Vec<usize>,
    values: Vec<T>,
}

impl<T: Entry> SparseMatrix<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.col_ptr[col]..self.col_ptr[col + 1];
        self.rows[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.column(col)
            .find(|&(r, _)| r == row)
            .map_or(T::from_real(0.0), |(_, v)| v)
    }

    pub fn to_dense(&self) -> Mat<T> {
        let mut m = Mat::<T>::zeros(self.dim, self.dim);
        for c in 0..self.dim {
            for (r, v) in self.column(c) {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// `trace(Op^dagger Op)`.
    pub fn frobenius2(&self) -> f64 {
        self.values.iter().map(|v| v.norm2()).sum()
    }

    /// `Op * x` for each column of `x`.
    pub fn mul_dense(&self, x: &Mat<T>) -> Mat<T> {
        let mut out = Mat::<T>::zeros(self.dim, x.ncols());
        for j in 0..x.ncols() {
            let xj = col_slice(x, j);
            let mut acc = vec![T::from_real(0.0); self.dim];
            for (c, &xc) in xj.iter().enumerate() {
                let span = self.col_ptr[c]..self.col_ptr[c + 1];
                for (&r, &v) in self.rows[span.clone()].iter().zip(&self.values[span]) {
                    acc[r] += v * xc;
                }
            }
            for (r, a) in acc.into_iter().enumerate() {
                out[(r, j)] = a;
            }
        }
        out
    }
}

/// Applies `a+_{c_1} ... a+_{c_r} a_{b_r} ... a_{b_1}` (sorted index lists) to
/// an occupation pattern, returning the new pattern and its fermionic sign.
pub(crate) fn apply_string(
    state: u64,
    create: &[usize],
    annihilate: &[usize],
) -> Option<(u64, f64)> {
    let mut s = state;
    let mut parity = 0u32;
    for &j in annihilate {
        let bit = 1u64 << j;
        if s & bit == 0 {
            return None;
        }
        parity += (s & (bit - 1)).count_ones();
        s &= !bit;
    }
    for &j in create.iter().rev() {
        let bit = 1u64 << j;
        if s & bit != 0 {
            return None;
        }
        parity += (s & (bit - 1)).count_ones();
        s |= bit;
    }
    Some((s, if parity.is_multiple_of(2) { 1.0 } else { -1.0 }))
}

fn for_each_subset(items: &[usize], r: usize, mut f: impl FnMut(&[usize])) {
    let n = items.len();
    if r > n {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    let mut pick = vec![0usize; r];
    loop {
        for (p, &i) in pick.iter_mut().zip(&idx) {
            *p = items[i];
        }
        f(&pick);
        let Some(pos) = (0..r).rev().find(|&i| idx[i] != i + n - r) else {
            return;
        };
        idx[pos] += 1;
        for i in pos + 1..r {
            idx[i] = idx[i - 1] + 1;
        }
    }
}

/// Embeds an `r`-body matrix `v` (indexed by the `r`-particle basis of the same
/// orbitals) into the `m`-particle space of `basis`:
/// `H = sum_{alpha, beta} v[alpha, beta] A+_alpha A_beta`.
pub fn embed<T: Entry>(v: &Mat<T>, rank: usize, basis: &FockBasis) -> Result<SparseMatrix<T>> {
    if rank > basis.particles() {
        return Err(domain(format!(
            "body rank {rank} exceeds particle number {}",
            basis.particles()
        )));
    }
    let body = build_basis_capped(basis.orbitals(), rank, v.nrows().max(1))?;
    if v.nrows() != body.len() || v.ncols() != body.len() {
        return Err(domain(format!(
            "body matrix is {}x{}, expected {} for rank {rank}",
            v.nrows(),
            v.ncols(),
            body.len()
        )));
    }
    let d = basis.len();
    let all: Vec<usize> = (0..basis.orbitals()).collect();
    let zero = T::from_real(0.0);
    let mut scratch = vec![zero; d];
    let mut touched = vec![false; d];
    let mut list = Vec::new();
    let (mut col_ptr, mut rows, mut values) = (vec![0], Vec::new(), Vec::new());
    for &ket in basis.states() {
        for_each_subset(&occupied(ket), rank, |beta| {
            let b = body
                .index_of(beta.iter().map(|&j| 1u64 << j).sum())
                .expect("subset in body basis");
            let (hole, s1) = apply_string(ket, &[], beta).expect("annihilating occupied orbitals");
            let free: Vec<usize> = all
                .iter()
                .copied()
                .filter(|&j| hole >> j & 1 == 0)
                .collect();
            for_each_subset(&free, rank, |alpha| {
                let a = body
                    .index_of(alpha.iter().map(|&j| 1u64 << j).sum())
                    .expect("subset in body basis");
                let (bra, s2) = apply_string(hole, alpha, &[]).expect("creating in empty orbitals");
                let n = basis.index_of(bra).expect("particle number conserved");
                if !touched[n] {
                    touched[n] = true;
                    list.push(n);
                }
                scratch[n] += v[(a, b)] * T::from_real(s1 * s2);
            });
        });
        list.sort_unstable();
        for &n in &list {
            rows.push(n);
            values.push(scratch[n]);
            scratch[n] = zero;
            touched[n] = false;
        }
        list.clear();
        col_ptr.push(rows.len());
    }
    Ok(SparseMatrix {
        dim: d,
        col_ptr,
        rows,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::basis::build_basis;
    use crate::ensemble::sampling::sample_body_matrix;
    use faer::c64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn subsets_enumerate_in_order() {
        let mut seen = Vec::new();
        for_each_subset(&[1, 3, 5, 7], 2, |s| seen.push(s.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![1, 3]);
        assert_eq!(seen[5], vec![5, 7]);
        let mut empty = 0;
        for_each_subset(&[1, 2], 0, |s| {
            assert!(s.is_empty());
            empty += 1
        });
        assert_eq!(empty, 1);
    }

    #[test]
    fn full_rank_is_identity_embedding() {
        let basis = build_basis(6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v: Mat<f64> = sample_body_matrix(&basis, &mut rng);
        let h = embed(&v, 3, &basis).unwrap().to_dense();
        assert_eq!(h, v);
    }

    #[test]
    fn one_body_diagonal_sums_occupied_energies() {
        let basis = build_basis(7, 3).unwrap();
        let eps = [0.5, -1.0, 2.0, 0.25, 3.0, -0.75, 1.5];
        let v = Mat::<f64>::from_fn(7, 7, |i, j| if i == j { eps[i] } else { 0.0 });
        let h = embed(&v, 1, &basis).unwrap().to_dense();
        for (n, &s) in basis.states().iter().enumerate() {
            let expect: f64 = occupied(s).iter().map(|&j| eps[j]).sum();
            assert_eq!(h[(n, n)], expect);
            for c in 0..basis.len() {
                if c != n {
                    assert_eq!(h[(n, c)], 0.0);
                }
            }
        }
    }

    #[test]
    fn embedding_is_hermitian() {
        let basis = build_basis(8, 4).unwrap();
        let body = build_basis(8, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let v: Mat<c64> = sample_body_matrix(&body, &mut rng);
            let h = embed(&v, 2, &basis).unwrap().to_dense();
            for i in 0..basis.len() {
                for j in 0..basis.len() {
                    assert_eq!(h[(i, j)], h[(j, i)].conj());
                }
            }
        }
    }

    #[test]
    fn zero_rank_is_scalar() {
        let basis = build_basis(5, 2).unwrap();
        let v = Mat::<f64>::from_fn(1, 1, |_, _| 2.5);
        let o = embed(&v, 0, &basis).unwrap();
        assert_eq!(o.nnz(), basis.len());
        assert_eq!(o.get(3, 3), 2.5);
        assert!((o.frobenius2() - 6.25 * 10.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_shapes() {
        let basis = build_basis(5, 2).unwrap();
        let v = Mat::<f64>::zeros(4, 4);
        assert!(embed(&v, 1, &basis).is_err());
        assert!(embed(&Mat::<f64>::zeros(10, 10), 3, &basis).is_err());
    }
}
