use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul};

use faer::traits::ComplexField;
use faer::{c64, Mat, Side};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::basis::FockBasis;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    /// EGOE: real symmetric body matrices.
    Orthogonal,
    /// EGUE: complex Hermitian body matrices.
    Unitary,
}

/// Matrix entry type of an ensemble: `f64` for orthogonal, `c64` for unitary.
pub trait Entry:
    ComplexField<Real = f64>
    + Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + 'static
{
    const KIND: EnsembleKind;
    fn from_real(x: f64) -> Self;
    fn conjugate(self) -> Self;
    fn norm2(self) -> f64;
    fn sample_diagonal<R: Rng + ?Sized>(rng: &mut R) -> Self;
    fn sample_off_diagonal<R: Rng + ?Sized>(rng: &mut R) -> Self;
    /// Ascending eigenvalues and eigenvectors (columns) of a self-adjoint matrix.
    fn eigh(m: &Mat<Self>) -> Result<(Vec<f64>, Mat<Self>)>;
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

impl Entry for f64 {
    const KIND: EnsembleKind = EnsembleKind::Orthogonal;

    fn from_real(x: f64) -> Self {
        x
    }

    fn conjugate(self) -> Self {
        self
    }

    fn norm2(self) -> f64 {
        self * self
    }

    /// Variance 2.
    fn sample_diagonal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        std::f64::consts::SQRT_2 * normal(rng)
    }

    /// Variance 1.
    fn sample_off_diagonal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        normal(rng)
    }

    fn eigh(m: &Mat<Self>) -> Result<(Vec<f64>, Mat<Self>)> {
        let evd = m
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::ModelInconsistency(format!("{e:?}")))?;
        let values = evd.S().column_vector().iter().copied().collect();
        Ok((values, evd.U().to_owned()))
    }
}

impl Entry for c64 {
    const KIND: EnsembleKind = EnsembleKind::Unitary;

    fn from_real(x: f64) -> Self {
        c64::new(x, 0.0)
    }

    fn conjugate(self) -> Self {
        self.conj()
    }

    fn norm2(self) -> f64 {
        self.norm_sqr()
    }

    /// Real, variance 1.
    fn sample_diagonal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        c64::new(normal(rng), 0.0)
    }

    /// `E|z|^2 = 1`, real and imaginary parts of variance 1/2.
    fn sample_off_diagonal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        c64::new(normal(rng), normal(rng)) * std::f64::consts::FRAC_1_SQRT_2
    }

    fn eigh(m: &Mat<Self>) -> Result<(Vec<f64>, Mat<Self>)> {
        let evd = m
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::ModelInconsistency(format!("{e:?}")))?;
        let values = evd.S().column_vector().iter().map(|z| z.re).collect();
        Ok((values, evd.U().to_owned()))
    }
}

/// A GOE (`f64`) or GUE (`c64`) matrix on the `r`-particle space `basis`.
pub fn sample_body_matrix<T: Entry, R: Rng + ?Sized>(basis: &FockBasis, rng: &mut R) -> Mat<T> {
    let d = basis.len();
    let mut v = Mat::<T>::zeros(d, d);
    for i in 0..d {
        v[(i, i)] = T::sample_diagonal(rng);
        for j in 0..i {
            let z = T::sample_off_diagonal(rng);
            v[(i, j)] = z;
            v[(j, i)] = z.conjugate();
        }
    }
    v
}
