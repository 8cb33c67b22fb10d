use faer::Mat;

use super::sampling::Entry;
use crate::error::{Error, Result};

/// Residual bound `|H v - E v| < RESIDUAL_TOL * |H|` (Frobenius norm).
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Full spectrum of a self-adjoint matrix with orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigen<T> {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, ordered like `values`.
    pub vectors: Mat<T>,
    pub max_residual: f64,
}

impl<T: Entry> Eigen<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Centroid, variance and standardized fourth moment of the spectrum.
    pub fn spectral_moments(&self) -> (f64, f64, f64) {
        let d = self.dim() as f64;
        let c = self.values.iter().sum::<f64>() / d;
        let (mut m2, mut m4) = (0.0, 0.0);
        for &e in &self.values {
            let x = (e - c) * (e - c);
            m2 += x;
            m4 += x * x;
        }
        let var = m2 / d;
        (c, var, m4 / d / (var * var))
    }
}

pub(crate) fn col_slice<T: Entry>(m: &Mat<T>, j: usize) -> &[T] {
    m.col(j)
        .try_as_col_major()
        .expect("owned matrices are column major")
        .as_slice()
}

pub fn decompose<T: Entry>(h: &Mat<T>) -> Result<Eigen<T>> {
    let (values, vectors) = T::eigh(h)?;
    let norm = h.norm_l2();
    let hv = h * &vectors;
    let mut max_residual: f64 = 0.0;
    for (j, &e) in values.iter().enumerate() {
        let (a, b) = (col_slice(&hv, j), col_slice(&vectors, j));
        let r2: f64 = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| (x + y * T::from_real(-e)).norm2())
            .sum();
        max_residual = max_residual.max(r2.sqrt());
    }
    if !(max_residual <= RESIDUAL_TOL * norm.max(f64::MIN_POSITIVE)) {
        return Err(Error::ModelInconsistency(format!(
            "eigenvector residual {max_residual:e} exceeds {RESIDUAL_TOL:e} * |H| = {norm:e}"
        )));
    }
    Ok(Eigen {
        values,
        vectors,
        max_residual,
    })
}
