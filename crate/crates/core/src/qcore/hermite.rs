//! q-Hermite polynomials `H_n(x|q)` by three-term recurrence.

use super::numbers::{check_q, qnum};
use crate::error::{domain, Result};

/// Highest polynomial degree the library evaluates.
pub const MAX_DEGREE: usize = 64;

/// Values `H_0(x|q) ..= H_{max_degree}(x|q)` at a single abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteTable {
    pub q: f64,
    pub x: f64,
    pub values: Vec<f64>,
}

impl HermiteTable {
    pub fn new(x: f64, q: f64, max_degree: usize) -> Result<Self> {
        check_q(q)?;
        if max_degree > MAX_DEGREE {
            return Err(domain(format!(
                "degree {max_degree} above the supported maximum {MAX_DEGREE}"
            )));
        }
        Ok(Self {
            q,
            x,
            values: hermite_values(x, q, max_degree),
        })
    }

    pub fn max_degree(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }
}

/// Upward recurrence `H_{n+1} = x H_n - [n]_q H_{n-1}`, unchecked.
pub(crate) fn hermite_values(x: f64, q: f64, max_degree: usize) -> Vec<f64> {
    let mut values = Vec::with_capacity(max_degree + 1);
    values.push(1.0);
    if max_degree >= 1 {
        values.push(x);
    }
    for n in 1..max_degree {
        let next = x * values[n] - qnum(n as u64, q) * values[n - 1];
        values.push(next);
    }
    values
}

/// Evaluates `H_n(x|q)`.
pub fn hermite_q(n: usize, x: f64, q: f64) -> Result<f64> {
    Ok(HermiteTable::new(x, q, n)?.get(n))
}

/// Coefficients `c_0..=c_p` with `x^p = sum_n c_n H_n(x|q)`, for `p <= 6`.
pub fn power_in_hermite_basis(p: usize, q: f64) -> Result<Vec<f64>> {
    check_q(q)?;
    let (q2, q3, q4, q5) = (q * q, q * q * q, q.powi(4), q.powi(5));
    let sixth = 5.0 + 6.0 * q + 3.0 * q2 + q3;
    let coeffs = match p {
        0 => vec![1.0],
        1 => vec![0.0, 1.0],
        2 => vec![1.0, 0.0, 1.0],
        3 => vec![0.0, 2.0 + q, 0.0, 1.0],
        4 => vec![2.0 + q, 0.0, 3.0 + 2.0 * q + q2, 0.0, 1.0],
        5 => vec![0.0, sixth, 0.0, 4.0 + 3.0 * q + 2.0 * q2 + q3, 0.0, 1.0],
        6 => vec![
            sixth,
            0.0,
            9.0 + 13.0 * q + 12.0 * q2 + 7.0 * q3 + 3.0 * q4 + q5,
            0.0,
            5.0 + 4.0 * q + 3.0 * q2 + 2.0 * q3 + q4,
            0.0,
            1.0,
        ],
        _ => {
            return Err(domain(format!(
                "power expansion only tabulated for p <= 6, got {p}"
            )))
        }
    };
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Expansion of x^p derived independently by repeated use of
    /// `x H_n = H_{n+1} + [n]_q H_{n-1}`.
    fn expansion_by_recurrence(p: usize, q: f64) -> Vec<f64> {
        let mut c = vec![1.0];
        for _ in 0..p {
            let mut next = vec![0.0; c.len() + 1];
            for (n, &cn) in c.iter().enumerate() {
                next[n + 1] += cn;
                if n >= 1 {
                    next[n - 1] += cn * qnum(n as u64, q);
                }
            }
            c = next;
        }
        c
    }

    #[test]
    fn recurrence_examples() {
        assert_abs_diff_eq!(hermite_q(3, 2.0, 1.0).unwrap(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(hermite_q(2, 2.0, 0.5).unwrap(), 3.0, epsilon = 1e-14);
        for q in [0.0, 0.3, 1.0] {
            assert_eq!(hermite_q(1, -0.7, q).unwrap(), -0.7);
            assert_eq!(hermite_q(0, 3.1, q).unwrap(), 1.0);
        }
    }

    #[test]
    fn q_zero_gives_chebyshev_second_kind() {
        let x = 0.6;
        let t = x / 2.0;
        // U_{n+1}(t) = 2t U_n(t) - U_{n-1}(t)
        let mut u = vec![1.0, 2.0 * t];
        for n in 1..10 {
            u.push(2.0 * t * u[n] - u[n - 1]);
        }
        for (n, un) in u.iter().enumerate() {
            assert_abs_diff_eq!(hermite_q(n, x, 0.0).unwrap(), *un, epsilon = 1e-13);
        }
    }

    #[test]
    fn q_one_gives_probabilists_hermite() {
        let x: f64 = 1.3;
        let he4 = x.powi(4) - 6.0 * x * x + 3.0;
        assert_abs_diff_eq!(hermite_q(4, x, 1.0).unwrap(), he4, epsilon = 1e-13);
    }

    #[test]
    fn tabulated_expansion_matches_recurrence() {
        for q in [0.0, 0.25, 0.622, 1.0] {
            for p in 0..=6 {
                let table = power_in_hermite_basis(p, q).unwrap();
                let oracle = expansion_by_recurrence(p, q);
                assert_eq!(table.len(), p + 1);
                for (a, b) in table.iter().zip(&oracle) {
                    assert_abs_diff_eq!(*a, *b, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn expansion_examples() {
        let q = 0.4;
        assert_eq!(
            power_in_hermite_basis(3, q).unwrap(),
            vec![0.0, 2.0 + q, 0.0, 1.0]
        );
        assert_eq!(
            power_in_hermite_basis(6, 0.0).unwrap(),
            vec![5.0, 0.0, 9.0, 0.0, 5.0, 0.0, 1.0]
        );
        assert_eq!(power_in_hermite_basis(1, 0.7).unwrap(), vec![0.0, 1.0]);
        assert!(power_in_hermite_basis(7, 0.7).is_err());
    }

    #[test]
    fn table_limits() {
        assert!(HermiteTable::new(0.0, 0.5, MAX_DEGREE).is_ok());
        assert!(HermiteTable::new(0.0, 0.5, MAX_DEGREE + 1).is_err());
        assert!(HermiteTable::new(0.0, -0.5, 3).is_err());
    }
}
