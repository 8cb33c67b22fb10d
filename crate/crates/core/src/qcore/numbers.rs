//! q-deformed integers, factorials and binomial coefficients.

use crate::error::{domain, Result};

pub(crate) fn check_q(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(domain(format!("q = {q} outside [0, 1]")));
    }
    Ok(())
}

fn check_n(n: i64) -> Result<u64> {
    u64::try_from(n).map_err(|_| domain(format!("negative order n = {n}")))
}

/// `[n]_q = 1 + q + ... + q^(n-1)` without argument checks.
pub(crate) fn qnum(n: u64, q: f64) -> f64 {
    if n == 0 {
        0.0
    } else if q == 1.0 {
        n as f64
    } else if q == 0.0 {
        1.0
    } else {
        // expm1 keeps full relative precision as q -> 1.
        -(n as f64 * q.ln()).exp_m1() / (1.0 - q)
    }
}

pub(crate) fn ln_qfact(n: u64, q: f64) -> f64 {
    (1..=n).map(|j| qnum(j, q).ln()).sum()
}

/// The q-number `[n]_q = (1 - q^n) / (1 - q)`, equal to `n` at `q = 1`.
pub fn q_number(n: i64, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(qnum(check_n(n)?, q))
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`, with `[0]_q! = 1`.
pub fn q_factorial(n: i64, q: f64) -> Result<f64> {
    check_q(q)?;
    let n = check_n(n)?;
    Ok((1..=n).map(|j| qnum(j, q)).product())
}

/// Gaussian binomial coefficient `[n]_q! / ([n-k]_q! [k]_q!)`.
pub fn q_binomial(n: i64, k: i64, q: f64) -> Result<f64> {
    check_q(q)?;
    if k < 0 || k > n {
        return Err(domain(format!(
            "q-binomial needs n >= k >= 0, got n = {n}, k = {k}"
        )));
    }
    let (n, k) = (n as u64, k as u64);
    let k = k.min(n - k);
    if n > 60 {
        let ln = ln_qfact(n, q) - ln_qfact(n - k, q) - ln_qfact(k, q);
        return Ok(ln.exp());
    }
    // Product of k ratios [n-k+j]/[j] avoids forming large factorials.
    Ok((1..=k).map(|j| qnum(n - k + j, q) / qnum(j, q)).product())
}
