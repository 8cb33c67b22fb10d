//! Combinatorial predictions for EGOE/EGUE transition strength moments.
//!
//! Dilute-limit formulas (binary correlation approximation) give the
//! correlation coefficient, the q parameter and the fourth and sixth order
//! reduced moments together with their deviations from the bivariate
//! q-normal values. Finite-N formulas for `rho` and `q` come from the
//! unitary decomposition of the k-body and t-body operators.

use serde::{Deserialize, Serialize};

use crate::bivariate::{analytic_moment, BivQNormalParams, MomentSet, MOMENT_ORDERS};
use crate::error::{domain, Error, Result};

/// Binomial coefficient as an exact integer, `None` on overflow or invalid arguments.
pub fn binomial_exact(n: i64, k: i64) -> Option<u128> {
    if n < 0 || k < 0 || k > n {
        return None;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut c: u128 = 1;
    for j in 1..=k {
        // c * (n - k + j) is divisible by j; cancel the common factor first
        // so the intermediate never exceeds the result by more than j.
        let g = gcd(c, j);
        c = (c / g).checked_mul((n - k + j) / (j / g))?;
    }
    Some(c)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Binomial coefficient with the convention that out-of-range arguments give 0.
///
/// Exact for anything that fits in 128 bits, log-summed otherwise.
pub fn binomial(n: i64, k: i64) -> f64 {
    if n < 0 || k < 0 || k > n {
        return 0.0;
    }
    match binomial_exact(n, k) {
        Some(c) => c as f64,
        None => {
            let k = k.min(n - k);
            (1..=k)
                .map(|j| ((n - k + j) as f64 / j as f64).ln())
                .sum::<f64>()
                .exp()
        }
    }
}

/// `m` fermions in `N` single-particle states, Hamiltonian of body rank `k`
/// and transition operator of body rank `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemSpec {
    pub orbitals: usize,
    pub particles: usize,
    pub body_rank: usize,
    pub transition_rank: usize,
}

impl SystemSpec {
    pub fn new(
        orbitals: usize,
        particles: usize,
        body_rank: usize,
        transition_rank: usize,
    ) -> Result<Self> {
        let spec = Self {
            orbitals,
            particles,
            body_rank,
            transition_rank,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let Self {
            orbitals: n,
            particles: m,
            body_rank: k,
            transition_rank: t,
        } = *self;
        if !(1 <= k && k <= m && m <= n) {
            return Err(domain(format!(
                "need 1 <= k <= m <= N, got N = {n}, m = {m}, k = {k}"
            )));
        }
        if t > m {
            return Err(domain(format!("transition rank t = {t} exceeds m = {m}")));
        }
        if binomial_exact(n as i64, m as i64).is_none() {
            return Err(domain(format!("dimension binomial({n}, {m}) overflows")));
        }
        Ok(())
    }

    /// Many-particle dimension `binomial(N, m)`.
    pub fn dimension(&self) -> u128 {
        binomial_exact(self.orbitals as i64, self.particles as i64).unwrap_or(0)
    }

    pub fn with_ranks(&self, body_rank: usize, transition_rank: usize) -> Result<Self> {
        Self::new(self.orbitals, self.particles, body_rank, transition_rank)
    }

    fn mkt(&self) -> (i64, i64, i64) {
        (
            self.particles as i64,
            self.body_rank as i64,
            self.transition_rank as i64,
        )
    }
}

/// Dilute-limit correlation coefficient `binom(m-t, k) / binom(m, k)`.
pub fn rho_dilute(s: &SystemSpec) -> f64 {
    let (m, k, t) = s.mkt();
    binomial(m - t, k) / binomial(m, k)
}

/// Dilute-limit `q = binom(m-k, k) / binom(m, k)`; zero once `2k > m`.
pub fn q_dilute(s: &SystemSpec) -> f64 {
    let (m, k, _) = s.mkt();
    binomial(m - k, k) / binomial(m, k)
}

/// Deviations of the binary-correlation moments from the bivariate q-normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corrections {
    pub delta0: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub y: f64,
    pub x: f64,
    pub z: f64,
}

pub fn correction_terms(s: &SystemSpec) -> Corrections {
    let (m, k, t) = s.mkt();
    let b = binomial(m, k);
    let rho = rho_dilute(s);
    let q = q_dilute(s);

    let delta0 = binomial(m - k - t, k) / b - binomial(m - t, k) * binomial(m - k, k) / (b * b);
    let delta1 = binomial(m - 2 * k, k) / b - q * q;
    let delta2 = binomial(m - t - 2 * k, k) / b - binomial(m - k - t, k) / b * q;
    let y = (k..=2 * k)
        .map(|nu| binomial(m - 2 * nu, k) * binomial(m - t - k, nu - k) * binomial(k, 2 * k - nu))
        .sum::<f64>()
        / (b * b);
    // Assembled term by term as printed, including the bare -rho q^2.
    let x = delta0 * (3.0 + 2.0 * q + delta1 + q * q) + rho * q * delta1 - rho * q * q + y;
    let z = 2.0 * delta0 * delta0
        + 4.0 * rho * q * delta0
        + 2.0 * rho * delta0
        + delta0 * (q * q * rho + q * delta0 + delta2)
        + rho * q * (q * delta0 + delta2);
    Corrections {
        delta0,
        delta1,
        delta2,
        y,
        x,
        z,
    }
}

/// Correction added to the bivariate q-normal value of `mu_rs`
/// (`rho D0` for mu22, `q D1` for mu60, `rho X` for mu42, `rho Z` for mu33).
pub fn moment_correction(r: u32, s: u32, spec: &SystemSpec) -> Result<f64> {
    check_order(r, s)?;
    let c = correction_terms(spec);
    let rho = rho_dilute(spec);
    let q = q_dilute(spec);
    Ok(match (r.max(s), r.min(s)) {
        (2, 2) => rho * c.delta0,
        (6, 0) => q * c.delta1,
        (4, 2) => rho * c.x,
        (3, 3) => rho * c.z,
        (5, 1) => rho * q * c.delta1,
        _ => 0.0,
    })
}

fn check_order(r: u32, s: u32) -> Result<()> {
    let canonical = (r.max(s), r.min(s));
    if MOMENT_ORDERS.contains(&canonical) {
        Ok(())
    } else {
        Err(Error::UnsupportedMoment { r, s })
    }
}

/// Dilute-limit EGOE reduced moment `mu^E_rs`.
///
/// `mu51 = rho mu60` holds for the EGOE values themselves, so its correction
/// is `rho` times that of mu60.
pub fn egoe_moment(r: u32, s: u32, spec: &SystemSpec) -> Result<f64> {
    check_order(r, s)?;
    let params = dilute_params(spec)?;
    Ok(analytic_moment(r, s, &params)? + moment_correction(r, s, spec)?)
}

fn dilute_params(spec: &SystemSpec) -> Result<BivQNormalParams> {
    // rho = 1 only for the identity operator (t = 0); keep it just inside
    // the admissible range so the closed forms stay usable.
    let rho = rho_dilute(spec).min(1.0 - f64::EPSILON);
    BivQNormalParams::new(rho, q_dilute(spec))
}

/// `Lambda^nu(N, m, r) = binom(m - nu, r) binom(N - m + r - nu, r)`.
pub fn lambda_factor(n: usize, m: usize, r: i64, nu: usize) -> f64 {
    let (n, m, nu) = (n as i64, m as i64, nu as i64);
    binomial(m - nu, r) * binomial(n - m + r - nu, r)
}

/// Dimension of the `U(N)` irrep `g_nu`: `binom(N, nu)^2 - binom(N, nu - 1)^2`.
pub fn d_gnu(n: usize, nu: usize) -> f64 {
    let (n, nu) = (n as i64, nu as i64);
    binomial(n, nu).powi(2) - binomial(n, nu - 1).powi(2)
}

/// Finite-N `q` of the k-body ensemble.
pub fn q_finite_n(s: &SystemSpec) -> f64 {
    let (n, m, k) = (s.orbitals, s.particles, s.body_rank);
    let (mi, ki) = (m as i64, k as i64);
    let top = k.min(m - k);
    let lambda0 = lambda_factor(n, m, ki, 0);
    let sum: f64 = (0..=top)
        .map(|nu| lambda_factor(n, m, mi - ki, nu) * lambda_factor(n, m, ki, nu) * d_gnu(n, nu))
        .sum();
    sum / (binomial(n as i64, mi) * lambda0 * lambda0)
}

/// Finite-N correlation coefficient for a t-body operator.
pub fn rho_finite_n(s: &SystemSpec) -> f64 {
    let (n, m, k, t) = (s.orbitals, s.particles, s.body_rank, s.transition_rank);
    let (mi, ki, ti) = (m as i64, k as i64, t as i64);
    let top = t.min(m - k);
    let sum: f64 = (0..=top)
        .map(|nu| lambda_factor(n, m, mi - ti, nu) * lambda_factor(n, m, ki, nu) * d_gnu(n, nu))
        .sum();
    sum / (binomial(n as i64, mi) * lambda_factor(n, m, ki, 0) * lambda_factor(n, m, ti, 0))
}

/// All predictor outputs for one system.
#[derive(Debug, Clone, PartialEq)]
pub struct EgoePrediction {
    pub spec: SystemSpec,
    pub rho_dilute: f64,
    pub q_dilute: f64,
    pub rho_finite_n: f64,
    pub q_finite_n: f64,
    /// EGOE values of the moments in [`MOMENT_ORDERS`].
    pub moments: MomentSet,
    /// Additive corrections relative to the bivariate q-normal.
    pub corrections: MomentSet,
    pub terms: Corrections,
}

impl EgoePrediction {
    pub fn new(spec: SystemSpec) -> Result<Self> {
        spec.validate()?;
        let mut moments = MomentSet::new();
        let mut corrections = MomentSet::new();
        for (r, s) in MOMENT_ORDERS {
            moments.insert(r, s, egoe_moment(r, s, &spec)?);
            corrections.insert(r, s, moment_correction(r, s, &spec)?);
        }
        Ok(Self {
            spec,
            rho_dilute: rho_dilute(&spec),
            q_dilute: q_dilute(&spec),
            rho_finite_n: rho_finite_n(&spec),
            q_finite_n: q_finite_n(&spec),
            moments,
            corrections,
            terms: correction_terms(&spec),
        })
    }
}
