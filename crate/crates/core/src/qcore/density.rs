//! The univariate q-normal density and its support.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::numbers::check_q;
use crate::error::Result;

/// Above this q the closed-form Gaussian limit replaces the q-normal formulas.
pub const GAUSSIAN_SWITCHOVER: f64 = 1.0 - 1e-6;

/// Infinite products are cut once the next power of q drops below this.
pub const PRODUCT_CUTOFF: f64 = 1e-16;

/// Hard limit on the number of factors kept in an infinite product.
pub const PRODUCT_CAP: usize = 2000;

/// Integration windows never extend past this many standard widths; every
/// density here has sub-Gaussian tails, so the mass beyond is far below 1e-30.
pub const TAIL_CUTOFF: f64 = 12.0;

/// Deformation parameter together with the support `S(q) = (-w, w)`,
/// `w = 2 / sqrt(1 - q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QParams {
    q: f64,
    support_halfwidth: f64,
    gaussian_branch: bool,
}

impl QParams {
    pub fn new(q: f64) -> Result<Self> {
        check_q(q)?;
        let gaussian_branch = q > GAUSSIAN_SWITCHOVER;
        let support_halfwidth = if q < 1.0 {
            2.0 / (1.0 - q).sqrt()
        } else {
            f64::INFINITY
        };
        Ok(Self {
            q,
            support_halfwidth,
            gaussian_branch,
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `2 / sqrt(1 - q)`; infinite at `q = 1`.
    pub fn support_halfwidth(&self) -> f64 {
        self.support_halfwidth
    }

    pub fn gaussian_branch(&self) -> bool {
        self.gaussian_branch
    }

    /// Whether `x` lies in the closed support (always true on the Gaussian branch).
    pub fn contains(&self, x: f64) -> bool {
        self.gaussian_branch || x.abs() <= self.support_halfwidth
    }

    /// Symmetric finite interval carrying all of the density's mass.
    pub fn integration_halfwidth(&self) -> f64 {
        if self.gaussian_branch {
            TAIL_CUTOFF
        } else {
            self.support_halfwidth.min(TAIL_CUTOFF)
        }
    }

    /// Number of factors kept in the infinite products: smallest `K` with
    /// `q^K < PRODUCT_CUTOFF`, capped at [`PRODUCT_CAP`].
    pub fn truncation_order(&self) -> usize {
        truncation_order(self.q, 1.0)
    }
}

/// Smallest `K >= 1` with `scale * q^K < PRODUCT_CUTOFF`, capped.
pub(crate) fn truncation_order(q: f64, scale: f64) -> usize {
    if q == 0.0 || scale == 0.0 {
        return 1;
    }
    if q >= 1.0 {
        return PRODUCT_CAP;
    }
    let k = ((PRODUCT_CUTOFF / scale).ln() / q.ln()).floor() as usize + 1;
    k.clamp(1, PRODUCT_CAP)
}

pub fn standard_normal(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// The q-normal density `f_qN(x|q)`: zero outside `S(q)`, the standard
/// normal on the Gaussian branch.
///
/// With `x = 2 cos(theta) / sqrt(1 - q)` the product form collapses to a
/// Jacobi theta function, which is summed either as its q-series (small q)
/// or after Poisson resummation (q near 1). Both converge in a handful of
/// terms, unlike the product, which needs `O(1 / (1 - q))` factors.
pub fn f_qn(x: f64, params: &QParams) -> f64 {
    if params.gaussian_branch {
        return standard_normal(x);
    }
    let q = params.q;
    let c = x * (1.0 - q).sqrt() / 2.0;
    if c.abs() >= 1.0 {
        return 0.0;
    }
    let theta = c.acos();
    let density = if q <= 0.5 {
        theta_series(theta, q)
    } else {
        theta_resummed(theta, q)
    };
    density.max(0.0)
}

/// `sqrt(1-q)/pi * sum_n (-1)^n q^{n(n+1)/2} sin((2n+1) theta)`.
fn theta_series(theta: f64, q: f64) -> f64 {
    let mut sum = theta.sin();
    if q > 0.0 {
        let lnq = q.ln();
        for n in 1.. {
            let weight = (0.5 * (n * (n + 1)) as f64 * lnq).exp();
            if weight < 1e-18 {
                break;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * weight * ((2 * n + 1) as f64 * theta).sin();
        }
    }
    (1.0 - q).sqrt() / PI * sum
}

/// Same function via `theta_1(z, e^{-a}) = sqrt(pi/a) sum_j (-1)^j exp(-(z - pi/2 - pi j)^2 / a)`
/// with `a = -ln(q) / 2`.
fn theta_resummed(theta: f64, q: f64) -> f64 {
    let a = -0.5 * q.ln();
    let reach = (0.5 + (45.0 * a).sqrt() / PI).ceil() as i64 + 1;
    let mut sum = 0.0;
    for j in -reach..=reach {
        let shift = theta - FRAC_PI_2 - PI * j as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (-shift * shift / a).exp();
    }
    let theta1 = (PI / a).sqrt() * sum;
    (1.0 - q).sqrt() * theta1 / (2.0 * PI * q.powf(0.125))
}

/// The literal truncated product form of the q-normal density.
///
/// Retained as an independent evaluation route; it needs `O(1/(1-q))`
/// factors and is only accurate while [`QParams::truncation_order`] stays
/// below the cap.
pub fn f_qn_product(x: f64, params: &QParams) -> f64 {
    if params.gaussian_branch {
        return standard_normal(x);
    }
    let q = params.q;
    let s = 4.0 - (1.0 - q) * x * x;
    if s <= 0.0 {
        return 0.0;
    }
    let k_max = params.truncation_order();
    // The k = 0 factor of the second product, 4 - (1-q)x^2, cancels the
    // square root in the prefactor down to sqrt(s).
    let mut log_sum = 0.5 * (1.0 - q).ln() + 0.5 * s.ln() - (2.0 * PI).ln();
    let mut qk = 1.0;
    for _ in 1..=k_max {
        qk *= q;
        if qk == 0.0 {
            break;
        }
        let pochhammer = 1.0 - qk;
        let factor = (1.0 + qk) * (1.0 + qk) - (1.0 - q) * qk * x * x;
        log_sum += pochhammer.ln() + factor.ln();
    }
    log_sum.exp()
}
