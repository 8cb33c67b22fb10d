//! Bivariate and conditional q-normal densities and their reduced moments.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::qcore::{f_qn, integrate_1d, integrate_2d, truncation_order, QParams};

/// Absolute tolerance used for quadrature-based moments.
pub const MOMENT_TOL: f64 = 1e-9;

/// Correlation coefficient and deformation parameter of a bivariate q-normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivQNormalParams {
    rho: f64,
    qparams: QParams,
}

impl BivQNormalParams {
    pub fn new(rho: f64, q: f64) -> Result<Self> {
        Self::from_qparams(rho, QParams::new(q)?)
    }

    pub fn from_qparams(rho: f64, qparams: QParams) -> Result<Self> {
        if !(rho.abs() < 1.0) {
            return Err(domain(format!(
                "correlation rho = {rho} must satisfy |rho| < 1"
            )));
        }
        Ok(Self { rho, qparams })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn q(&self) -> f64 {
        self.qparams.q()
    }

    pub fn qparams(&self) -> &QParams {
        &self.qparams
    }
}

/// The factors of `h(x, y | rho, q)` with the x,y-independent parts folded in.
///
/// Evaluating many points with one kernel avoids recomputing powers of q.
#[derive(Debug, Clone)]
pub struct HKernel {
    params: BivQNormalParams,
    numerator: f64,
    // (constant, coefficient of xy, coefficient of x^2 + y^2) per factor
    factors: Vec<[f64; 3]>,
    // leading-order xy coefficient of the factors dropped by the cap
    tail: f64,
}

impl HKernel {
    pub fn new(params: BivQNormalParams) -> Self {
        let q = params.q();
        let rho = params.rho;
        let r2 = rho * rho;
        let mut numerator = 1.0;
        let mut factors = Vec::new();
        let mut tail = 0.0;
        if !params.qparams.gaussian_branch() && rho != 0.0 {
            let order = truncation_order(q, rho.abs());
            let mut qk = 1.0;
            for _ in 0..order {
                let q2k = qk * qk;
                numerator *= 1.0 - r2 * qk;
                let a = 1.0 - r2 * q2k;
                factors.push([
                    a * a,
                    (1.0 - q) * rho * qk * (1.0 + r2 * q2k),
                    (1.0 - q) * r2 * q2k,
                ]);
                qk *= q;
                if qk == 0.0 {
                    break;
                }
            }
            tail = rho * qk;
            while r2 * qk > f64::EPSILON * 1e-3 {
                numerator *= 1.0 - r2 * qk;
                qk *= q;
            }
        }
        Self {
            params,
            numerator,
            factors,
            tail,
        }
    }

    pub fn params(&self) -> &BivQNormalParams {
        &self.params
    }

    /// `h(x, y)` without support checks.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let rho = self.params.rho;
        if rho == 0.0 {
            return 1.0;
        }
        if self.params.qparams.gaussian_branch() {
            return mehler_kernel(x, y, rho);
        }
        let xy = x * y;
        let sq = x * x + y * y;
        let denominator: f64 = self
            .factors
            .iter()
            .map(|[a, b, c]| a - b * xy + c * sq)
            .product();
        self.numerator / denominator * (self.tail * xy).exp()
    }

    /// `f_biv(x, y)`; zero outside the support.
    pub fn density(&self, x: f64, y: f64) -> f64 {
        let qp = &self.params.qparams;
        if !qp.contains(x) || !qp.contains(y) {
            return 0.0;
        }
        if qp.gaussian_branch() {
            return bivariate_normal(x, y, self.params.rho);
        }
        f_qn(x, qp) * f_qn(y, qp) * self.eval(x, y)
    }
}

/// `q = 1` limit of `h`: ratio of the correlated and independent Gaussians.
fn mehler_kernel(x: f64, y: f64, rho: f64) -> f64 {
    let one_m = 1.0 - rho * rho;
    (-(rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * one_m)).exp() / one_m.sqrt()
}

fn bivariate_normal(x: f64, y: f64, rho: f64) -> f64 {
    let one_m = 1.0 - rho * rho;
    (-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * one_m)).exp() / (2.0 * PI * one_m.sqrt())
}

fn check_support(name: &str, v: f64, p: &BivQNormalParams) -> Result<()> {
    if p.qparams.contains(v) {
        Ok(())
    } else {
        Err(domain(format!(
            "{name} = {v} outside S(q) = (-{w}, {w})",
            w = p.qparams.support_halfwidth()
        )))
    }
}

/// The correlation factor `h(x, y | rho, q)`; both arguments must lie in `S(q)`.
pub fn h_factor(x: f64, y: f64, p: &BivQNormalParams) -> Result<f64> {
    check_support("x", x, p)?;
    check_support("y", y, p)?;
    Ok(HKernel::new(*p).eval(x, y))
}

/// Bivariate q-normal density `f_qN(x) f_qN(y) h(x, y)`.
pub fn f_biv(x: f64, y: f64, p: &BivQNormalParams) -> f64 {
    HKernel::new(*p).density(x, y)
}

/// Conditional density of `x` given `y`: `f_qN(x) h(x, y)`.
pub fn f_cond(x: f64, given_y: f64, p: &BivQNormalParams) -> Result<f64> {
    check_support("conditioning value", given_y, p)?;
    Ok(cond_density(&HKernel::new(*p), x, given_y))
}

pub(crate) fn cond_density(kernel: &HKernel, x: f64, given_y: f64) -> f64 {
    let p = kernel.params();
    let qp = p.qparams();
    if qp.gaussian_branch() {
        let one_m = 1.0 - p.rho * p.rho;
        let d = x - p.rho * given_y;
        return (-d * d / (2.0 * one_m)).exp() / (2.0 * PI * one_m).sqrt();
    }
    if !qp.contains(x) {
        return 0.0;
    }
    f_qn(x, qp) * kernel.eval(x, given_y)
}

/// Integrates `g(x)` against the conditional density at `given_y`.
pub fn integrate_conditional(
    g: impl Fn(f64) -> f64,
    given_y: f64,
    p: &BivQNormalParams,
    tol: f64,
) -> Result<f64> {
    check_support("conditioning value", given_y, p)?;
    let kernel = HKernel::new(*p);
    let w = p.qparams.integration_halfwidth();
    integrate_1d(|x| g(x) * cond_density(&kernel, x, given_y), -w, w, tol)
}

/// Integrates `g(x, y)` against the bivariate density over `S(q)^2`.
pub fn integrate_bivariate(
    g: impl Fn(f64, f64) -> f64,
    p: &BivQNormalParams,
    tol: f64,
) -> Result<f64> {
    let kernel = HKernel::new(*p);
    let w = p.qparams.integration_halfwidth();
    integrate_2d(|x, y| g(x, y) * kernel.density(x, y), (-w, w), (-w, w), tol)
}

/// Closed-form reduced central moment `mu_rs` for `r + s <= 6`.
pub fn analytic_moment(r: u32, s: u32, p: &BivQNormalParams) -> Result<f64> {
    if r + s > 6 {
        return Err(Error::UnsupportedMoment { r, s });
    }
    if (r + s) % 2 == 1 {
        return Ok(0.0);
    }
    let (r, s) = (r.max(s), r.min(s));
    let rho = p.rho;
    let q = p.q();
    let mu40 = 2.0 + q;
    let mu60 = 5.0 + 6.0 * q + 3.0 * q * q + q * q * q;
    let v = match (r, s) {
        (0, 0) | (2, 0) => 1.0,
        (1, 1) => rho,
        (4, 0) => mu40,
        (3, 1) => rho * mu40,
        (2, 2) => 1.0 + (1.0 + q) * rho * rho,
        (6, 0) => mu60,
        (5, 1) => rho * mu60,
        (4, 2) => mu40 + rho * rho * (3.0 + 5.0 * q + 3.0 * q * q + q * q * q),
        (3, 3) => mu40 * mu40 * rho + (1.0 + q) * (1.0 + q + q * q) * rho.powi(3),
        _ => unreachable!("all even r + s <= 6 with r >= s are listed"),
    };
    Ok(v)
}

/// `mu_rs` by two-dimensional quadrature of `x^r y^s f_biv`.
pub fn numeric_moment(r: u32, s: u32, p: &BivQNormalParams) -> Result<f64> {
    if r + s > 6 {
        return Err(Error::UnsupportedMoment { r, s });
    }
    integrate_bivariate(|x, y| x.powi(r as i32) * y.powi(s as i32), p, MOMENT_TOL)
}

/// The orders reported throughout: `(1,1)` and the `r >= s` pairs of order 4 and 6.
pub const MOMENT_ORDERS: [(u32, u32); 8] = [
    (1, 1),
    (4, 0),
    (3, 1),
    (2, 2),
    (6, 0),
    (5, 1),
    (4, 2),
    (3, 3),
];

/// Reduced bivariate moments keyed by `(r, s)`; symmetric partners are stored together.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MomentSet {
    entries: BTreeMap<(u32, u32), f64>,
}

impl MomentSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, r: u32, s: u32, value: f64) {
        self.entries.insert((r, s), value);
        self.entries.insert((s, r), value);
    }

    /// Stores `(r, s)` alone, for sets without exchange symmetry.
    pub fn insert_exact(&mut self, r: u32, s: u32, value: f64) {
        self.entries.insert((r, s), value);
    }

    /// Stored value, else zero for odd total order.
    pub fn get(&self, r: u32, s: u32) -> Option<f64> {
        match self.entries.get(&(r, s)) {
            Some(&v) => Some(v),
            None if (r + s) % 2 == 1 => Some(0.0),
            None => None,
        }
    }

    /// Attaches the standardization identities `mu_00 = mu_20 = 1`, `mu_10 = 0`.
    pub fn with_standardization(mut self) -> Self {
        self.insert(0, 0, 1.0);
        self.insert(1, 0, 0.0);
        self.insert(2, 0, 1.0);
        self
    }

    /// Closed-form moments of [`MOMENT_ORDERS`].
    pub fn analytic(p: &BivQNormalParams) -> Self {
        let mut set = Self::new();
        for (r, s) in MOMENT_ORDERS {
            set.insert(r, s, analytic_moment(r, s, p).expect("supported order"));
        }
        set
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Bivariate density sampled at cell centres of a square grid over `S(q)^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityGrid {
    pub params: BivQNormalParams,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major: `values[i * ys.len() + j] = f(xs[i], ys[j])`.
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub fn new(params: BivQNormalParams, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(domain(format!(
                "grid resolution must be at least 2, got {resolution}"
            )));
        }
        let w = params.qparams.integration_halfwidth();
        let step = 2.0 * w / resolution as f64;
        let axis: Vec<f64> = (0..resolution)
            .map(|i| -w + (i as f64 + 0.5) * step)
            .collect();
        let kernel = HKernel::new(params);
        let mut values = Vec::with_capacity(resolution * resolution);
        for &x in &axis {
            for &y in &axis {
                values.push(kernel.density(x, y));
            }
        }
        Ok(Self {
            params,
            xs: axis.clone(),
            ys: axis,
            values,
        })
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ys.len() + j]
    }

    pub fn cell_area(&self) -> f64 {
        (self.xs[1] - self.xs[0]) * (self.ys[1] - self.ys[0])
    }

    /// Midpoint-rule total mass.
    pub fn riemann_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area()
    }

    pub fn triples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.xs.iter().enumerate().flat_map(move |(i, &x)| {
            self.ys
                .iter()
                .enumerate()
                .map(move |(j, &y)| (x, y, self.value(i, j)))
        })
    }
}
