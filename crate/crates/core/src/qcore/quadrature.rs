//! Composite Gauss-Legendre quadrature under a cosine map.
//!
//! Substituting `x = mid + half * cos(theta)` turns integrands that vanish
//! like a square root at both ends of `[a, b]` into smooth periodic-like
//! functions of `theta`, so uniform Gauss-Legendre panels in `theta`
//! converge geometrically. Refinement doubles the panel count until two
//! successive estimates agree within the target tolerance.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{domain, Error, Result};

/// Gauss-Legendre order used inside every panel.
pub const PANEL_ORDER: usize = 16;
pub const MAX_PANELS_1D: usize = 4096;
pub const MAX_PANELS_2D: usize = 256;
const START_PANELS: usize = 2;

/// Nodes and weights of the `n`-point rule on `[-1, 1]`, by Newton iteration
/// on the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

/// A fixed set of abscissae and positive weights on an open interval.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub target_tol: f64,
}

impl QuadratureGrid {
    /// `panels` equal Gauss-Legendre panels in `theta` mapped onto `[a, b]`.
    pub fn cosine_panels(a: f64, b: f64, panels: usize, target_tol: f64) -> Self {
        let (gl_x, gl_w) = panel_rule();
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let width = PI / panels as f64;
        let n = panels * PANEL_ORDER;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        // Walk theta from pi down to 0 so that x increases.
        for p in (0..panels).rev() {
            let centre = (p as f64 + 0.5) * width;
            for (t, w) in gl_x.iter().zip(gl_w).rev() {
                let theta = centre + 0.5 * width * t;
                nodes.push(mid + half * theta.cos());
                weights.push(0.5 * width * w * half * theta.sin());
            }
        }
        Self {
            nodes,
            weights,
            target_tol,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(domain(format!("invalid integration interval [{a}, {b}]")));
    }
    Ok(())
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    check_interval(a, b)?;
    let mut panels = START_PANELS;
    let mut previous = QuadratureGrid::cosine_panels(a, b, panels, tol).apply(&f);
    loop {
        panels *= 2;
        let estimate = QuadratureGrid::cosine_panels(a, b, panels, tol).apply(&f);
        if (estimate - previous).abs() <= tol {
            return Ok(estimate);
        }
        if panels >= MAX_PANELS_1D {
            return Err(Error::Quadrature {
                panels,
                previous,
                last: estimate,
            });
        }
        previous = estimate;
    }
}

fn tensor_apply(gx: &QuadratureGrid, gy: &QuadratureGrid, f: &impl Fn(f64, f64) -> f64) -> f64 {
    let mut total = 0.0;
    for (&x, &wx) in gx.nodes.iter().zip(&gx.weights) {
        let row: f64 = gy
            .nodes
            .iter()
            .zip(&gy.weights)
            .map(|(&y, &wy)| wy * f(x, y))
            .sum();
        total += wx * row;
    }
    total
}

/// Tensor-product integration over `[a, b] x [c, d]`; both axes are refined together.
pub fn integrate_2d(
    f: impl Fn(f64, f64) -> f64,
    (a, b): (f64, f64),
    (c, d): (f64, f64),
    tol: f64,
) -> Result<f64> {
    check_interval(a, b)?;
    check_interval(c, d)?;
    let grids = |panels| {
        (
            QuadratureGrid::cosine_panels(a, b, panels, tol),
            QuadratureGrid::cosine_panels(c, d, panels, tol),
        )
    };
    let mut panels = START_PANELS;
    let (gx, gy) = grids(panels);
    let mut previous = tensor_apply(&gx, &gy, &f);
    loop {
        panels *= 2;
        let (gx, gy) = grids(panels);
        let estimate = tensor_apply(&gx, &gy, &f);
        if (estimate - previous).abs() <= tol {
            return Ok(estimate);
        }
        if panels >= MAX_PANELS_2D {
            return Err(Error::Quadrature {
                panels,
                previous,
                last: estimate,
            });
        }
        previous = estimate;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(PANEL_ORDER);
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        for deg in 0..2 * PANEL_ORDER {
            let got: f64 = x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| wi * xi.powi(deg as i32))
                .sum();
            let exact = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            assert_abs_diff_eq!(got, exact, epsilon = 1e-14);
        }
    }

    #[test]
    fn grid_invariants() {
        let g = QuadratureGrid::cosine_panels(-3.0, 5.0, 8, 1e-10);
        assert_eq!(g.nodes.len(), g.weights.len());
        assert!(g.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(g.nodes.iter().all(|&x| x > -3.0 && x < 5.0));
        assert!(g.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn square_root_endpoints() {
        // Area of the unit half disc.
        let v = integrate_1d(|x| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, 1e-13).unwrap();
        assert_abs_diff_eq!(v, PI / 2.0, epsilon = 1e-13);
    }

    #[test]
    fn two_dimensional_product() {
        let v = integrate_2d(
            |x, y| (1.0 - x * x).sqrt() * (4.0 - y * y).sqrt() * x * x,
            (-1.0, 1.0),
            (-2.0, 2.0),
            1e-12,
        )
        .unwrap();
        assert_abs_diff_eq!(v, PI / 8.0 * 2.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn non_convergence_reports_estimates() {
        let err = integrate_1d(|x| (1e4 * x).sin().abs(), 0.0, 1.0, 1e-15).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(integrate_1d(|x| x, 1.0, 1.0, 1e-8).is_err());
        assert!(integrate_1d(|x| x, 0.0, f64::INFINITY, 1e-8).is_err());
    }
}
