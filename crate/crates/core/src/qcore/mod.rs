//! q-deformed numbers, q-Hermite polynomials, the q-normal density and the
//! quadrature used to integrate over its support.

mod density;
mod hermite;
mod numbers;
mod quadrature;

pub(crate) use density::truncation_order;
pub use density::{
    f_qn, f_qn_product, standard_normal, QParams, GAUSSIAN_SWITCHOVER, PRODUCT_CAP, PRODUCT_CUTOFF,
    TAIL_CUTOFF,
};
#[cfg(test)]
pub(crate) use hermite::hermite_values;
pub use hermite::{hermite_q, power_in_hermite_basis, HermiteTable, MAX_DEGREE};
#[cfg(test)]
pub(crate) use numbers::qnum;
pub use numbers::{q_binomial, q_factorial, q_number};
pub use quadrature::{
    gauss_legendre, integrate_1d, integrate_2d, QuadratureGrid, MAX_PANELS_1D, MAX_PANELS_2D,
    PANEL_ORDER,
};

use crate::error::Result;

/// Integrates `f` over the effective
/// support of `params` (clipped to [`TAIL_CUTOFF`] for wide supports).
pub fn integrate_over_support(f: impl Fn(f64) -> f64, params: &QParams, tol: f64) -> Result<f64> {
    let w = params.integration_halfwidth();
    integrate_1d(f, -w, w, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normalization_and_weight_function() {
        let semi = QParams::new(0.0).unwrap();
        let total = integrate_over_support(|x| f_qn(x, &semi), &semi, 1e-12).unwrap();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);

        let p = QParams::new(0.5).unwrap();
        let h22 = integrate_over_support(
            |x| hermite_q(2, x, 0.5).unwrap().powi(2) * f_qn(x, &p),
            &p,
            1e-12,
        )
        .unwrap();
        assert_abs_diff_eq!(h22, 1.5, epsilon = 1e-10);

        let p = QParams::new(0.3).unwrap();
        let h12 = integrate_over_support(
            |x| x * hermite_q(2, x, 0.3).unwrap() * f_qn(x, &p),
            &p,
            1e-12,
        )
        .unwrap();
        assert_abs_diff_eq!(h12, 0.0, epsilon = 1e-10);
    }
}
