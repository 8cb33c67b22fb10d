use approx::assert_abs_diff_eq;
use qbiv::bivariate::{
    analytic_moment, f_biv, f_cond, integrate_bivariate, integrate_conditional, numeric_moment,
    BivQNormalParams, MOMENT_ORDERS,
};
use qbiv::qcore::{f_qn, hermite_q, q_factorial};

const GRID: [f64; 4] = [0.0, 0.3, 0.6, 0.9];

#[test]
fn numeric_moments_match_closed_forms() {
    for rho in GRID {
        for q in GRID {
            let p = BivQNormalParams::new(rho, q).unwrap();
            for (r, s) in MOMENT_ORDERS {
                let a = analytic_moment(r, s, &p).unwrap();
                let n = numeric_moment(r, s, &p).unwrap();
                assert!(
                    (a - n).abs() < 1e-6,
                    "rho={rho} q={q} ({r},{s}): {n} vs {a}"
                );
            }
        }
    }
}

#[test]
fn densities_normalized() {
    for (rho, q) in [(0.0, 0.0), (0.5, 0.2), (0.8, 0.6), (-0.4, 0.9), (0.3, 1.0)] {
        let p = BivQNormalParams::new(rho, q).unwrap();
        assert_abs_diff_eq!(
            integrate_bivariate(|_, _| 1.0, &p, 1e-11).unwrap(),
            1.0,
            epsilon = 1e-8
        );
        for y in [0.0, 0.9, -1.4] {
            assert_abs_diff_eq!(
                integrate_conditional(|_| 1.0, y, &p, 1e-11).unwrap(),
                1.0,
                epsilon = 1e-8
            );
        }
    }
}

#[test]
fn conditional_moments_of_hermite_polynomials() {
    for (rho, q) in [(0.6, 0.0), (0.5, 0.4), (-0.7, 0.8)] {
        let p = BivQNormalParams::new(rho, q).unwrap();
        for y in [0.3, -1.1] {
            for n in 0..=6 {
                let lhs =
                    integrate_conditional(|x| hermite_q(n, x, q).unwrap(), y, &p, 1e-12).unwrap();
                let rhs = rho.powi(n as i32) * hermite_q(n, y, q).unwrap();
                assert!((lhs - rhs).abs() < 1e-8, "rho={rho} q={q} y={y} n={n}");
            }
        }
    }
}

#[test]
fn kernel_generating_function() {
    // f_biv / (f(x) f(y)) = sum_n rho^n H_n(x) H_n(y) / [n]!
    let (rho, q) = (0.45, 0.35);
    let p = BivQNormalParams::new(rho, q).unwrap();
    for (x, y) in [(0.2, -0.4), (1.0, 1.3), (-1.5, 0.6)] {
        let series: f64 = (0..60)
            .map(|n| {
                rho.powi(n)
                    * hermite_q(n as usize, x, q).unwrap()
                    * hermite_q(n as usize, y, q).unwrap()
                    / q_factorial(n as i64, q).unwrap()
            })
            .sum();
        let qp = p.qparams();
        let ratio = f_biv(x, y, &p) / (f_qn(x, qp) * f_qn(y, qp));
        assert!(
            (ratio - series).abs() < 1e-10,
            "({x},{y}): {ratio} vs {series}"
        );
    }
}

#[test]
fn exchange_symmetry_and_factorization() {
    let p = BivQNormalParams::new(0.55, 0.4).unwrap();
    let indep = BivQNormalParams::new(0.0, 0.4).unwrap();
    let qp = p.qparams();
    for (x, y) in [(0.1, 0.9), (-1.2, 0.4), (1.5, -1.6)] {
        assert_abs_diff_eq!(f_biv(x, y, &p), f_biv(y, x, &p), epsilon = 1e-14);
        assert_abs_diff_eq!(
            f_biv(x, y, &indep),
            f_qn(x, qp) * f_qn(y, qp),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(f_cond(x, y, &indep).unwrap(), f_qn(x, qp), epsilon = 1e-14);
    }
}

#[test]
fn weak_correlation_decorrelates_moments() {
    let p = BivQNormalParams::new(1e-4, 0.5).unwrap();
    assert!(analytic_moment(1, 1, &p).unwrap().abs() < 1e-3);
    assert_abs_diff_eq!(analytic_moment(2, 2, &p).unwrap(), 1.0, epsilon = 1e-6);
    assert_abs_diff_eq!(analytic_moment(3, 3, &p).unwrap(), 0.0, epsilon = 1e-3);
}

#[test]
fn out_of_domain_inputs() {
    assert!(BivQNormalParams::new(1.0, 0.2).is_err());
    assert!(BivQNormalParams::new(f64::NAN, 0.2).is_err());
    assert!(BivQNormalParams::new(0.2, -0.1).is_err());
    let p = BivQNormalParams::new(0.2, 0.0).unwrap();
    assert!(f_cond(0.0, 3.0, &p).is_err());
    assert!(analytic_moment(4, 4, &p).is_err());
}
