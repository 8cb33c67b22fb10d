use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qbiv::qcore::{
    f_qn, hermite_q, integrate_over_support, power_in_hermite_basis, q_factorial, standard_normal,
    HermiteTable, QParams,
};

#[test]
fn hermite_orthogonality() {
    for q in [0.0, 0.3, 0.7, 0.99] {
        let p = QParams::new(q).unwrap();
        for n in 0..=8 {
            for m in 0..=n {
                let v = integrate_over_support(
                    |x| {
                        let t = HermiteTable::new(x, q, 8).unwrap();
                        t.get(n) * t.get(m) * f_qn(x, &p)
                    },
                    &p,
                    1e-11,
                )
                .unwrap();
                let expect = if n == m {
                    q_factorial(n as i64, q).unwrap()
                } else {
                    0.0
                };
                assert!(
                    (v - expect).abs() < 1e-8,
                    "q={q} n={n} m={m}: {v} vs {expect}"
                );
            }
        }
    }
}

#[test]
fn density_normalized_across_q() {
    for i in 0..10 {
        let q = i as f64 / 9.0 * 0.999;
        let p = QParams::new(q).unwrap();
        let mass = integrate_over_support(|x| f_qn(x, &p), &p, 1e-12).unwrap();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-8);
    }
}

#[test]
fn near_one_approaches_gaussian() {
    let p = QParams::new(0.9999).unwrap();
    let sup = (0..=2400)
        .map(|i| -12.0 + i as f64 * 0.01)
        .map(|x| (f_qn(x, &p) - standard_normal(x)).abs())
        .fold(0.0, f64::max);
    assert!(sup < 1e-3, "sup norm {sup}");
}

#[test]
fn zero_is_semicircle() {
    let p = QParams::new(0.0).unwrap();
    for i in 0..=40 {
        let x = -2.0 + i as f64 * 0.1;
        let exact = (4.0 - x * x).max(0.0).sqrt() / (2.0 * std::f64::consts::PI);
        assert_abs_diff_eq!(f_qn(x, &p), exact, epsilon = 1e-14);
    }
    assert_eq!(f_qn(2.5, &p), 0.0);
}

#[test]
fn hermite_low_orders() {
    let (x, q) = (0.7, 0.4);
    assert_eq!(hermite_q(0, x, q).unwrap(), 1.0);
    assert_eq!(hermite_q(1, x, q).unwrap(), x);
    assert_abs_diff_eq!(hermite_q(2, x, q).unwrap(), x * x - 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(
        hermite_q(3, x, q).unwrap(),
        x.powi(3) - (2.0 + q) * x,
        epsilon = 1e-15
    );
    assert!(hermite_q(2, x, 1.5).is_err());
}

proptest! {
    #[test]
    fn powers_expand_in_hermite_basis(x in -3.0f64..3.0, q in 0.0f64..=1.0, p in 0usize..=6) {
        let c = power_in_hermite_basis(p, q).unwrap();
        let t = HermiteTable::new(x, q, p).unwrap();
        let sum: f64 = c.iter().enumerate().map(|(n, c)| c * t.get(n)).sum();
        prop_assert!((sum - x.powi(p as i32)).abs() < 1e-10 * (1.0 + x.abs().powi(p as i32)));
    }

    #[test]
    fn density_even_and_nonnegative(x in -3.0f64..3.0, q in 0.0f64..1.0) {
        let p = QParams::new(q).unwrap();
        let v = f_qn(x, &p);
        prop_assert!(v >= 0.0);
        prop_assert!((v - f_qn(-x, &p)).abs() <= 1e-14);
    }
}
