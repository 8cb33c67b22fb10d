use qbiv_wasm::{density_grid, npc_curve, plot_halfwidth, qnormal_curve};

#[test]
fn density_grid_is_normalized() {
    let n = 120;
    let values = density_grid(0.682, 0.465, n).unwrap();
    assert_eq!(values.len(), n * n);
    let step = 2.0 * plot_halfwidth(0.465).unwrap() / n as f64;
    let mass: f64 = values.iter().sum::<f64>() * step * step;
    assert!((mass - 1.0).abs() < 1e-2, "{mass}");
    assert!(density_grid(1.2, 0.3, 10).is_err());
    assert!(density_grid(0.2, 0.3, 1).is_err());
}

#[test]
fn semicircle_curve() {
    let c = qnormal_curve(0.0, 5).unwrap();
    let semi = |x: f64| (4.0 - x * x).max(0.0).sqrt() / (2.0 * std::f64::consts::PI);
    for (pair, x) in c.chunks(2).zip([-2.0, -1.0, 0.0, 1.0, 2.0]) {
        assert!((pair[0] - x).abs() < 1e-14);
        assert!((pair[1] - semi(x)).abs() < 1e-14);
    }
    assert!(qnormal_curve(-0.1, 10).is_err());
    assert!(qnormal_curve(0.5, 1).is_err());
}

#[test]
fn npc_ratio_is_one_without_correlation() {
    let c = npc_curve(0.0, 0.4, 0.4, 1.0, 0.0, 9).unwrap();
    assert_eq!(c.len(), 18);
    for pair in c.chunks(2) {
        assert!((pair[1] - 1.0).abs() < 1e-6);
    }
    let correlated = npc_curve(0.6, 0.4, 0.4, 1.0, 0.0, 1).unwrap();
    assert!(correlated[1] < 1.0);
    assert!(npc_curve(0.2, 0.4, 0.4, 1.0, 0.0, 0).is_err());
}
