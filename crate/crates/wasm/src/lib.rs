//! WebAssembly bindings for the static demo page in `web/`.
//!
//! Every export takes and returns plain numbers so the same functions run
//! (and are tested) natively.

use wasm_bindgen::prelude::*;

use qbiv::bivariate::{BivQNormalParams, DensityGrid};
use qbiv::npc::{npc_curve as npc_points, NpcParams};
use qbiv::qcore::{f_qn, QParams};

/// Half-width of the plotted square `[-w, w]^2` for a given `q`.
#[wasm_bindgen]
pub fn plot_halfwidth(q: f64) -> Result<f64, String> {
    Ok(QParams::new(q)
        .map_err(|e| e.to_string())?
        .integration_halfwidth())
}

/// Row-major `resolution x resolution` values of the bivariate density at
/// cell centres of `[-w, w]^2`.
#[wasm_bindgen]
pub fn density_grid(rho: f64, q: f64, resolution: usize) -> Result<Vec<f64>, String> {
    let params = BivQNormalParams::new(rho, q).map_err(|e| e.to_string())?;
    Ok(DensityGrid::new(params, resolution)
        .map_err(|e| e.to_string())?
        .values)
}

/// Interleaved `x0, f0, x1, f1, ...` samples of the q-normal density.
#[wasm_bindgen]
pub fn qnormal_curve(q: f64, points: usize) -> Result<Vec<f64>, String> {
    let params = QParams::new(q).map_err(|e| e.to_string())?;
    if points < 2 {
        return Err("need at least two points".into());
    }
    let w = params.integration_halfwidth();
    Ok((0..points)
        .flat_map(|i| {
            let x = -w + 2.0 * w * i as f64 / (points - 1) as f64;
            [x, f_qn(x, &params)]
        })
        .collect())
}

/// Interleaved `E_hat, NPC / (d/3)` over `points` energies spanning 95% of
/// the support.
#[wasm_bindgen]
pub fn npc_curve(
    rho: f64,
    q: f64,
    q_prime: f64,
    sigma_hat: f64,
    delta_hat: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    if points == 0 {
        return Err("empty energy grid".into());
    }
    let params = NpcParams {
        dimension: 3.0,
        rho,
        q,
        q_prime,
        sigma_hat,
        delta_hat,
    };
    let w = 0.95 * plot_halfwidth(q)?;
    let grid: Vec<f64> = match points {
        1 => vec![0.0],
        n => (0..n)
            .map(|i| -w + 2.0 * w * i as f64 / (n - 1) as f64)
            .collect(),
    };
    let curve = npc_points(&grid, &params).map_err(|e| e.to_string())?;
    Ok(curve
        .points
        .iter()
        .flat_map(|p| [p.e_hat, p.npc_over_d3])
        .collect())
}
