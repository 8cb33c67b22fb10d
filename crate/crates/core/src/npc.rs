//! Number of principal components (NPC) in transition strengths from an
//! eigenstate at energy `E`, under the bivariate q-normal strength density.
//!
//! All energies are dimensionless: `E_hat` is the initial energy in units of
//! the strength density's own centroid and width, `sigma_hat = sigma_f / sigma_2`
//! and `delta_hat = (eps_f - eps_2) / sigma_2` relate the final-state density
//! to the strength density's final-energy marginal.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::bivariate::{BivQNormalParams, HKernel};
use crate::error::{domain, Error, Result};
use crate::qcore::{f_qn, integrate_1d, QParams};

const NPC_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NpcParams {
    /// Many-particle dimension `d`.
    pub dimension: f64,
    pub rho: f64,
    pub q: f64,
    /// q of the final-state density.
    pub q_prime: f64,
    pub sigma_hat: f64,
    pub delta_hat: f64,
}

impl NpcParams {
    /// `sigma_hat = 1`, `delta_hat = 0` and `q' = q`.
    pub fn symmetric(dimension: f64, rho: f64, q: f64) -> Self {
        Self {
            dimension,
            rho,
            q,
            q_prime: q,
            sigma_hat: 1.0,
            delta_hat: 0.0,
        }
    }

    /// Converts centroids and widths in energy units: `(eps2, sigma2)` of the
    /// final-energy marginal and `(eps_f, sigma_f)` of the final-state density.
    pub fn from_physical(
        dimension: f64,
        rho: f64,
        q: f64,
        q_prime: f64,
        (eps2, sigma2): (f64, f64),
        (eps_f, sigma_f): (f64, f64),
    ) -> Result<Self> {
        if !(sigma2 > 0.0) {
            return Err(domain(format!("width sigma_2 = {sigma2} must be positive")));
        }
        let p = Self {
            dimension,
            rho,
            q,
            q_prime,
            sigma_hat: sigma_f / sigma2,
            delta_hat: (eps_f - eps2) / sigma2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dimension >= 1.0) {
            return Err(domain(format!(
                "dimension d = {} must be at least 1",
                self.dimension
            )));
        }
        if !(self.sigma_hat > 0.0) {
            return Err(domain(format!(
                "sigma_hat = {} must be positive",
                self.sigma_hat
            )));
        }
        if !self.delta_hat.is_finite() {
            return Err(domain("delta_hat must be finite"));
        }
        BivQNormalParams::new(self.rho, self.q)?;
        QParams::new(self.q_prime)?;
        let (lo, hi) = self.window()?;
        if !(lo < hi) {
            return Err(domain(format!("empty integration window [{lo}, {hi}]")));
        }
        Ok(())
    }

    /// Integration window `[y0_i, y0_f]`: the overlap of the final-state
    /// support with the strength density's final-energy support.
    pub fn window(&self) -> Result<(f64, f64)> {
        let strength = QParams::new(self.q)?.integration_halfwidth();
        let final_states = self.sigma_hat * QParams::new(self.q_prime)?.integration_halfwidth();
        Ok((
            (self.delta_hat - final_states).max(-strength),
            (self.delta_hat + final_states).min(strength),
        ))
    }

    /// The GOE value `d / 3`.
    pub fn goe_limit(&self) -> f64 {
        self.dimension / 3.0
    }
}

/// Converts an energy to the dimensionless `E_hat = (E - eps1) / sigma1`.
pub fn e_hat(energy: f64, eps1: f64, sigma1: f64) -> f64 {
    (energy - eps1) / sigma1
}

struct NpcIntegrand {
    params: NpcParams,
    kernel: HKernel,
    final_q: QParams,
}

impl NpcIntegrand {
    fn new(params: NpcParams) -> Result<Self> {
        params.validate()?;
        let biv = BivQNormalParams::new(params.rho, params.q)?;
        Ok(Self {
            params,
            kernel: HKernel::new(biv),
            final_q: QParams::new(params.q_prime)?,
        })
    }

    fn evaluate(&self, e_hat: f64) -> Result<f64> {
        let qp = *self.kernel.params().qparams();
        if !qp.gaussian_branch() && e_hat.abs() >= qp.support_halfwidth() {
            return Err(domain(format!(
                "E_hat = {e_hat} outside S(q) = (-{w}, {w})",
                w = qp.support_halfwidth()
            )));
        }
        let marginal = f_qn(e_hat, &qp);
        let p = &self.params;
        let (lo, hi) = p.window()?;
        let inconsistent = Cell::new(None);
        let integral = integrate_1d(
            |y| {
                let strength = self.kernel.density(e_hat, y);
                let final_density = f_qn((y - p.delta_hat) / p.sigma_hat, &self.final_q);
                if final_density > 0.0 {
                    p.sigma_hat * strength * strength / final_density
                } else {
                    if strength > 0.0 && inconsistent.get().is_none() {
                        inconsistent.set(Some(y));
                    }
                    0.0
                }
            },
            lo,
            hi,
            NPC_TOL * marginal * marginal,
        )?;
        if let Some(y) = inconsistent.get() {
            return Err(Error::ModelInconsistency(format!(
                "final-state density vanishes at y = {y} where the strength density does not"
            )));
        }
        if !(integral > 0.0) {
            return Err(Error::ModelInconsistency(format!(
                "non-positive strength integral {integral} at E_hat = {e_hat}"
            )));
        }
        Ok(p.goe_limit() * marginal * marginal / integral)
    }
}

/// `(NPC)_E = (d/3) f_qN(E_hat|q)^2 / integral of sigma_hat f_biv(E_hat, y)^2 / f_qN((y - delta_hat)/sigma_hat | q')`.
pub fn npc_at(e_hat: f64, params: &NpcParams) -> Result<f64> {
    NpcIntegrand::new(*params)?.evaluate(e_hat)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NpcPoint {
    pub e_hat: f64,
    pub npc: f64,
    pub npc_over_d3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NpcCurve {
    pub params: NpcParams,
    /// `d / 3`.
    pub goe_limit: f64,
    pub points: Vec<NpcPoint>,
}

impl NpcCurve {
    /// Columns `E_hat,npc,npc_over_d3`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("E_hat,npc,npc_over_d3\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{}\n", p.e_hat, p.npc, p.npc_over_d3));
        }
        out
    }
}

pub fn npc_curve(grid: &[f64], params: &NpcParams) -> Result<NpcCurve> {
    if grid.is_empty() {
        return Err(domain("NPC grid is empty"));
    }
    let integrand = NpcIntegrand::new(*params)?;
    let goe = params.goe_limit();
    let points = grid
        .iter()
        .map(|&e| {
            let npc = integrand.evaluate(e)?;
            Ok(NpcPoint {
                e_hat: e,
                npc,
                npc_over_d3: npc / goe,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NpcCurve {
        params: *params,
        goe_limit: goe,
        points,
    })
}

/// `n` equally spaced energies strictly inside `(-w, w)`, `w = fraction * halfwidth`.
pub fn energy_grid(q: f64, n: usize, fraction: f64) -> Result<Vec<f64>> {
    let w = fraction * QParams::new(q)?.integration_halfwidth();
    Ok(match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| -w + 2.0 * w * i as f64 / (n - 1) as f64)
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const D: f64 = 184_756.0;

    #[test]
    fn uncorrelated_strength_gives_goe_value() {
        let p = NpcParams::symmetric(D, 0.0, 0.465);
        for e in [-2.0, -0.5, 0.0, 1.3] {
            assert_relative_eq!(npc_at(e, &p).unwrap(), D / 3.0, max_relative = 1e-9);
        }
        assert_relative_eq!(D / 3.0, 61_585.333_333, max_relative = 1e-9);
    }

    #[test]
    fn even_in_energy() {
        let p = NpcParams::symmetric(D, 0.682, 0.465);
        for e in [0.3, 1.1, 2.0] {
            assert_relative_eq!(
                npc_at(e, &p).unwrap(),
                npc_at(-e, &p).unwrap(),
                max_relative = 1e-8
            );
        }
    }

    #[test]
    fn correlated_strength_lies_below_goe() {
        let p = NpcParams::symmetric(D, 0.682, 0.465);
        assert!(npc_at(0.0, &p).unwrap() < D / 3.0);
    }

    #[test]
    fn narrower_final_states_still_integrate() {
        // The final-state density ends inside the strength support, leaving
        // an integrable inverse-square-root edge.
        let p = NpcParams {
            sigma_hat: 0.8,
            ..NpcParams::symmetric(D, 0.3, 0.2)
        };
        let v = npc_at(0.1, &p).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn physical_inputs_convert() {
        let p = NpcParams::from_physical(D, 0.5, 0.3, 0.3, (1.0, 2.0), (2.0, 3.0)).unwrap();
        assert_relative_eq!(p.sigma_hat, 1.5);
        assert_relative_eq!(p.delta_hat, 0.5);
        assert_relative_eq!(e_hat(3.0, 1.0, 4.0), 0.5);
        assert!(NpcParams::from_physical(D, 0.5, 0.3, 0.3, (1.0, 0.0), (2.0, 3.0)).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = NpcParams::symmetric(D, 0.5, 0.0);
        assert!(npc_at(2.0, &p).is_err());
        let far = NpcParams {
            delta_hat: 10.0,
            ..p
        };
        assert!(matches!(npc_at(0.0, &far), Err(Error::Domain(_))));
        let bad = NpcParams {
            sigma_hat: -1.0,
            ..p
        };
        assert!(npc_at(0.0, &bad).is_err());
        assert!(npc_curve(&[], &p).is_err());
    }

    #[test]
    fn single_point_curve() {
        let p = NpcParams::symmetric(D, 0.2, 0.1);
        let c = npc_curve(&[0.0], &p).unwrap();
        assert_eq!(c.points.len(), 1);
        assert_relative_eq!(c.points[0].npc_over_d3 * c.goe_limit, c.points[0].npc);
        assert!(c.to_csv().starts_with("E_hat,npc,npc_over_d3\n"));
    }
}
