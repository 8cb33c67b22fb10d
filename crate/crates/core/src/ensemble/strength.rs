use std::collections::BTreeMap;

use faer::Mat;
use serde::Serialize;

use super::eigen::{col_slice, Eigen};
use super::embed::SparseMatrix;
use super::sampling::Entry;
use crate::bivariate::MomentSet;
use crate::egoe::binomial;
use crate::error::{domain, Result};

/// Highest total order `r + s` measured.
pub const MAX_ORDER: u32 = 6;

/// Strength sum rule tolerance (relative).
pub const SUM_RULE_TOL: f64 = 1e-8;

/// Raw weighted sums `sum_fi w_fi E_f^r E_i^s` keyed by `(r, s)`, `r + s <= 6`.
pub type RawSums = BTreeMap<(u32, u32), f64>;

/// Moments of one member's transition strength distribution
/// `w_fi = |<E_f| O |E_i>|^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrengthMoments {
    pub total_weight: f64,
    /// `trace(O^dagger O)`.
    pub trace_oo: f64,
    /// `|total_weight / trace_oo - 1|`.
    pub sum_rule_error: f64,
    pub centroid_final: f64,
    pub width_final: f64,
    pub centroid_initial: f64,
    pub width_initial: f64,
    /// `mu_rs = sum w e_f^r e_i^s / W` in energies standardized under the
    /// strength marginals; every `(r, s)` with `r + s <= 6` is stored.
    #[serde(skip)]
    pub standardized: MomentSet,
    #[serde(skip)]
    pub raw: RawSums,
}

impl StrengthMoments {
    pub fn mu(&self, r: u32, s: u32) -> f64 {
        self.standardized
            .get(r, s)
            .expect("all orders up to 6 are stored")
    }
}

fn orders() -> impl Iterator<Item = (u32, u32)> {
    (0..=MAX_ORDER).flat_map(|r| (0..=MAX_ORDER - r).map(move |s| (r, s)))
}

/// Weighted sums `sum_fi w_fi g(f)^r h(i)^s` for all `r + s <= 6`.
fn weighted_sums(w: &[f64], d: usize, xf: &[f64], xi: &[f64]) -> RawSums {
    let n = MAX_ORDER as usize + 1;
    let mut out = vec![0.0; n * n];
    let mut row = vec![0.0; n];
    for f in 0..d {
        row.iter_mut().for_each(|x| *x = 0.0);
        for (i, &wfi) in w[f * d..(f + 1) * d].iter().enumerate() {
            let mut p = wfi;
            for slot in row.iter_mut() {
                *slot += p;
                p *= xi[i];
            }
        }
        let mut p = 1.0;
        for r in 0..n {
            for s in 0..n - r {
                out[r * n + s] += p * row[s];
            }
            p *= xf[f];
        }
    }
    orders()
        .map(|(r, s)| ((r, s), out[r as usize * n + s as usize]))
        .collect()
}

/// Strength moments of `op` between the eigenstates of `eig`.
pub fn strength_moments<T: Entry>(eig: &Eigen<T>, op: &SparseMatrix<T>) -> Result<StrengthMoments> {
    let d = eig.dim();
    if op.dim() != d {
        return Err(domain(format!(
            "operator dimension {} differs from {d}",
            op.dim()
        )));
    }
    let trace_oo = op.frobenius2();
    if !(trace_oo > 0.0) {
        return Err(domain("transition operator has zero total strength"));
    }
    let ov = op.mul_dense(&eig.vectors);
    let b: Mat<T> = eig.vectors.adjoint() * &ov;
    // w[f * d + i] = |<E_f|O|E_i>|^2
    let mut w = vec![0.0; d * d];
    for i in 0..d {
        for (f, z) in col_slice(&b, i).iter().enumerate() {
            w[f * d + i] = z.norm2();
        }
    }
    let e = &eig.values;
    let raw = weighted_sums(&w, d, e, e);
    let total = raw[&(0, 0)];
    if !(total > 0.0) {
        return Err(domain("transition strengths sum to zero"));
    }
    let cf = raw[&(1, 0)] / total;
    let ci = raw[&(0, 1)] / total;
    let ef: Vec<f64> = e.iter().map(|x| x - cf).collect();
    let ei: Vec<f64> = e.iter().map(|x| x - ci).collect();
    let second = weighted_sums(&w, d, &ef, &ei);
    let sf = (second[&(2, 0)] / total).sqrt();
    let si = (second[&(0, 2)] / total).sqrt();
    let ef: Vec<f64> = ef.iter().map(|x| x / sf).collect();
    let ei: Vec<f64> = ei.iter().map(|x| x / si).collect();
    let mut standardized = MomentSet::new();
    for ((r, s), v) in weighted_sums(&w, d, &ef, &ei) {
        standardized.insert_exact(r, s, v / total);
    }
    Ok(StrengthMoments {
        total_weight: total,
        trace_oo,
        sum_rule_error: (total / trace_oo - 1.0).abs(),
        centroid_final: cf,
        width_final: sf,
        centroid_initial: ci,
        width_initial: si,
        standardized,
        raw,
    })
}

/// Centres and standardizes averaged raw sums (`(0, 0)` is the total weight).
pub fn standardize_raw(raw: &RawSums) -> MomentSet {
    let total = raw[&(0, 0)];
    let m = |r: u32, s: u32| raw[&(r, s)] / total;
    let (cf, ci) = (m(1, 0), m(0, 1));
    let central = |r: u32, s: u32| {
        let mut acc = 0.0;
        for a in 0..=r {
            for b in 0..=s {
                acc += binomial(r as i64, a as i64)
                    * binomial(s as i64, b as i64)
                    * (-cf).powi((r - a) as i32)
                    * (-ci).powi((s - b) as i32)
                    * m(a, b);
            }
        }
        acc
    };
    let sf = central(2, 0).sqrt();
    let si = central(0, 2).sqrt();
    let mut out = MomentSet::new();
    for (r, s) in orders() {
        out.insert_exact(
            r,
            s,
            central(r, s) / (sf.powi(r as i32) * si.powi(s as i32)),
        );
    }
    out
}
