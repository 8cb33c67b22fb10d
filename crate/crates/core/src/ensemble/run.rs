use faer::{c64, Mat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{build_basis_capped, FockBasis, DEFAULT_DIMENSION_CAP};
use super::eigen::decompose;
use super::embed::embed;
use super::sampling::{sample_body_matrix, EnsembleKind, Entry};
use super::strength::{standardize_raw, strength_moments, RawSums, StrengthMoments, SUM_RULE_TOL};
use crate::bivariate::{analytic_moment, BivQNormalParams, MomentSet, MOMENT_ORDERS};
use crate::egoe::{q_dilute, q_finite_n, rho_dilute, rho_finite_n, SystemSpec};
use crate::error::{domain, Error, Result};

/// Reproducible Monte Carlo experiment; member `j` depends only on `(seed, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRun {
    pub spec: SystemSpec,
    pub members: u64,
    pub seed: u64,
    pub kind: EnsembleKind,
    pub dimension_cap: usize,
}

impl EnsembleRun {
    pub fn new(spec: SystemSpec, members: u64, seed: u64, kind: EnsembleKind) -> Self {
        Self {
            spec,
            members,
            seed,
            kind,
            dimension_cap: DEFAULT_DIMENSION_CAP,
        }
    }

    fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.members == 0 {
            return Err(domain("an ensemble needs at least one member"));
        }
        Ok(())
    }
}

/// Independent generator per (seed, member, purpose). Purpose 0 draws the
/// Hamiltonian, purpose `1 + t` the rank-`t` transition operator.
fn member_rng(seed: u64, member: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(member.wrapping_mul(1 << 8) ^ purpose);
    rng
}

/// Everything measured on one ensemble member for one transition rank.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberResult {
    pub member: u64,
    pub strength: StrengthMoments,
    pub spectrum_centroid: f64,
    pub spectrum_variance: f64,
    /// Standardized fourth moment of the eigenvalue density.
    pub spectrum_mu4: f64,
    /// Raw power sums `sum_i E_i^p / d`, `p = 0..=4`.
    pub spectrum_powers: [f64; 5],
    pub max_residual: f64,
}

fn run_member<T: Entry>(
    run: &EnsembleRun,
    basis: &FockBasis,
    bodies: &[FockBasis],
    ranks: &[usize],
    member: u64,
) -> Result<Vec<MemberResult>> {
    let k = run.spec.body_rank;
    let fail = |e: Error| Error::Member {
        member,
        reason: e.to_string(),
    };
    let mut rng = member_rng(run.seed, member, 0);
    let v: Mat<T> = sample_body_matrix(&bodies[k], &mut rng);
    let h = embed(&v, k, basis).map_err(fail)?.to_dense();
    drop(v);
    let eig = decompose(&h).map_err(fail)?;
    drop(h);
    let (centroid, variance, mu4) = eig.spectral_moments();
    let d = eig.dim() as f64;
    let mut powers = [0.0; 5];
    for &e in &eig.values {
        let mut p = 1.0;
        for slot in powers.iter_mut() {
            *slot += p / d;
            p *= e;
        }
    }
    ranks
        .iter()
        .map(|&t| {
            let mut rng = member_rng(run.seed, member, 1 + t as u64);
            let o: Mat<T> = sample_body_matrix(&bodies[t], &mut rng);
            let op = embed(&o, t, basis).map_err(fail)?;
            let strength = strength_moments(&eig, &op).map_err(fail)?;
            if strength.sum_rule_error > SUM_RULE_TOL {
                return Err(fail(Error::ModelInconsistency(format!(
                    "strength sum rule off by {:e}",
                    strength.sum_rule_error
                ))));
            }
            Ok(MemberResult {
                member,
                strength,
                spectrum_centroid: centroid,
                spectrum_variance: variance,
                spectrum_mu4: mu4,
                spectrum_powers: powers,
                max_residual: eig.max_residual,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            se: (var / n).sqrt(),
        }
    }

    /// Estimate from a statistic of averaged inputs, with delete-one jackknife error.
    fn jackknife<X: Clone>(items: &[X], mean_of: impl Fn(&[&X]) -> f64) -> Self {
        let all: Vec<&X> = items.iter().collect();
        let value = mean_of(&all);
        let n = items.len();
        if n < 2 {
            return Self {
                mean: value,
                se: 0.0,
            };
        }
        let loo: Vec<f64> = (0..n)
            .map(|skip| {
                let rest: Vec<&X> = all
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, x)| *x)
                    .collect();
                mean_of(&rest)
            })
            .collect();
        let bar = loo.iter().sum::<f64>() / n as f64;
        let var = loo.iter().map(|x| (x - bar).powi(2)).sum::<f64>() * (n as f64 - 1.0) / n as f64;
        Self {
            mean: value,
            se: var.sqrt(),
        }
    }

    pub fn z(&self, predicted: f64) -> f64 {
        (self.mean - predicted) / self.se
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentStat {
    pub r: u32,
    pub s: u32,
    /// Standardized moment of the ensemble-averaged strength sums.
    pub pooled: Estimate,
    /// Mean of per-member standardized moments.
    pub member_mean: Estimate,
}

/// One empirical quantity set against its finite-N prediction. The headline
/// estimate is the standardized moment of ensemble-averaged strength sums
/// (a ratio of averaged traces); the mean of per-member ratios is reported
/// alongside.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub name: String,
    pub predicted: f64,
    pub estimate: Estimate,
    pub z: f64,
    pub member_mean: Estimate,
    pub z_member_mean: f64,
}

impl Comparison {
    fn new(name: &str, predicted: f64, estimate: Estimate, member_mean: Estimate) -> Self {
        Self {
            name: name.to_owned(),
            predicted,
            estimate,
            z: estimate.z(predicted),
            member_mean,
            z_member_mean: member_mean.z(predicted),
        }
    }

    /// `|z| <= sigmas` for the headline estimate.
    pub fn within(&self, sigmas: f64) -> bool {
        self.z.abs() <= sigmas
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Predictions {
    pub rho_finite_n: f64,
    pub q_finite_n: f64,
    /// Bivariate q-normal `mu22`, `mu60` at the finite-N `(rho, q)`.
    pub mu22: f64,
    pub mu60: f64,
    pub rho_dilute: f64,
    pub q_dilute: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleReport {
    pub run: EnsembleRun,
    pub dimension: usize,
    pub predictions: Predictions,
    pub moments: Vec<MomentStat>,
    /// Eigenvalue-density `mu4 - 2`.
    pub spectrum_q: Comparison,
    pub comparisons: Vec<Comparison>,
    pub max_sum_rule_error: f64,
    pub max_eigen_residual: f64,
    #[serde(skip)]
    pub per_member: Vec<MemberResult>,
}

impl EnsembleReport {
    fn build(run: EnsembleRun, dimension: usize, per_member: Vec<MemberResult>) -> Self {
        let spec = run.spec;
        let (rho, q) = (rho_finite_n(&spec), q_finite_n(&spec));
        let biv = BivQNormalParams::new(rho.clamp(-1.0 + 1e-12, 1.0 - 1e-12), q)
            .expect("finite-N q in [0, 1]");
        let predictions = Predictions {
            rho_finite_n: rho,
            q_finite_n: q,
            mu22: analytic_moment(2, 2, &biv).expect("order 4"),
            mu60: analytic_moment(6, 0, &biv).expect("order 6"),
            rho_dilute: rho_dilute(&spec),
            q_dilute: q_dilute(&spec),
        };
        let raws: Vec<&RawSums> = per_member.iter().map(|m| &m.strength.raw).collect();
        let pooled_set = |items: &[&&RawSums]| -> MomentSet {
            let mut acc = RawSums::new();
            for raw in items {
                for (&key, &v) in raw.iter() {
                    *acc.entry(key).or_insert(0.0) += v;
                }
            }
            standardize_raw(&acc)
        };
        let stat = |r: u32, s: u32| MomentStat {
            r,
            s,
            pooled: Estimate::jackknife(&raws, |xs| pooled_set(xs).get(r, s).unwrap_or(f64::NAN)),
            member_mean: Estimate::from_samples(
                &per_member
                    .iter()
                    .map(|m| m.strength.mu(r, s))
                    .collect::<Vec<_>>(),
            ),
        };
        let mut moments: Vec<MomentStat> = MOMENT_ORDERS.iter().map(|&(r, s)| stat(r, s)).collect();
        moments.extend([(0, 4), (1, 3), (0, 6), (1, 5), (2, 4)].map(|(r, s)| stat(r, s)));
        let find = |r: u32, s: u32| {
            *moments
                .iter()
                .find(|m| m.r == r && m.s == s)
                .expect("reported order")
        };
        let shifted = |m: MomentStat| {
            let shift = |e: Estimate| Estimate {
                mean: e.mean - 2.0,
                se: e.se,
            };
            (shift(m.pooled), shift(m.member_mean))
        };
        let spectrum_q = Comparison::new(
            "spectrum_mu4-2",
            predictions.q_finite_n,
            Estimate::jackknife(&per_member, |xs| {
                let n = xs.len() as f64;
                let p = |k: usize| xs.iter().map(|m| m.spectrum_powers[k]).sum::<f64>() / n;
                let c = p(1);
                let var = p(2) - c * c;
                let m4 = p(4) - 4.0 * c * p(3) + 6.0 * c * c * p(2) - 3.0 * c.powi(4);
                m4 / (var * var) - 2.0
            }),
            Estimate::from_samples(
                &per_member
                    .iter()
                    .map(|m| m.spectrum_mu4 - 2.0)
                    .collect::<Vec<_>>(),
            ),
        );
        let direct = |name: &str, predicted: f64, m: MomentStat| {
            Comparison::new(name, predicted, m.pooled, m.member_mean)
        };
        let (q40, q40m) = shifted(find(4, 0));
        let (q04, q04m) = shifted(find(0, 4));
        let comparisons = vec![
            direct("mu11", predictions.rho_finite_n, find(1, 1)),
            Comparison::new("mu40-2", predictions.q_finite_n, q40, q40m),
            Comparison::new("mu04-2", predictions.q_finite_n, q04, q04m),
            spectrum_q.clone(),
            direct("mu22", predictions.mu22, find(2, 2)),
            direct("mu60", predictions.mu60, find(6, 0)),
        ];
        let max_sum_rule_error = per_member
            .iter()
            .map(|m| m.strength.sum_rule_error)
            .fold(0.0, f64::max);
        let max_eigen_residual = per_member
            .iter()
            .map(|m| m.max_residual)
            .fold(0.0, f64::max);
        Self {
            run,
            dimension,
            predictions,
            moments,
            spectrum_q,
            comparisons,
            max_sum_rule_error,
            max_eigen_residual,
            per_member,
        }
    }

    pub fn comparison(&self, name: &str) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.name == name)
    }

    /// One row per member: standardized moments, spectrum `mu4` and sum-rule error.
    pub fn per_member_csv(&self) -> String {
        let orders: Vec<(u32, u32)> = self.moments.iter().map(|m| (m.r, m.s)).collect();
        let mut out = String::from("member");
        for (r, s) in &orders {
            out.push_str(&format!(",mu{r}{s}"));
        }
        out.push_str(",spectrum_mu4,sum_rule_error\n");
        for m in &self.per_member {
            out.push_str(&m.member.to_string());
            for &(r, s) in &orders {
                out.push_str(&format!(",{}", m.strength.mu(r, s)));
            }
            out.push_str(&format!(
                ",{},{}\n",
                m.spectrum_mu4, m.strength.sum_rule_error
            ));
        }
        out
    }
}

pub fn run_ensemble(run: &EnsembleRun) -> Result<EnsembleReport> {
    let mut reports = run_ensemble_family(run, &[run.spec.transition_rank])?;
    Ok(reports.remove(0))
}

/// Runs several transition ranks against the same Hamiltonian draws; the
/// member's eigendecomposition is shared across ranks.
pub fn run_ensemble_family(run: &EnsembleRun, ranks: &[usize]) -> Result<Vec<EnsembleReport>> {
    run.validate()?;
    for &t in ranks {
        run.spec.with_ranks(run.spec.body_rank, t)?;
    }
    let spec = run.spec;
    let basis = build_basis_capped(spec.orbitals, spec.particles, run.dimension_cap)?;
    let bodies = (0..=spec.particles)
        .map(|r| build_basis_capped(spec.orbitals, r, usize::MAX))
        .collect::<Result<Vec<_>>>()?;
    let per_member: Vec<Vec<MemberResult>> = (0..run.members)
        .into_par_iter()
        .map(|j| match run.kind {
            EnsembleKind::Orthogonal => run_member::<f64>(run, &basis, &bodies, ranks, j),
            EnsembleKind::Unitary => run_member::<c64>(run, &basis, &bodies, ranks, j),
        })
        .collect::<Result<_>>()?;
    Ok(ranks
        .iter()
        .enumerate()
        .map(|(slot, &t)| {
            let mut r = *run;
            r.spec.transition_rank = t;
            let members = per_member.iter().map(|m| m[slot].clone()).collect();
            EnsembleReport::build(r, basis.len(), members)
        })
        .collect())
}
