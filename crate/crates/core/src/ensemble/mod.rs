//! Monte Carlo embedded ensembles: EGOE(k)/EGUE(k) Hamiltonians and an
//! independent rank-`t` transition operator on a fermionic Fock space, with
//! the moments of the resulting transition strength distribution.

mod basis;
mod eigen;
mod embed;
mod run;
mod sampling;
mod strength;

pub use basis::{build_basis, build_basis_capped, FockBasis, DEFAULT_DIMENSION_CAP};
pub use eigen::{decompose, Eigen, RESIDUAL_TOL};
pub use embed::{embed, SparseMatrix};
pub use run::{
    run_ensemble, run_ensemble_family, Comparison, EnsembleReport, EnsembleRun, Estimate,
    MemberResult, MomentStat, Predictions,
};
pub use sampling::{sample_body_matrix, EnsembleKind, Entry};
pub use strength::{
    standardize_raw, strength_moments, RawSums, StrengthMoments, MAX_ORDER, SUM_RULE_TOL,
};
