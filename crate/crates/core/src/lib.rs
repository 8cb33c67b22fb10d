//! Bivariate q-normal transition strength densities for embedded random
//! matrix ensembles.
//!
//! * [`qcore`]: q-numbers, q-Hermite polynomials, the q-normal density.
//! * [`bivariate`]: bivariate and conditional q-normal densities and moments.
//! * [`egoe`]: combinatorial EGOE/EGUE moment predictors and tables.
//! * [`ensemble`]: Monte Carlo embedded-ensemble simulator (feature `sim`).
//! * [`npc`]: number of principal components in transition strengths.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod qcore;

pub use error::{Error, Result};
pub mod bivariate;
pub mod egoe;
#[cfg(feature = "sim")]
pub mod ensemble;
pub mod npc;
pub mod tables;
