use serde::Serialize;

use crate::egoe::binomial_exact;
use crate::error::{domain, Error, Result};

pub const DEFAULT_DIMENSION_CAP: usize = 20_000;

/// Fermionic occupation patterns with `m` of `N` bits set, in increasing
/// integer (lexicographic) order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FockBasis {
    orbitals: usize,
    particles: usize,
    states: Vec<u64>,
}

impl FockBasis {
    pub fn orbitals(&self) -> usize {
        self.orbitals
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, pattern: u64) -> Option<usize> {
        self.states.binary_search(&pattern).ok()
    }
}

pub fn build_basis(orbitals: usize, particles: usize) -> Result<FockBasis> {
    build_basis_capped(orbitals, particles, DEFAULT_DIMENSION_CAP)
}

pub fn build_basis_capped(orbitals: usize, particles: usize, cap: usize) -> Result<FockBasis> {
    if orbitals > 64 || particles > orbitals {
        return Err(domain(format!(
            "need m <= N <= 64, got N = {orbitals}, m = {particles}"
        )));
    }
    let dim = binomial_exact(orbitals as i64, particles as i64).unwrap_or(u128::MAX);
    if dim > cap as u128 {
        return Err(Error::DimensionCap { dim, cap });
    }
    let mut states = Vec::with_capacity(dim as usize);
    if particles == 0 {
        states.push(0);
    } else {
        // Gosper's hack walks same-popcount patterns in increasing order.
        let limit = if orbitals == 64 {
            u64::MAX
        } else {
            (1u64 << orbitals) - 1
        };
        let mut x: u64 = if particles == 64 {
            u64::MAX
        } else {
            (1u64 << particles) - 1
        };
        loop {
            states.push(x);
            let c = x & x.wrapping_neg();
            let (r, overflow) = x.overflowing_add(c);
            if overflow || r == 0 {
                break;
            }
            let next = (((r ^ x) >> 2) / c) | r;
            if next > limit || next < x {
                break;
            }
            x = next;
        }
    }
    debug_assert_eq!(states.len() as u128, dim);
    Ok(FockBasis {
        orbitals,
        particles,
        states,
    })
}

pub(crate) fn occupied(pattern: u64) -> Vec<usize> {
    (0..64).filter(|&j| pattern >> j & 1 == 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_order() {
        assert_eq!(build_basis(4, 2).unwrap().len(), 6);
        let b = build_basis(12, 6).unwrap();
        assert_eq!(b.len(), 924);
        assert!(b.states().windows(2).all(|w| w[0] < w[1]));
        assert!(b
            .states()
            .iter()
            .all(|s| s.count_ones() == 6 && *s < 1 << 12));
        assert_eq!(b.index_of(b.states()[500]), Some(500));
        assert_eq!(build_basis(5, 0).unwrap().states(), &[0]);
        assert_eq!(build_basis(64, 64).unwrap().states(), &[u64::MAX]);
        assert_eq!(build_basis(64, 1).unwrap().len(), 64);
    }

    #[test]
    fn cap_rejects_large_spaces() {
        assert!(matches!(
            build_basis(20, 10),
            Err(Error::DimensionCap {
                dim: 184_756,
                cap: 20_000
            })
        ));
        assert!(build_basis_capped(20, 10, 200_000).is_ok());
        assert!(build_basis(65, 1).is_err());
        assert!(build_basis(3, 4).is_err());
    }
}
