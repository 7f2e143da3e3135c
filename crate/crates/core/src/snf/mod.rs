//! Smith normal forms, elementary divisor profiles and cokernels.

pub mod det;
pub mod integer;
pub mod local;
pub mod oracle;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, valuation};
use local::LocalRing;
use crate::matrix::IntegerMatrix;
use crate::par::Execution;
use crate::polar::PolarGraph;

pub use det::{bareiss_determinant, rank_exact, rank_mod_prime, rank_over_q};
pub use integer::smith_normal_form;
pub use oracle::naive_oracle_snf;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SnfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("matrix is not square")]
    NotSquare,
}

/// Elementary divisors of a matrix at one prime `l`: `entries[a]` counts the
/// invariant factors of `l`-valuation exactly `a`; zero invariant factors are
/// counted separately in `free_rank`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DivisorProfile {
    pub ell: u64,
    pub entries: BTreeMap<u32, u64>,
    pub free_rank: u64,
}

impl DivisorProfile {
    pub fn new(ell: u64, entries: BTreeMap<u32, u64>, free_rank: u64) -> Self {
        let mut entries = entries;
        entries.retain(|_, m| *m > 0);
        DivisorProfile { ell, entries, free_rank }
    }

    pub fn get(&self, a: u32) -> u64 {
        self.entries.get(&a).copied().unwrap_or(0)
    }

    /// Number of nonzero invariant factors.
    pub fn count(&self) -> u64 {
        self.entries.values().sum()
    }

    /// `sum a * e_a`, the valuation of the torsion order.
    pub fn mass(&self) -> u128 {
        self.entries.iter().map(|(&a, &m)| u128::from(a) * u128::from(m)).sum()
    }

    /// Entries with positive exponent.
    pub fn torsion(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.entries.iter().filter(|(&a, _)| a > 0).map(|(&a, &m)| (a, m))
    }

    pub fn from_invariants(invariants: &[BigInt], ell: u64) -> Self {
        let mut entries = BTreeMap::new();
        let mut free = 0;
        for a in invariants {
            if a.is_zero() {
                free += 1;
            } else {
                *entries.entry(valuation(a, ell).unwrap()).or_insert(0) += 1;
            }
        }
        DivisorProfile::new(ell, entries, free)
    }
}

/// Finite abelian group plus a free part, as prime-power cyclic factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupDecomposition {
    pub free_rank: u64,
    /// `(l, a, multiplicity)` with `a >= 1`, sorted by prime then exponent.
    pub torsion: Vec<(u64, u32, u64)>,
}

impl GroupDecomposition {
    pub fn from_profiles<'a>(free_rank: u64, profiles: impl IntoIterator<Item = &'a DivisorProfile>) -> Self {
        let mut torsion: Vec<(u64, u32, u64)> = profiles
            .into_iter()
            .flat_map(|p| p.torsion().map(move |(a, m)| (p.ell, a, m)))
            .collect();
        torsion.sort_unstable();
        GroupDecomposition { free_rank, torsion }
    }

    pub fn order(&self) -> BigInt {
        self.torsion
            .iter()
            .fold(BigInt::one(), |acc, &(l, a, m)| acc * BigInt::from(l).pow(a * m as u32))
    }

    /// The finite part as `Z/2 + (Z/3)^6`; `0` when trivial.
    pub fn torsion_string(&self) -> String {
        if self.torsion.is_empty() {
            return "0".to_string();
        }
        self.torsion
            .iter()
            .map(|&(l, a, m)| {
                let modulus = BigInt::from(l).pow(a);
                if m == 1 {
                    format!("Z/{modulus}")
                } else {
                    format!("(Z/{modulus})^{m}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for GroupDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.free_rank, self.torsion.is_empty()) {
            (0, _) => f.write_str(&self.torsion_string()),
            (r, true) => write!(f, "{}", free_str(r)),
            (r, false) => write!(f, "{} + {}", free_str(r), self.torsion_string()),
        }
    }
}

fn free_str(r: u64) -> String {
    if r == 1 {
        "Z".to_string()
    } else {
        format!("Z^{r}")
    }
}

/// Profile from the full integer Smith normal form.
pub fn divisor_profile_full(m: &IntegerMatrix, ell: u64) -> Result<DivisorProfile, SnfError> {
    if !arith::is_prime(ell) {
        return Err(SnfError::NotPrime(ell));
    }
    Ok(DivisorProfile::from_invariants(&smith_normal_form(m), ell))
}

/// Whether the all-ones vector lies in the kernel; a cheap exact certificate
/// for Laplacians.
fn ones_in_kernel(m: &IntegerMatrix) -> bool {
    (0..m.rows()).all(|i| m.row(i).iter().map(|&x| x as i128).sum::<i128>() == 0)
}

fn free_rank_cert(m: &IntegerMatrix, vanishing: usize) -> usize {
    let slots = m.rows().min(m.cols());
    if vanishing == 0 {
        return 0;
    }
    if vanishing == 1 && m.cols() <= m.rows() && ones_in_kernel(m) {
        return 1;
    }
    slots - rank_exact(m)
}

fn reduction_to_profile(ell: u64, r: local::LocalReduction, free: usize) -> DivisorProfile {
    DivisorProfile::new(ell, r.counts, free as u64)
}

/// Profile by elimination over `Z / l^B`, raising `B` until every vanishing
/// slot is accounted for by the free rank.
pub fn divisor_profile_with(m: &IntegerMatrix, ell: u64, exec: Execution) -> Result<DivisorProfile, SnfError> {
    if !arith::is_prime(ell) {
        return Err(SnfError::NotPrime(ell));
    }
    let first = if ell == 2 {
        local::reduce(&local::TwoAdic, m, exec)
    } else if let Some(ring) = local::Narrow::new(ell) {
        local::reduce(&ring, m, exec)
    } else {
        local::reduce(&local::Wide::new(ell), m, exec)
    };
    let free = free_rank_cert(m, first.vanishing);
    if first.vanishing == free {
        return Ok(reduction_to_profile(ell, first, free));
    }
    let mut b = first.exponent;
    if ell != 2 && local::Narrow::new(ell).is_some() {
        let wide = local::Wide::new(ell);
        if wide.exponent() > b {
            b = wide.exponent();
            let r = local::reduce(&wide, m, exec);
            if r.vanishing == free {
                return Ok(reduction_to_profile(ell, r, free));
            }
        }
    }
    loop {
        b *= 2;
        let r = local::reduce(&local::Big::new(ell, b), m, exec);
        if r.vanishing == free {
            return Ok(reduction_to_profile(ell, r, free));
        }
    }
}

/// Elementary divisors of `m` at `ell`.
pub fn divisor_profile(m: &IntegerMatrix, ell: u64) -> Result<DivisorProfile, SnfError> {
    divisor_profile_with(m, ell, Execution::default())
}

/// Cokernel of a square matrix from its full Smith normal form.
pub fn cokernel(m: &IntegerMatrix) -> Result<GroupDecomposition, SnfError> {
    if !m.is_square() {
        return Err(SnfError::NotSquare);
    }
    let inv = smith_normal_form(m);
    Ok(cokernel_from_invariants(&inv))
}

pub fn cokernel_from_invariants(inv: &[BigInt]) -> GroupDecomposition {
    let free = inv.iter().filter(|a| a.is_zero()).count() as u64;
    let largest = inv.iter().filter(|a| !a.is_zero()).max().cloned().unwrap_or_else(BigInt::one);
    let primes: Vec<u64> = arith::factor_bigint(&largest).into_keys().collect();
    let profiles: Vec<DivisorProfile> = primes.iter().map(|&l| DivisorProfile::from_invariants(inv, l)).collect();
    GroupDecomposition::from_profiles(free, &profiles)
}

/// Number of spanning trees: the reduced Laplacian determinant.
pub fn spanning_tree_count(graph: &PolarGraph) -> Result<BigInt, SnfError> {
    if !graph.is_connected() {
        return Err(SnfError::Disconnected);
    }
    Ok(tree_count_of_laplacian(&graph.laplacian_matrix()))
}

pub fn tree_count_of_laplacian(l: &IntegerMatrix) -> BigInt {
    if l.rows() == 1 {
        return BigInt::one();
    }
    bareiss_determinant(&l.minor(0, 0)).abs()
}

/// Reduced-Laplacian determinant modulo a prime.
pub fn tree_count_mod(l: &IntegerMatrix, p: u64) -> u64 {
    if l.rows() == 1 {
        return 1 % p;
    }
    det::determinant_mod_prime(&l.minor(0, 0), p)
}

/// `dim` of the filtration term `M_j` at `ell`: the number of invariant
/// factors equal to `l^j` in the Smith form of `[M | l^j I]`.
pub fn filtration_dimension(m: &IntegerMatrix, ell: u64, j: u32) -> u64 {
    let lj = BigInt::from(ell).pow(j);
    let aug = m.augment_scalar(lj.to_i64().expect("l^j fits in 64 bits"));
    smith_normal_form(&aug).iter().filter(|a| **a == lj).count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_profile() {
        let p = divisor_profile(&IntegerMatrix::identity(4), 7).unwrap();
        assert_eq!(p.entries, BTreeMap::from([(0, 4)]));
        assert_eq!(p.free_rank, 0);
        assert_eq!(divisor_profile(&IntegerMatrix::identity(2), 4), Err(SnfError::NotPrime(4)));
    }

    #[test]
    fn escalation_past_machine_words() {
        let p = divisor_profile(&IntegerMatrix::from_rows(vec![vec![1, 0], vec![0, 0]]), 3).unwrap();
        assert_eq!(p.free_rank, 1);
        assert_eq!(p.entries, BTreeMap::from([(0, 1)]));
        // invariant factors 1 and 3^42; 3^40 is the largest power below 2^64
        let a = 3i64.pow(21);
        let m = IntegerMatrix::from_rows(vec![vec![a, 1], vec![0, a]]);
        let p = divisor_profile(&m, 3).unwrap();
        assert_eq!(p.entries, BTreeMap::from([(0, 1), (42, 1)]));
        assert_eq!(p.free_rank, 0);
        assert_eq!(p, divisor_profile_full(&m, 3).unwrap());
        let m = IntegerMatrix::from_rows(vec![vec![1i64 << 40, 1], vec![0, 1i64 << 40]]);
        let p = divisor_profile(&m, 2).unwrap();
        assert_eq!(p.entries, BTreeMap::from([(0, 1), (80, 1)]));
    }

    #[test]
    fn group_strings() {
        let g = GroupDecomposition { free_rank: 0, torsion: vec![(2, 1, 1), (3, 1, 6)] };
        assert_eq!(g.torsion_string(), "Z/2 + (Z/3)^6");
        let g = GroupDecomposition { free_rank: 1, torsion: vec![] };
        assert_eq!(g.torsion_string(), "0");
        assert_eq!(g.to_string(), "Z");
        let inv: Vec<BigInt> = [1, 3, 9, 0].iter().map(|&x| BigInt::from(x)).collect();
        let c = cokernel_from_invariants(&inv);
        assert_eq!(c.to_string(), "Z + Z/3 + Z/9");
    }

    #[test]
    fn triangle_trees() {
        let l = IntegerMatrix::from_rows(vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]]);
        assert_eq!(tree_count_of_laplacian(&l), BigInt::from(3));
        assert_eq!(tree_count_mod(&l, 2), 1);
    }
}
