//! Fraction-free determinants and ranks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::matrix::IntegerMatrix;

/// Determinant by Bareiss elimination.
pub fn bareiss_determinant(m: &IntegerMatrix) -> BigInt {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    let mut a = m.to_bigint_rows();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * prev
}

/// Rank over the rationals by fraction-free elimination.
pub fn rank_over_q(m: &IntegerMatrix) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.to_bigint_rows();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(p, rank);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = &a[i][j] * &a[rank][col] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Rank over GF(p) for a prime `p < 2^63`.
pub fn rank_mod_prime(m: &IntegerMatrix, p: u64) -> usize {
    reduce_mod_prime(m, p).0
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (g, x, _) = ext_gcd(a as i128, p as i128);
    debug_assert_eq!(g, 1);
    x.rem_euclid(p as i128) as u64
}

pub(crate) fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0, s0, t0)
}

/// Reduced row echelon form over GF(p): returns the rank, the reduced rows
/// and the pivot columns.
fn reduce_mod_prime(m: &IntegerMatrix, p: u64) -> (usize, Vec<Vec<u64>>, Vec<usize>) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<u64>> = (0..rows)
        .map(|i| m.row(i).iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pr) = (rank..rows).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(pr, rank);
        let inv = inv_mod(a[rank][col], p);
        for x in a[rank].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = a[rank].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == rank || row[col] == 0 {
                continue;
            }
            let factor = row[col];
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x = (*x + p - mul_mod(factor, y, p)) % p;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    (rank, a, pivots)
}

/// Largest prime below 2^61, a Mersenne prime.
pub const WIDE_PRIME: u64 = (1 << 61) - 1;

/// Smallest-magnitude rational `a/b` congruent to `x` mod `p`.
fn rational_reconstruct(x: u64, p: u64) -> Option<(i128, i128)> {
    let bound = ((p / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (p as i128, x as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    let _ = r0;
    Some(if t1 < 0 { (-r1, -t1) } else { (r1, t1) })
}

/// Kernel vectors over GF(p), lifted to integer vectors by rational
/// reconstruction and accepted only if `M x = 0` holds exactly.
fn certified_kernel(m: &IntegerMatrix, rank: usize, reduced: &[Vec<u64>], pivots: &[usize], p: u64) -> bool {
    let cols = m.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    for &fc in &free {
        let mut x = vec![0u64; cols];
        x[fc] = 1;
        for (r, &pc) in pivots.iter().enumerate().take(rank) {
            x[pc] = (p - reduced[r][fc]) % p;
        }
        let mut num = Vec::with_capacity(cols);
        let mut lcm = BigInt::one();
        for &xi in &x {
            let Some((a, b)) = rational_reconstruct(xi, p) else {
                return false;
            };
            lcm = lcm.lcm(&BigInt::from(b));
            num.push((a, b));
        }
        let vec: Vec<BigInt> = num.iter().map(|&(a, b)| BigInt::from(a) * (&lcm / BigInt::from(b))).collect();
        for i in 0..m.rows() {
            let dot = m
                .row(i)
                .iter()
                .zip(&vec)
                .fold(BigInt::zero(), |acc, (&mij, xj)| acc + BigInt::from(mij) * xj);
            if !dot.is_zero() {
                return false;
            }
        }
    }
    true
}

/// Exact rank over the rationals: rank modulo a wide prime, certified by an
/// exactly verified kernel; exact Bareiss elimination when certification fails.
pub fn rank_exact(m: &IntegerMatrix) -> usize {
    let (rank, reduced, pivots) = reduce_mod_prime(m, WIDE_PRIME);
    if rank == m.rows().min(m.cols()) || certified_kernel(m, rank, &reduced, &pivots, WIDE_PRIME) {
        return rank;
    }
    rank_over_q(m)
}

/// Determinant modulo a prime, for fingerprints.
pub fn determinant_mod_prime(m: &IntegerMatrix, p: u64) -> u64 {
    assert!(m.is_square());
    let n = m.rows();
    let mut a: Vec<Vec<u64>> = (0..n)
        .map(|i| m.row(i).iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
        .collect();
    let mut det = 1u64;
    for k in 0..n {
        let Some(pr) = (k..n).find(|&i| a[i][k] != 0) else {
            return 0;
        };
        if pr != k {
            a.swap(pr, k);
            det = (p - det) % p;
        }
        det = mul_mod(det, a[k][k], p);
        let inv = inv_mod(a[k][k], p);
        let pivot_row = a[k].clone();
        for row in a.iter_mut().skip(k + 1) {
            if row[k] == 0 {
                continue;
            }
            let factor = mul_mod(row[k], inv, p);
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(k) {
                *x = (*x + p - mul_mod(factor, y, p)) % p;
            }
        }
    }
    det
}

/// `n mod p` for a possibly negative big integer.
pub fn big_mod(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_determinants() {
        let m = IntegerMatrix::from_rows(vec![vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 2]]);
        assert_eq!(bareiss_determinant(&m), BigInt::from(6));
        let m = IntegerMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(bareiss_determinant(&m), BigInt::from(-1));
        let m = IntegerMatrix::from_rows(vec![vec![1, 2], vec![2, 4]]);
        assert_eq!(bareiss_determinant(&m), BigInt::from(0));
        assert_eq!(determinant_mod_prime(&IntegerMatrix::diagonal(&[3, 5]), 7), 1);
    }

    #[test]
    fn ranks() {
        let m = IntegerMatrix::from_rows(vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(rank_over_q(&m), 2);
        assert_eq!(rank_exact(&m), 2);
        assert_eq!(rank_mod_prime(&m, 2), 1);
        assert_eq!(rank_mod_prime(&m, 3), 2);
        let m = IntegerMatrix::from_rows(vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(rank_mod_prime(&m, 2), 0);
        assert_eq!(rank_exact(&m), 2);
    }

    #[test]
    fn reconstruction() {
        let p = WIDE_PRIME;
        let third = inv_mod(3, p);
        assert_eq!(rational_reconstruct(mul_mod(2, third, p), p), Some((2, 3)));
        assert_eq!(rational_reconstruct(p - 1, p), Some((-1, 1)));
    }
}
