//! Textbook Smith normal form by Bezout 2x2 transforms, carried out modulo
//! a nonzero maximal minor. Slow and simple; used as an independent check on
//! the main algorithm.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntegerMatrix;

/// Rank and the absolute value of a nonzero maximal minor, by fraction-free
/// elimination with full pivot search.
fn rank_and_minor(mut a: Vec<Vec<BigInt>>, rows: usize, cols: usize) -> (usize, BigInt) {
    let mut prev = BigInt::one();
    let mut r = 0;
    while r < rows.min(cols) {
        let found = (r..rows).flat_map(|i| (r..cols).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero());
        let Some((pi, pj)) = found else { break };
        a.swap(r, pi);
        for row in a.iter_mut() {
            row.swap(r, pj);
        }
        for i in r + 1..rows {
            for j in r + 1..cols {
                let v = (&a[r][r] * &a[i][j] - &a[i][r] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][r] = BigInt::zero();
        }
        prev = a[r][r].clone();
        r += 1;
    }
    (r, prev.abs())
}

/// Bezout data for `(a, b)`, taking `(a, 1, 0)` when `a | b` so that a pivot
/// which already divides is never moved.
fn egcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    if (b % a).is_zero() {
        return (a.clone(), BigInt::one(), BigInt::zero());
    }
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Invariant factors of `m`, zeros last.
///
/// With `r` the rank and `d` a nonzero `r x r` minor, every nonzero invariant
/// factor divides `d`, so the first `r` invariants of `[m | d I]` are those of
/// `m` and all arithmetic can be done modulo `d`.
pub fn naive_oracle_snf(m: &IntegerMatrix) -> Vec<BigInt> {
    let (rows, cols) = (m.rows(), m.cols());
    let n = rows.min(cols);
    let (rank, d) = rank_and_minor(m.to_bigint_rows(), rows, cols);
    if rank == 0 {
        return vec![BigInt::zero(); n];
    }
    let md = |x: BigInt| x.mod_floor(&d);
    let mut a: Vec<Vec<BigInt>> = m.to_bigint_rows().into_iter().map(|r| r.into_iter().map(md).collect()).collect();
    let mut diag = Vec::with_capacity(n);
    for t in 0..n {
        let found = (t..rows).flat_map(|i| (t..cols).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero());
        let Some((pi, pj)) = found else {
            diag.resize(n, BigInt::zero());
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let (g, x, y) = egcd(&a[t][t], &a[i][t]);
                let p = &a[t][t] / &g;
                let q = &a[i][t] / &g;
                for j in t..cols {
                    let top = md(&x * &a[t][j] + &y * &a[i][j]);
                    let bot = md(&p * &a[i][j] - &q * &a[t][j]);
                    a[t][j] = top;
                    a[i][j] = bot;
                }
                a[t][t] = g;
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let (g, x, y) = egcd(&a[t][t], &a[t][j]);
                let p = &a[t][t] / &g;
                let q = &a[t][j] / &g;
                for row in a.iter_mut().skip(t) {
                    let left = md(&x * &row[t] + &y * &row[j]);
                    let right = md(&p * &row[j] - &q * &row[t]);
                    row[t] = left;
                    row[j] = right;
                }
                a[t][t] = g;
            }
            if (t + 1..rows).all(|i| a[i][t].is_zero()) {
                break;
            }
        }
        diag.push(a[t][t].clone());
    }
    let mut inv: Vec<BigInt> = diag.iter().map(|x| x.gcd(&d)).collect();
    for i in 0..n {
        for j in i + 1..n {
            let g = inv[i].gcd(&inv[j]);
            let l = inv[i].lcm(&inv[j]);
            inv[i] = g;
            inv[j] = l;
        }
    }
    for x in inv.iter_mut().skip(rank) {
        *x = BigInt::zero();
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(naive_oracle_snf(&IntegerMatrix::identity(3)), vec![BigInt::from(1); 3]);
        assert_eq!(naive_oracle_snf(&IntegerMatrix::zeros(1, 1)), vec![BigInt::from(0)]);
        let m = IntegerMatrix::from_rows(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let want: Vec<BigInt> = [2, 6, 12].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(naive_oracle_snf(&m), want);
        let singular = IntegerMatrix::from_rows(vec![vec![2, 4], vec![3, 6], vec![0, 0]]);
        assert_eq!(naive_oracle_snf(&singular), vec![BigInt::from(1), BigInt::from(0)]);
        let tall = IntegerMatrix::from_rows(vec![vec![4], vec![6]]);
        assert_eq!(naive_oracle_snf(&tall), vec![BigInt::from(2)]);
    }
}
