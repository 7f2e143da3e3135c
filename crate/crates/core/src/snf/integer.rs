//! Smith normal form over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::matrix::IntegerMatrix;

/// Invariant factors `a_1 | a_2 | ... | a_min(n,m)`, nonnegative, zeros last.
///
/// Each step brings the nonzero entry of least magnitude (first row, then
/// first column, on ties) to the pivot, reduces its row and column by
/// division with remainder until both are clear, and then ensures the pivot
/// divides the rest of the active block.
pub fn smith_normal_form(m: &IntegerMatrix) -> Vec<BigInt> {
    let mut a = m.to_bigint_rows();
    smith_in_place(&mut a, m.rows(), m.cols())
}

pub fn smith_of_rows(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    smith_in_place(&mut a, rows, cols)
}

fn min_entry(a: &[Vec<BigInt>], t: usize, rows: usize, cols: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().take(rows).skip(t) {
        for (j, x) in row.iter().enumerate().take(cols).skip(t) {
            if x.is_zero() {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bj)) => x.magnitude() < a[bi][bj].magnitude(),
            };
            if better {
                best = Some((i, j));
                if x.magnitude().bits() == 1 {
                    return best;
                }
            }
        }
    }
    best
}

fn swap_cols(a: &mut [Vec<BigInt>], c1: usize, c2: usize) {
    if c1 != c2 {
        for row in a.iter_mut() {
            row.swap(c1, c2);
        }
    }
}

fn smith_in_place(a: &mut [Vec<BigInt>], rows: usize, cols: usize) -> Vec<BigInt> {
    let n = rows.min(cols);
    let mut diag = Vec::with_capacity(n);
    for t in 0..n {
        let Some((pi, pj)) = min_entry(a, t, rows, cols) else {
            diag.resize(n, BigInt::zero());
            break;
        };
        a.swap(t, pi);
        swap_cols(a, t, pj);
        loop {
            let mut dirty = false;
            // clear column t below the pivot
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                let (head, tail) = a.split_at_mut(i);
                let pivot_row = &head[t];
                for (x, y) in tail[0].iter_mut().zip(pivot_row).skip(t) {
                    if !y.is_zero() {
                        *x -= &q * y;
                    }
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            // clear row t right of the pivot
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().take(rows).skip(t) {
                    if !row[t].is_zero() {
                        let d = &q * &row[t];
                        row[j] -= d;
                    }
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // a remainder is now smaller than the pivot
                let mut best = (t, t);
                for i in t..rows {
                    if !a[i][t].is_zero() && a[i][t].magnitude() < a[best.0][best.1].magnitude() {
                        best = (i, t);
                    }
                }
                for j in t..cols {
                    if !a[t][j].is_zero() && a[t][j].magnitude() < a[best.0][best.1].magnitude() {
                        best = (t, j);
                    }
                }
                a.swap(t, best.0);
                swap_cols(a, t, best.1);
                continue;
            }
            // the pivot must divide the remaining block
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    let (head, tail) = a.split_at_mut(i);
                    for (x, y) in head[t].iter_mut().zip(&tail[0]).skip(t + 1) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}
