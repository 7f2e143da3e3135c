//! Elementary divisors at one prime by elimination over `Z / l^B`.
//!
//! Over the local ring every nonzero element is `l^v * unit`, so pivoting on
//! an entry of least valuation clears its column with multiples of the pivot
//! row alone, and the pivot's valuation is the valuation of one invariant
//! factor. Entries that vanish mod `l^B` stand for invariant factors of
//! valuation at least `B` or for zero invariant factors; the caller decides
//! which by comparing with the free rank.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::matrix::IntegerMatrix;
use crate::par::{self, Execution};

/// Arithmetic in `Z / l^B`.
pub trait LocalRing: Sync {
    type E: Clone + Send + Sync;

    fn exponent(&self) -> u32;
    fn reduce(&self, x: i64) -> Self::E;
    fn is_zero(&self, x: &Self::E) -> bool;
    fn is_unit(&self, x: &Self::E) -> bool;
    /// Valuation of a nonzero element.
    fn valuation(&self, x: &Self::E) -> u32;
    /// `x / l^v` on representatives; `l^v` divides `x`.
    fn shift_down(&self, x: &Self::E, v: u32) -> Self::E;
    /// Inverse of a unit.
    fn inverse(&self, x: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// `a - f b`.
    fn sub_mul(&self, a: &Self::E, f: &Self::E, b: &Self::E) -> Self::E;
}

fn inv_mod_u64(a: u64, m: u64) -> u64 {
    let (g, x, _) = super::det::ext_gcd(a as i128, m as i128);
    debug_assert_eq!(g, 1);
    x.rem_euclid(m as i128) as u64
}

/// `Z / 2^64` with wrapping machine arithmetic.
pub struct TwoAdic;

impl LocalRing for TwoAdic {
    type E = u64;

    fn exponent(&self) -> u32 {
        64
    }
    fn reduce(&self, x: i64) -> u64 {
        x as u64
    }
    fn is_zero(&self, x: &u64) -> bool {
        *x == 0
    }
    fn is_unit(&self, x: &u64) -> bool {
        x & 1 == 1
    }
    fn valuation(&self, x: &u64) -> u32 {
        x.trailing_zeros()
    }
    fn shift_down(&self, x: &u64, v: u32) -> u64 {
        x >> v
    }
    fn inverse(&self, x: &u64) -> u64 {
        // Newton iteration doubles the number of correct bits each step
        let mut y = *x;
        for _ in 0..6 {
            y = y.wrapping_mul(2u64.wrapping_sub(x.wrapping_mul(y)));
        }
        y
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a.wrapping_mul(*b)
    }
    fn sub_mul(&self, a: &u64, f: &u64, b: &u64) -> u64 {
        a.wrapping_sub(f.wrapping_mul(*b))
    }
}

/// `Z / l^B` with `l^B < 2^32`: products fit in 64 bits.
pub struct Narrow {
    l: u64,
    b: u32,
    modulus: u64,
}

impl Narrow {
    /// Largest exponent with `l^B < 2^32`; `None` if `l` itself is too big.
    pub fn new(l: u64) -> Option<Self> {
        let (mut b, mut modulus) = (0u32, 1u64);
        while modulus * l < 1 << 32 {
            modulus *= l;
            b += 1;
        }
        (b > 0).then_some(Narrow { l, b, modulus })
    }
}

/// `Z / l^B` with `l^B < 2^64`, products through 128 bits.
pub struct Wide {
    l: u64,
    b: u32,
    modulus: u64,
}

impl Wide {
    pub fn new(l: u64) -> Self {
        let (mut b, mut modulus) = (0u32, 1u64);
        while let Some(next) = modulus.checked_mul(l) {
            modulus = next;
            b += 1;
        }
        Wide { l, b, modulus }
    }
}

macro_rules! word_ring {
    ($ty:ty, $mul:expr) => {
        impl LocalRing for $ty {
            type E = u64;

            fn exponent(&self) -> u32 {
                self.b
            }
            fn reduce(&self, x: i64) -> u64 {
                (x as i128).rem_euclid(self.modulus as i128) as u64
            }
            fn is_zero(&self, x: &u64) -> bool {
                *x == 0
            }
            fn is_unit(&self, x: &u64) -> bool {
                x % self.l != 0
            }
            fn valuation(&self, x: &u64) -> u32 {
                let (mut x, mut v) = (*x, 0);
                while x % self.l == 0 {
                    x /= self.l;
                    v += 1;
                }
                v
            }
            fn shift_down(&self, x: &u64, v: u32) -> u64 {
                x / self.l.pow(v)
            }
            fn inverse(&self, x: &u64) -> u64 {
                inv_mod_u64(*x, self.modulus)
            }
            fn mul(&self, a: &u64, b: &u64) -> u64 {
                let f: fn(u64, u64, u64) -> u64 = $mul;
                f(*a, *b, self.modulus)
            }
            fn sub_mul(&self, a: &u64, f: &u64, b: &u64) -> u64 {
                let p = self.mul(f, b);
                if *a >= p {
                    a - p
                } else {
                    a + (self.modulus - p)
                }
            }
        }
    };
}

word_ring!(Narrow, |a, b, m| a * b % m);
word_ring!(Wide, |a, b, m| ((a as u128 * b as u128) % m as u128) as u64);

/// `Z / l^B` for any `B`, on big integers.
pub struct Big {
    l: BigUint,
    b: u32,
    modulus: BigUint,
}

impl Big {
    pub fn new(l: u64, b: u32) -> Self {
        let l = BigUint::from(l);
        let modulus = l.pow(b);
        Big { l, b, modulus }
    }
}

impl LocalRing for Big {
    type E = BigUint;

    fn exponent(&self) -> u32 {
        self.b
    }
    fn reduce(&self, x: i64) -> BigUint {
        let m = num_bigint::BigInt::from(self.modulus.clone());
        num_bigint::BigInt::from(x).mod_floor(&m).to_biguint().unwrap()
    }
    fn is_zero(&self, x: &BigUint) -> bool {
        x.is_zero()
    }
    fn is_unit(&self, x: &BigUint) -> bool {
        !(x % &self.l).is_zero()
    }
    fn valuation(&self, x: &BigUint) -> u32 {
        let mut x = x.clone();
        let mut v = 0;
        loop {
            let (q, r) = x.div_rem(&self.l);
            if !r.is_zero() {
                return v;
            }
            x = q;
            v += 1;
        }
    }
    fn shift_down(&self, x: &BigUint, v: u32) -> BigUint {
        x / self.l.pow(v)
    }
    fn inverse(&self, x: &BigUint) -> BigUint {
        let xi = num_bigint::BigInt::from(x.clone());
        let mi = num_bigint::BigInt::from(self.modulus.clone());
        let e = xi.extended_gcd(&mi);
        debug_assert!(e.gcd.is_one());
        e.x.mod_floor(&mi).to_biguint().unwrap()
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b % &self.modulus
    }
    fn sub_mul(&self, a: &BigUint, f: &BigUint, b: &BigUint) -> BigUint {
        let p = f * b % &self.modulus;
        (a + &self.modulus - p) % &self.modulus
    }
}

/// Outcome of elimination over `Z / l^B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalReduction {
    /// Multiplicity of each valuation `< B` among the pivots.
    pub counts: BTreeMap<u32, u64>,
    /// Diagonal slots that vanish mod `l^B`.
    pub vanishing: usize,
    pub exponent: u32,
}

/// Least valuation in `row[from..]`, with the first column attaining it.
fn row_best<R: LocalRing>(ring: &R, row: &[R::E], from: usize) -> Option<(u32, usize)> {
    let mut best: Option<(u32, usize)> = None;
    for (j, x) in row.iter().enumerate().skip(from) {
        if ring.is_zero(x) {
            continue;
        }
        if ring.is_unit(x) {
            return Some((0, j));
        }
        let v = ring.valuation(x);
        if best.is_none_or(|(bv, _)| v < bv) {
            best = Some((v, j));
        }
    }
    best
}

pub fn reduce<R: LocalRing>(ring: &R, m: &IntegerMatrix, exec: Execution) -> LocalReduction {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<R::E>> = (0..rows).map(|i| m.row(i).iter().map(|&x| ring.reduce(x)).collect()).collect();
    let slots = rows.min(cols);
    let mut counts = BTreeMap::new();
    let mut best: Vec<Option<(u32, usize)>> = par::map(exec, &a, |row| row_best(ring, row, 0));
    let mut t = 0;
    while t < slots {
        let pick = best
            .iter()
            .enumerate()
            .skip(t)
            .filter_map(|(i, b)| b.map(|(v, j)| (v, i, j)))
            .min();
        let Some((v, pr, pc)) = pick else {
            break;
        };
        a.swap(t, pr);
        best.swap(t, pr);
        if pc != t {
            for row in a.iter_mut() {
                row.swap(t, pc);
            }
        }
        *counts.entry(v).or_insert(0) += 1;
        let (head, tail) = a.split_at_mut(t + 1);
        let pivot_row = &head[t];
        let unit = ring.shift_down(&pivot_row[t], v);
        let unit_inv = ring.inverse(&unit);
        let updated = par::map_mut(exec, tail, |row| {
            if !ring.is_zero(&row[t]) {
                let f = ring.mul(&ring.shift_down(&row[t], v), &unit_inv);
                for j in t + 1..cols {
                    if !ring.is_zero(&pivot_row[j]) {
                        row[j] = ring.sub_mul(&row[j], &f, &pivot_row[j]);
                    }
                }
                row[t] = ring.reduce(0);
            }
            row_best(ring, row, t + 1)
        });
        best.truncate(t + 1);
        best.extend(updated);
        t += 1;
    }
    LocalReduction { counts, vanishing: slots - t, exponent: ring.exponent() }
}
