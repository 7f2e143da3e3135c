//! Integer helpers: valuations, Gaussian binomials, factoring.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("valuation of zero is undefined")]
    ZeroArgument,
    #[error("gaussian binomial [{d} choose {j}]_{z} is out of range")]
    OutOfRange { d: i64, j: i64, z: i64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// Largest `e` with `l^e | n`.
pub fn valuation(n: &BigInt, l: u64) -> Result<u32, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroArgument);
    }
    let l = BigInt::from(l);
    let mut n = n.abs();
    let mut e = 0;
    loop {
        let (q, r) = n.div_rem(&l);
        if !r.is_zero() {
            return Ok(e);
        }
        n = q;
        e += 1;
    }
}

pub fn valuation_u64(mut n: u64, l: u64) -> Result<u32, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroArgument);
    }
    let mut e = 0;
    while n.is_multiple_of(l) {
        n /= l;
        e += 1;
    }
    Ok(e)
}

/// Number of `j`-dimensional subspaces of a `d`-dimensional space over a
/// field with `z` elements.
pub fn gaussian_binomial(d: i64, j: i64, z: i64) -> Result<BigInt, ArithError> {
    if j < 0 || j > d || z < 2 {
        return Err(ArithError::OutOfRange { d, j, z });
    }
    let z = BigInt::from(z);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 1..=j {
        num *= z.pow((d - i + 1) as u32) - 1u32;
        den *= z.pow(i as u32) - 1u32;
    }
    debug_assert!((&num % &den).is_zero());
    Ok(num / den)
}

/// `[d]_z = (z^d - 1)/(z - 1)`, with `[0]_z = 0`.
pub fn gauss_one(d: u32, z: &BigInt) -> BigInt {
    (z.pow(d) - 1u32) / (z - 1u32)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Pollard-Brent; `n` odd composite.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Prime factorization of `n >= 1`: trial division up to 10^6, then
/// Miller-Rabin and Pollard rho on what remains.
pub fn factor(n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut n = n;
    if n == 0 {
        return out;
    }
    let mut d = 2u64;
    while d <= TRIAL_LIMIT && d * d <= n {
        while n.is_multiple_of(d) {
            *out.entry(d).or_insert(0) += 1;
            n /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(x) = stack.pop() {
        if x == 1 {
            continue;
        }
        if is_prime(x) {
            *out.entry(x).or_insert(0) += 1;
            continue;
        }
        let y = pollard_rho(x);
        stack.push(y);
        stack.push(x / y);
    }
    out
}

fn is_probable_prime_big(n: &BigUint) -> bool {
    if let Some(x) = n.to_u64() {
        return is_prime(x);
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho_big(n: &BigUint) -> BigUint {
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = BigUint::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1u32;
    }
}

/// Prime factorization of `|n|` for `n != 0`. Prime factors must fit in
/// 64 bits; larger ones are out of scope and abort.
pub fn factor_bigint(n: &BigInt) -> BTreeMap<u64, u32> {
    let mut n = n.magnitude().clone();
    if let Some(x) = n.to_u64() {
        return factor(x);
    }
    let mut out = BTreeMap::new();
    let mut d = 2u64;
    while d <= TRIAL_LIMIT {
        while (&n % d).is_zero() {
            *out.entry(d).or_insert(0) += 1;
            n /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(x) = stack.pop() {
        if x.is_one() {
            continue;
        }
        if let Some(small) = x.to_u64() {
            for (p, e) in factor(small) {
                *out.entry(p).or_insert(0) += e;
            }
            continue;
        }
        assert!(!is_probable_prime_big(&x), "prime factor {x} exceeds 64 bits");
        let y = pollard_rho_big(&x);
        stack.push(&x / &y);
        stack.push(y);
    }
    out
}
