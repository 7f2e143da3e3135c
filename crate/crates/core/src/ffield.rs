//! Finite fields GF(p^t) with table-driven multiplication.
//!
//! Elements are encoded as integers in `[0, p^t)`: the coefficient vector of the
//! residue polynomial, read as base-`p` digits with the constant term as the
//! least significant digit. The defining polynomial is the lexicographically
//! smallest monic irreducible of degree `t`, comparing coefficients from the
//! constant term upwards, so encodings are reproducible.

use thiserror::Error;

/// Default ceiling on the field order.
pub const DEFAULT_FIELD_BOUND: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {p}^{t} exceeds the configured bound {bound}")]
    DegreeTooLarge { p: u64, t: u32, bound: u64 },
    #[error("field is not a quadratic extension of a named subfield")]
    NotQuadraticExtension,
}

/// Trial-division primality, adequate for field characteristics.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A prime power `q = p^t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimePower {
    p: u64,
    t: u32,
    value: u64,
}

impl PrimePower {
    pub fn new(p: u64, t: u32) -> Result<Self, FieldError> {
        if !is_prime_u64(p) {
            return Err(FieldError::NotPrime(p));
        }
        if t == 0 {
            return Err(FieldError::NotPrimePower(1));
        }
        let value = p
            .checked_pow(t)
            .ok_or(FieldError::DegreeTooLarge { p, t, bound: u64::MAX })?;
        Ok(PrimePower { p, t, value })
    }

    /// Decompose `q` as `p^t`.
    pub fn from_value(q: u64) -> Result<Self, FieldError> {
        if q < 2 {
            return Err(FieldError::NotPrimePower(q));
        }
        let mut p = 2u64;
        while p * p <= q && !q.is_multiple_of(p) {
            p += 1;
        }
        if !q.is_multiple_of(p) {
            p = q;
        }
        let mut rest = q;
        let mut t = 0u32;
        while rest.is_multiple_of(p) {
            rest /= p;
            t += 1;
        }
        if rest != 1 {
            return Err(FieldError::NotPrimePower(q));
        }
        Ok(PrimePower { p, t, value: q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// `q^2` as a prime power.
    pub fn squared(&self) -> Result<Self, FieldError> {
        PrimePower::new(self.p, 2 * self.t)
    }
}

impl std::fmt::Display for PrimePower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Encoded field element.
pub type Elem = u32;

/// GF(p^t). Immutable after construction.
#[derive(Debug, Clone)]
pub struct Field {
    p: u32,
    degree: u32,
    size: u32,
    modulus: Vec<u32>,
    primitive: Elem,
    exp: Vec<Elem>,
    log: Vec<u32>,
    /// Order of the subfield fixed by `x -> x^q` when built as GF(q^2).
    base: Option<u32>,
    subfield: Vec<Elem>,
}

impl Field {
    /// GF(p^t) with the default order bound.
    pub fn new(p: u64, t: u32) -> Result<Self, FieldError> {
        Self::with_bound(p, t, DEFAULT_FIELD_BOUND)
    }

    pub fn with_bound(p: u64, t: u32, bound: u64) -> Result<Self, FieldError> {
        if !is_prime_u64(p) {
            return Err(FieldError::NotPrime(p));
        }
        if t == 0 {
            return Err(FieldError::NotPrimePower(1));
        }
        let size = match p.checked_pow(t) {
            Some(s) if s <= bound && s <= u32::MAX as u64 => s,
            _ => return Err(FieldError::DegreeTooLarge { p, t, bound }),
        };
        let p32 = p as u32;
        let modulus = smallest_irreducible(p32, t as usize);
        let mut field = Field {
            p: p32,
            degree: t,
            size: size as u32,
            modulus,
            primitive: 0,
            exp: Vec::new(),
            log: Vec::new(),
            base: None,
            subfield: Vec::new(),
        };
        field.build_tables();
        Ok(field)
    }

    /// The field of the given prime-power order.
    pub fn of_order(q: PrimePower) -> Result<Self, FieldError> {
        Self::new(q.p(), q.t())
    }

    /// GF(q^2) as a degree-2t extension of GF(p), with GF(q) located as the
    /// fixed field of the Frobenius `x -> x^q`.
    pub fn quadratic_extension(q: PrimePower) -> Result<Self, FieldError> {
        let mut field = Self::new(q.p(), 2 * q.t())?;
        field.set_base(q.value() as u32);
        Ok(field)
    }

    fn set_base(&mut self, base: u32) {
        self.base = Some(base);
        // g^(q+1) generates the multiplicative group of the subfield.
        let sub_gen = self.pow(self.primitive, base as u64 + 1);
        let mut elems = vec![0];
        let mut x = 1;
        for _ in 0..base - 1 {
            elems.push(x);
            x = self.mul(x, sub_gen);
        }
        elems.sort_unstable();
        self.subfield = elems;
    }

    fn build_tables(&mut self) {
        let n = self.size as u64 - 1;
        let primes = distinct_prime_factors(n);
        let mut g = 1;
        while (g as u64) < self.size as u64 {
            if self.is_generator_slow(g, n, &primes) {
                break;
            }
            g += 1;
        }
        self.primitive = g;
        let mut exp = Vec::with_capacity(n as usize);
        let mut log = vec![0u32; self.size as usize];
        let mut x: Elem = 1;
        for i in 0..n as u32 {
            exp.push(x);
            log[x as usize] = i;
            x = self.mul_slow(x, g);
        }
        self.exp = exp;
        self.log = log;
    }

    fn is_generator_slow(&self, g: Elem, n: u64, primes: &[u64]) -> bool {
        if g == 0 {
            return false;
        }
        primes.iter().all(|&r| self.pow_slow(g, n / r) != 1)
    }

    fn pow_slow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc: Elem = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    fn mul_slow(&self, a: Elem, b: Elem) -> Elem {
        let pa = self.digits(a);
        let pb = self.digits(b);
        let prod = poly_mul(&pa, &pb, self.p);
        let rem = poly_rem(&prod, &self.modulus, self.p);
        self.encode(&rem)
    }

    fn digits(&self, mut a: Elem) -> Vec<u32> {
        let mut out = vec![0u32; self.degree as usize];
        for d in out.iter_mut() {
            *d = a % self.p;
            a /= self.p;
        }
        out
    }

    fn encode(&self, coeffs: &[u32]) -> Elem {
        coeffs
            .iter()
            .take(self.degree as usize)
            .rev()
            .fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    /// Monic defining polynomial, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Smallest-encoded generator of the multiplicative group.
    pub fn primitive_element(&self) -> Elem {
        self.primitive
    }

    /// All elements in canonical encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.size
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return a ^ b;
        }
        if self.degree == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut w = 1;
        for _ in 0..self.degree {
            out += ((a % self.p + b % self.p) % self.p) * w;
            a /= self.p;
            b /= self.p;
            w *= self.p;
        }
        out
    }

    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0;
        let mut w = 1;
        for _ in 0..self.degree {
            out += ((self.p - a % self.p) % self.p) * w;
            a /= self.p;
            w *= self.p;
        }
        out
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.size - 1;
        let e = self.log[a as usize] + self.log[b as usize];
        self.exp[(if e >= n { e - n } else { e }) as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return None;
        }
        let n = self.size - 1;
        let l = self.log[a as usize];
        Some(self.exp[((n - l) % n) as usize])
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.size - 1) as u64;
        let l = self.log[a as usize] as u64;
        self.exp[((l * (e % n)) % n) as usize]
    }

    /// Embeds an integer through the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.p as i64) as Elem
    }

    /// `a^q` for the quadratic extension GF(q^2).
    pub fn conjugate(&self, a: Elem) -> Result<Elem, FieldError> {
        let q = self.base.ok_or(FieldError::NotQuadraticExtension)?;
        Ok(self.pow(a, q as u64))
    }

    /// `a * a^q`, which lies in GF(q).
    pub fn field_norm(&self, a: Elem) -> Result<Elem, FieldError> {
        let c = self.conjugate(a)?;
        Ok(self.mul(a, c))
    }

    /// Order of the conjugation-fixed subfield, when this is GF(q^2).
    pub fn base_order(&self) -> Option<u32> {
        self.base
    }

    /// Elements of the subfield GF(q) in encoding order (empty unless GF(q^2)).
    pub fn subfield_elements(&self) -> &[Elem] {
        &self.subfield
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Elem) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let n = (self.size - 1) as u64;
        let l = self.log[a as usize] as u64;
        Some(n / num_integer::gcd(n, l))
    }
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    v
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut out = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    trim(out.into_iter().map(|c| c as u32).collect())
}

/// Remainder modulo a monic polynomial.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let dm = m.len() - 1;
    let p = p as u64;
    while r.len() > dm {
        let lead = *r.last().unwrap() % p;
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let sub = lead * c as u64 % p;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
    }
    if r.is_empty() {
        r.push(0);
    }
    r.into_iter().map(|c| c as u32).collect()
}

fn poly_is_zero(a: &[u32]) -> bool {
    a.iter().all(|&c| c == 0)
}

/// Monic polynomial of the given degree from a counter whose most
/// significant base-`p` digit is the constant term.
fn monic_from_counter(mut n: u64, degree: usize, p: u32) -> Vec<u32> {
    let mut coeffs = vec![0u32; degree + 1];
    for i in (0..degree).rev() {
        coeffs[i] = (n % p as u64) as u32;
        n /= p as u64;
    }
    coeffs[degree] = 1;
    coeffs
}

fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let degree = poly.len() - 1;
    if degree == 1 {
        return true;
    }
    if poly[0] == 0 {
        return false;
    }
    for d in 1..=degree / 2 {
        let count = (p as u64).pow(d as u32);
        for n in 0..count {
            let cand = monic_from_counter(n, d, p);
            if poly_is_zero(&poly_rem(poly, &cand, p)) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of the given degree,
/// coefficients compared from the constant term upwards.
pub fn smallest_irreducible(p: u32, degree: usize) -> Vec<u32> {
    let total = (p as u64).pow(degree as u32);
    for n in 0..total {
        let cand = monic_from_counter(n, degree, p);
        if is_irreducible(&cand, p) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_two() {
        let f = Field::new(2, 1).unwrap();
        assert_eq!(f.elements().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(f.mul(1, 1), 1);
        assert_eq!(f.add(1, 1), 0);
    }

    #[test]
    fn gf4_modulus_and_square() {
        let f = Field::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        // x = 2, x + 1 = 3
        assert_eq!(f.mul(2, 2), 3);
    }

    #[test]
    fn gf9_cyclic_group() {
        let f = Field::new(3, 2).unwrap();
        assert_eq!(f.size(), 9);
        // brute-force multiplicative orders
        let gen = (1..9u32).find(|&g| {
            let mut x = g;
            let mut k = 1;
            while x != 1 {
                x = f.mul_slow(x, g);
                k += 1;
            }
            k == 8
        });
        assert!(gen.is_some());
    }

    #[test]
    fn errors() {
        assert_eq!(Field::new(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert!(matches!(
            Field::new(2, 21),
            Err(FieldError::DegreeTooLarge { .. })
        ));
        assert_eq!(PrimePower::from_value(6).unwrap_err(), FieldError::NotPrimePower(6));
        let q = PrimePower::from_value(9).unwrap();
        assert_eq!((q.p(), q.t()), (3, 2));
        let f = Field::new(3, 1).unwrap();
        assert_eq!(f.conjugate(1), Err(FieldError::NotQuadraticExtension));
    }

    #[test]
    fn gf4_conjugation_and_norm() {
        let q = PrimePower::new(2, 1).unwrap();
        let f = Field::quadratic_extension(q).unwrap();
        assert_eq!(f.conjugate(0).unwrap(), 0);
        assert_eq!(f.conjugate(1).unwrap(), 1);
        assert_eq!(f.conjugate(2).unwrap(), 3);
        for a in f.elements() {
            assert_eq!(f.conjugate(f.conjugate(a).unwrap()).unwrap(), a);
        }
        assert_eq!(f.field_norm(0).unwrap(), 0);
        assert_eq!(f.field_norm(1).unwrap(), 1);
        assert_eq!(f.field_norm(2).unwrap(), 1);
        assert_eq!(f.subfield_elements(), &[0, 1]);
    }

    fn check_axioms(f: &Field) {
        let els: Vec<_> = f.elements().collect();
        for &a in &els {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for &b in &els {
                assert_eq!(f.mul(a, b), f.mul_slow(a, b));
                assert_eq!(f.add(a, b), f.add(b, a));
                for &c in els.iter().step_by(1 + els.len() / 9) {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn axioms_small_fields() {
        for (p, t) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1), (2, 4), (3, 3), (3, 4)] {
            check_axioms(&Field::new(p, t).unwrap());
        }
    }

    #[test]
    fn conjugation_is_automorphism() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let q = PrimePower::from_value(q).unwrap();
            let f = Field::quadratic_extension(q).unwrap();
            for a in f.elements() {
                let ca = f.conjugate(a).unwrap();
                assert_eq!(f.conjugate(ca).unwrap(), a);
                let n = f.field_norm(a).unwrap();
                assert!(f.subfield_elements().binary_search(&n).is_ok());
                for b in f.elements().step_by(3) {
                    let cb = f.conjugate(b).unwrap();
                    assert_eq!(f.conjugate(f.add(a, b)).unwrap(), f.add(ca, cb));
                    assert_eq!(f.conjugate(f.mul(a, b)).unwrap(), f.mul(ca, cb));
                }
            }
            assert_eq!(f.subfield_elements().len() as u64, q.value());
            for &s in f.subfield_elements() {
                assert_eq!(f.conjugate(s).unwrap(), s);
            }
        }
    }

    #[test]
    fn irreducible_choice_is_smallest() {
        assert_eq!(smallest_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(smallest_irreducible(2, 3), vec![1, 0, 1, 1]);
    }
}
