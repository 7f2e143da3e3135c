//! Strongly regular parameters, spectra, group orders and nilpotence.
//!
//! With `Q` the order of the defining field, `h` the family parameter and
//! `z` the Witt index, every polar graph is strongly regular with
//!
//! ```text
//! v = (Q^{z-1+h} + 1) [z]_Q
//! k = Q [z-1]_Q (Q^{z-2+h} + 1)
//! λ = (Q - 1) + Q^2 (Q^{z-3+h} + 1) [z-2]_Q
//! μ = k / Q
//! ```
//!
//! Half-integral powers of `Q` only occur for the Hermitian families, where
//! `Q^{1/2} = q`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{factor, valuation};
use crate::ffield::PrimePower;
use crate::par::{self, Execution};
use crate::polar::{PolarFamily, PolarGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SrgError {
    #[error("m = {m} is below the minimum {min} for family {family}")]
    MTooSmall { family: PolarFamily, m: u32, min: u32 },
    #[error("SRG identity fails at entry ({0}, {1})")]
    IdentityViolated(usize, usize),
    #[error("group order is not integral")]
    NonIntegralOrder,
    #[error("nilpotence table disagrees with the eigenvalues for {family}, l={l}, q={q}, m={m}")]
    TableMismatch { family: PolarFamily, l: u64, q: u64, m: u32 },
    #[error("instance too large: {0} does not fit in 64 bits")]
    TooLarge(String),
}

/// A polar-graph instance `(family, q, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instance {
    pub family: PolarFamily,
    pub q: PrimePower,
    pub m: u32,
}

impl Instance {
    pub fn new(family: PolarFamily, q: PrimePower, m: u32) -> Result<Self, SrgError> {
        if m < family.min_m() {
            return Err(SrgError::MTooSmall { family, m, min: family.min_m() });
        }
        Ok(Instance { family, q, m })
    }

    pub fn z(&self) -> u32 {
        self.family.witt_index(self.m)
    }

    pub fn tilde_q(&self) -> u64 {
        self.family.tilde_q(self.q.value())
    }

    /// `Q^{e2/2}` for a doubled exponent `e2 >= 0`.
    pub fn qpow_half(&self, e2: i64) -> BigInt {
        assert!(e2 >= 0, "negative exponent");
        if self.family.is_hermitian() {
            BigInt::from(self.q.value()).pow(e2 as u32)
        } else {
            assert!(e2 % 2 == 0, "half-integral power of a non-square field order");
            BigInt::from(self.q.value()).pow((e2 / 2) as u32)
        }
    }

    /// `Q^{e + h}` for an integer shift `e`, with `e + h >= 0`.
    pub fn qpow_h(&self, e: i64) -> BigInt {
        self.qpow_half(2 * e + self.family.two_h() as i64)
    }

    /// `[d]_Q`.
    pub fn gauss(&self, d: u32) -> BigInt {
        let qt = BigInt::from(self.tilde_q());
        crate::arith::gauss_one(d, &qt)
    }
}

impl std::fmt::Display for Instance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}({},{})", self.family.tag(), self.q, self.m)
    }
}

/// `(v, k, λ, μ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SrgParams {
    pub v: BigInt,
    pub k: BigInt,
    pub lambda: BigInt,
    pub mu: BigInt,
}

impl SrgParams {
    pub fn is_feasible(&self) -> bool {
        &self.k * (&self.k - &self.lambda - 1u32) == (&self.v - &self.k - 1u32) * &self.mu
    }

    pub fn v_usize(&self) -> Option<usize> {
        self.v.to_usize()
    }
}

/// Eigenvalues and multiplicities of `A` (`k, r, s`) and of `L = kI - A`
/// (`0, t, u`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Spectrum {
    pub k: BigInt,
    pub r: BigInt,
    pub s: BigInt,
    pub t: BigInt,
    pub u: BigInt,
    pub f: BigInt,
    pub g: BigInt,
}

pub fn srg_params(inst: &Instance) -> SrgParams {
    let z = inst.z() as i64;
    let qt = BigInt::from(inst.tilde_q());
    let v = (inst.qpow_h(z - 1) + 1u32) * inst.gauss(z as u32);
    let k = &qt * inst.gauss(z as u32 - 1) * (inst.qpow_h(z - 2) + 1u32);
    let lambda = if z >= 3 {
        (&qt - 1u32) + &qt * &qt * (inst.qpow_h(z - 3) + 1u32) * inst.gauss(z as u32 - 2)
    } else {
        &qt - 1u32
    };
    let mu = &k / &qt;
    SrgParams { v, k, lambda, mu }
}

pub fn spectrum(inst: &Instance) -> Spectrum {
    let z = inst.z() as i64;
    let two_h = inst.family.two_h() as i64;
    let qt = BigInt::from(inst.tilde_q());
    let params = srg_params(inst);
    let r = qt.pow(z as u32 - 1) - 1u32;
    let s = -(inst.qpow_h(z - 2) + 1u32);
    let t = &params.k - &r;
    let u = &params.k - &s;
    // common denominator (Q - 1)(Q^h + Q)
    let den = (&qt - 1u32) * (inst.qpow_half(two_h) + &qt);
    let f_num = inst.qpow_half(two_h + 2) * (inst.qpow_h(z - 2) + 1u32) * (qt.pow(z as u32) - 1u32);
    let g_num = &qt * &qt * (inst.qpow_h(z - 1) + 1u32) * (qt.pow(z as u32 - 1) - 1u32);
    debug_assert!((&f_num % &den).is_zero() && (&g_num % &den).is_zero());
    let f = f_num / &den;
    let g = g_num / &den;
    Spectrum { k: params.k, r, s, t, u, f, g }
}

impl Spectrum {
    /// `1 + f + g = v` and `tr A = k + f r + g s = 0`.
    pub fn is_consistent(&self, params: &SrgParams) -> bool {
        let trace = &self.k + &self.f * &self.r + &self.g * &self.s;
        1u32 + &self.f + &self.g == params.v
            && trace.is_zero()
            && &self.r * &self.s == &params.mu - &params.k
            && &self.r + &self.s == &params.lambda - &params.mu
    }
}

/// Prime factorization with exponents, for group orders.
pub type Factored = BTreeMap<u64, u64>;

fn factor_signed(n: &BigInt) -> Result<Factored, SrgError> {
    let n = n.abs().to_u64().ok_or_else(|| SrgError::TooLarge(n.to_string()))?;
    Ok(factor(n).into_iter().map(|(p, e)| (p, e as u64)).collect())
}

fn add_scaled(acc: &mut Factored, f: &Factored, times: u64) -> Result<(), SrgError> {
    for (&p, &e) in f {
        let slot = acc.entry(p).or_insert(0);
        *slot = e.checked_mul(times).and_then(|x| x.checked_add(*slot)).ok_or_else(|| {
            SrgError::TooLarge(format!("exponent of {p} is {e} * {times}"))
        })?;
    }
    Ok(())
}

/// `|S| = k r^f |s|^g` and `|K| = t^f u^g / v`, factored.
pub fn group_orders(spec: &Spectrum, params: &SrgParams) -> Result<(Factored, Factored), SrgError> {
    let f = spec.f.to_u64().ok_or_else(|| SrgError::TooLarge(spec.f.to_string()))?;
    let g = spec.g.to_u64().ok_or_else(|| SrgError::TooLarge(spec.g.to_string()))?;
    let mut smith = Factored::new();
    add_scaled(&mut smith, &factor_signed(&spec.k)?, 1)?;
    add_scaled(&mut smith, &factor_signed(&spec.r)?, f)?;
    add_scaled(&mut smith, &factor_signed(&spec.s)?, g)?;
    let mut crit = Factored::new();
    add_scaled(&mut crit, &factor_signed(&spec.t)?, f)?;
    add_scaled(&mut crit, &factor_signed(&spec.u)?, g)?;
    for (p, e) in factor_signed(&params.v)? {
        let slot = crit.get_mut(&p).ok_or(SrgError::NonIntegralOrder)?;
        if *slot < e {
            return Err(SrgError::NonIntegralOrder);
        }
        *slot -= e;
    }
    smith.retain(|_, e| *e > 0);
    crit.retain(|_, e| *e > 0);
    Ok((smith, crit))
}

/// Expands a factorization into an integer.
pub fn expand(f: &Factored) -> BigInt {
    f.iter().fold(BigInt::from(1), |acc, (&p, &e)| acc * BigInt::from(p).pow(e as u32))
}

/// Which matrix a nilpotence question is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    A,
    L,
}

/// `X mod l` is nilpotent iff `l` divides every eigenvalue of `X`
/// (the Laplacian's zero eigenvalue always qualifies).
pub fn is_nilpotent_by_eigenvalues(spec: &Spectrum, l: u64, which: Which) -> bool {
    let lb = BigInt::from(l);
    let divides = |x: &BigInt| x.mod_floor(&lb).is_zero();
    match which {
        Which::A => divides(&spec.k) && divides(&spec.r) && divides(&spec.s),
        Which::L => divides(&spec.t) && divides(&spec.u),
    }
}

/// Rule-based classification by family and the arithmetic of `l`, `q`, `m`.
pub fn table_nilpotence(inst: &Instance, l: u64, which: Which) -> bool {
    let q = inst.q.value();
    if l == 2 && q.is_multiple_of(2) {
        return false;
    }
    let divides_q1 = (q + 1).is_multiple_of(l);
    let m_even = inst.m.is_multiple_of(2);
    match inst.family {
        PolarFamily::S | PolarFamily::O => l == 2,
        PolarFamily::OMinus | PolarFamily::OPlus => {
            if l == 2 {
                return true;
            }
            if !divides_q1 {
                return false;
            }
            let full = if inst.family == PolarFamily::OMinus { m_even } else { !m_even };
            full || which == Which::L
        }
        PolarFamily::UE | PolarFamily::UO => divides_q1,
    }
}

/// Nilpotence by eigenvalues, cross-checked against the rule table.
pub fn is_nilpotent(inst: &Instance, l: u64, which: Which) -> Result<bool, SrgError> {
    let by_eig = is_nilpotent_by_eigenvalues(&spectrum(inst), l, which);
    if by_eig != table_nilpotence(inst, l, which) {
        return Err(SrgError::TableMismatch { family: inst.family, l, q: inst.q.value(), m: inst.m });
    }
    Ok(by_eig)
}

/// Parameters counted on a constructed graph, if it is strongly regular.
pub fn measured_params(graph: &PolarGraph) -> Option<SrgParams> {
    let n = graph.vertex_count();
    let rows = bit_rows(graph);
    let degrees = graph.degrees();
    let k = degrees[0];
    if degrees.iter().any(|&d| d != k) {
        return None;
    }
    let mut lambdas = BTreeSet::new();
    let mut mus = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            let c = common(&rows[i], &rows[j]);
            if graph.adjacent(i, j) {
                lambdas.insert(c);
            } else {
                mus.insert(c);
            }
        }
    }
    if lambdas.len() > 1 || mus.len() > 1 {
        return None;
    }
    Some(SrgParams {
        v: n.into(),
        k: k.into(),
        lambda: lambdas.into_iter().next().unwrap_or(0).into(),
        mu: mus.into_iter().next().unwrap_or(0).into(),
    })
}

fn bit_rows(graph: &PolarGraph) -> Vec<Vec<u64>> {
    let n = graph.vertex_count();
    let words = n.div_ceil(64);
    (0..n)
        .map(|i| {
            let mut w = vec![0u64; words];
            for (j, &a) in graph.adjacency_row(i).iter().enumerate() {
                if a != 0 {
                    w[j / 64] |= 1 << (j % 64);
                }
            }
            w
        })
        .collect()
}

fn common(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

/// Checks `A^2 = kI + λA + μ(J - I - A)` entrywise.
pub fn verify_srg_identity(graph: &PolarGraph, params: &SrgParams) -> Result<(), SrgError> {
    verify_srg_identity_with(graph, params, Execution::default())
}

pub fn verify_srg_identity_with(graph: &PolarGraph, params: &SrgParams, exec: Execution) -> Result<(), SrgError> {
    let n = graph.vertex_count();
    let (k, lambda, mu) = match (params.k.to_usize(), params.lambda.to_usize(), params.mu.to_usize()) {
        (Some(k), Some(l), Some(m)) => (k, l, m),
        _ => return Err(SrgError::IdentityViolated(0, 0)),
    };
    if params.v.to_usize() != Some(n) {
        return Err(SrgError::IdentityViolated(0, 0));
    }
    let rows = bit_rows(graph);
    let bad = par::map_range(exec, n, |i| {
        (0..n).find_map(|j| {
            let a2 = common(&rows[i], &rows[j]);
            let want = if i == j {
                k
            } else if graph.adjacent(i, j) {
                lambda
            } else {
                mu
            };
            (a2 != want).then_some((i, j))
        })
    });
    match bad.into_iter().flatten().next() {
        Some((i, j)) => Err(SrgError::IdentityViolated(i, j)),
        None => Ok(()),
    }
}

/// Primes dividing `Q r |s|` (Smith group) or `t u` (critical group).
pub fn relevant_primes(inst: &Instance, critical: bool) -> Result<Vec<u64>, SrgError> {
    let spec = spectrum(inst);
    let mut primes = BTreeSet::new();
    let terms: Vec<BigInt> = if critical {
        vec![spec.t.clone(), spec.u.clone()]
    } else {
        vec![BigInt::from(inst.tilde_q()), spec.r.clone(), spec.s.clone()]
    };
    for x in terms {
        primes.extend(factor_signed(&x)?.into_keys());
    }
    Ok(primes.into_iter().collect())
}

/// `v_l(|S|)` or `v_l(|K|)` without forming the order.
pub fn order_valuation(spec: &Spectrum, params: &SrgParams, l: u64, critical: bool) -> BigInt {
    let v = |x: &BigInt| BigInt::from(valuation(x, l).expect("eigenvalues are nonzero"));
    if critical {
        v(&spec.t) * &spec.f + v(&spec.u) * &spec.g - v(&params.v)
    } else {
        v(&spec.k) + v(&spec.r) * &spec.f + v(&spec.s) * &spec.g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(f: PolarFamily, q: u64, m: u32) -> Instance {
        Instance::new(f, PrimePower::from_value(q).unwrap(), m).unwrap()
    }

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn params_examples() {
        let p = srg_params(&inst(PolarFamily::S, 2, 2));
        assert_eq!((p.v, p.k, p.lambda, p.mu), (b(15), b(6), b(1), b(3)));
        let p = srg_params(&inst(PolarFamily::OMinus, 2, 3));
        assert_eq!((p.v, p.k, p.lambda, p.mu), (b(27), b(10), b(1), b(5)));
        let p = srg_params(&inst(PolarFamily::UE, 2, 2));
        assert_eq!((p.v, p.k, p.lambda, p.mu), (b(45), b(12), b(3), b(3)));
    }

    #[test]
    fn spectrum_examples() {
        let s = spectrum(&inst(PolarFamily::S, 2, 2));
        assert_eq!((s.r, s.s, s.k, s.f, s.g, s.t, s.u), (b(1), b(-3), b(6), b(9), b(5), b(5), b(9)));
        let s = spectrum(&inst(PolarFamily::UE, 2, 2));
        assert_eq!((s.r, s.s, s.f, s.g), (b(3), b(-3), b(20), b(24)));
        let s = spectrum(&inst(PolarFamily::UO, 2, 2));
        assert_eq!((s.r, s.s, s.f, s.g), (b(3), b(-9), b(120), b(44)));
    }

    #[test]
    fn consistency_over_many_instances() {
        for fam in PolarFamily::ALL {
            for q in [2u64, 3, 4, 5, 7, 8, 9, 11] {
                for m in fam.min_m()..7 {
                    let i = inst(fam, q, m);
                    let p = srg_params(&i);
                    let s = spectrum(&i);
                    assert!(p.is_feasible(), "{i}");
                    assert!(s.is_consistent(&p), "{i}");
                    assert_eq!(&p.mu * BigInt::from(i.tilde_q()), p.k);
                    assert!((&s.t % i.gauss(i.z() - 1)).is_zero());
                }
            }
        }
    }

    #[test]
    fn orders() {
        let i = inst(PolarFamily::S, 2, 2);
        let (s, k) = group_orders(&spectrum(&i), &srg_params(&i)).unwrap();
        assert_eq!(expand(&s), b(1458));
        assert_eq!(k, Factored::from([(3, 9), (5, 8)]));
        let i = inst(PolarFamily::OMinus, 2, 3);
        let (s, k) = group_orders(&spectrum(&i), &srg_params(&i)).unwrap();
        assert_eq!(s, Factored::from([(2, 1), (5, 7)]));
        assert_eq!(k, Factored::from([(3, 43), (5, 6)]));
    }

    #[test]
    fn nilpotence_examples() {
        assert!(is_nilpotent(&inst(PolarFamily::S, 3, 2), 2, Which::A).unwrap());
        let om = inst(PolarFamily::OMinus, 2, 3);
        assert!(!is_nilpotent(&om, 3, Which::A).unwrap());
        assert!(is_nilpotent(&om, 3, Which::L).unwrap());
        for fam in PolarFamily::ALL {
            assert!(!is_nilpotent(&inst(fam, 4, 3), 2, Which::A).unwrap());
        }
    }

    #[test]
    fn primes() {
        assert_eq!(relevant_primes(&inst(PolarFamily::S, 2, 2), false).unwrap(), vec![2, 3]);
        assert_eq!(relevant_primes(&inst(PolarFamily::S, 2, 2), true).unwrap(), vec![3, 5]);
        assert_eq!(relevant_primes(&inst(PolarFamily::UE, 2, 2), false).unwrap(), vec![2, 3]);
    }
}
