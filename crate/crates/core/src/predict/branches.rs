//! Case selection and the term lists of each case.
//!
//! Valuation names follow the usual conventions of the analysis: for most
//! families `w = v(q-1)`, `a = v([m-1]_q)`, `b = v([m]_q)`, `c = v(q^m+1)` and
//! `d = v(q^{m-1}+1)`, with the shifts each family needs. Trace strings name
//! the family context and the subcase.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{PredictError, Target, Typo};
use crate::arith::{gauss_one, valuation};
use crate::polar::PolarFamily;
use crate::srg::{Instance, Spectrum};

type Terms = Vec<(i64, i128)>;
type Branch = Result<(String, Terms), PredictError>;

/// The constant `x` of the `O` and `UE` cases: `(q^{2m} - q^2)/(q^2 - 1)` for
/// `O`, and `g - (q^{2m}-1)(q^{2m-1}-q)/(q+1)^2` for `UE`.
pub fn dimension_constant(inst: &Instance) -> Option<BigInt> {
    let q = BigInt::from(inst.q.value());
    let m = inst.m;
    let q2 = &q * &q;
    match inst.family {
        PolarFamily::O => Some((q.pow(2 * m) - &q2) / (&q2 - 1u32)),
        PolarFamily::UE => {
            let y = (q.pow(2 * m) - 1u32) * (q.pow(2 * m - 1) - &q) / ((&q + 1u32) * (&q + 1u32));
            Some(crate::srg::spectrum(inst).g - y)
        }
        _ => None,
    }
}

pub(super) struct Ctx<'a> {
    inst: &'a Instance,
    spec: &'a Spectrum,
    l: u64,
    q: BigInt,
    m: i64,
    f: i128,
    g: i128,
    typos: &'a [Typo],
}

fn i128_of(x: &BigInt) -> i128 {
    x.to_i128().expect("multiplicity fits in 128 bits")
}

impl<'a> Ctx<'a> {
    pub(super) fn new(inst: &'a Instance, l: u64, spec: &'a Spectrum, typos: &'a [Typo]) -> Self {
        Ctx {
            inst,
            spec,
            l,
            q: BigInt::from(inst.q.value()),
            m: inst.m as i64,
            f: i128_of(&spec.f),
            g: i128_of(&spec.g),
            typos,
        }
    }

    fn has(&self, t: Typo) -> bool {
        self.typos.contains(&t)
    }

    fn val(&self, n: &BigInt) -> i64 {
        valuation(n, self.l).expect("valuation of a nonzero quantity") as i64
    }

    fn pw(&self, e: i64) -> BigInt {
        self.q.pow(e as u32)
    }

    /// `v(q^e + 1)`.
    fn vp(&self, e: i64) -> i64 {
        self.val(&(self.pw(e) + 1u32))
    }

    /// `v([n]_q)`.
    fn vg(&self, n: i64) -> i64 {
        self.val(&gauss_one(n as u32, &self.q))
    }

    /// `v([n]_{q^2})`.
    fn vg2(&self, n: i64) -> i64 {
        self.val(&gauss_one(n as u32, &(&self.q * &self.q)))
    }

    fn no_branch(&self, detail: &str) -> PredictError {
        PredictError::NoBranch { instance: self.inst.to_string(), ell: self.l, detail: detail.to_string() }
    }

    pub(super) fn select(&self, target: Target, nilpotent: bool) -> Branch {
        if self.l == self.inst.q.p() {
            if target.is_critical() {
                return Err(self.no_branch("the characteristic never divides |K|"));
            }
            let eps = self.val(&BigInt::from(self.inst.tilde_q()));
            return Ok(("char".into(), vec![(0, self.f + self.g), (eps, 1)]));
        }
        if !nilpotent {
            return match target {
                Target::Smith => self.generic_smith(),
                Target::Critical => self.generic_critical(),
            };
        }
        let crit = target.is_critical();
        match self.inst.family {
            PolarFamily::S => self.symplectic(crit),
            PolarFamily::O => self.parabolic(crit),
            PolarFamily::OMinus => self.elliptic(crit),
            PolarFamily::OPlus => self.hyperbolic(crit),
            PolarFamily::UE => self.unitary_even(crit),
            PolarFamily::UO => self.unitary_odd(crit),
        }
    }

    fn generic_smith(&self) -> Branch {
        let (f, g) = (self.f, self.g);
        let vr = self.val(&self.spec.r);
        let vs = self.val(&self.spec.s);
        let z = self.inst.z();
        if vr > 0 && vs == 0 {
            let a = self.val(&self.inst.gauss(z - 1));
            let w = self.val(&(BigInt::from(self.inst.tilde_q()) - 1u32));
            return Ok(if w == 0 {
                ("generic:case1:w=0".into(), vec![(0, g), (a, f + 1)])
            } else if a == 0 {
                ("generic:case1:a=0".into(), vec![(0, g + 1), (w, f)])
            } else {
                ("generic:case1:aw!=0".into(), vec![(0, g), (a, 1), (a + w, f)])
            });
        }
        if vs > 0 && vr == 0 {
            return Ok(("generic:case2".into(), vec![(0, f), (vs, g + 1)]));
        }
        Err(self.no_branch("l divides neither r nor s alone"))
    }

    fn generic_critical(&self) -> Branch {
        let (f, g) = (self.f, self.g);
        let vt = self.val(&self.spec.t);
        let vu = self.val(&self.spec.u);
        let z = self.inst.z() as i64;
        if vt > 0 && vu == 0 {
            let a = self.val(&self.inst.gauss(z as u32 - 1));
            let c = self.val(&(self.inst.qpow_h(z - 1) + 1u32));
            return Ok(if a == 0 {
                ("generic:case1:a=0".into(), vec![(0, g + 1), (c, f - 1)])
            } else if c == 0 {
                ("generic:case1:c=0".into(), vec![(0, g), (a, f)])
            } else {
                ("generic:case1:ac!=0".into(), vec![(0, g), (a, 1), (a + c, f - 1)])
            });
        }
        if vu > 0 && vt == 0 {
            let b = self.val(&self.inst.gauss(z as u32));
            let d = self.val(&(self.inst.qpow_h(z - 2) + 1u32));
            return Ok(if b == 0 {
                ("generic:case2:b=0".into(), vec![(0, f), (d, g)])
            } else if d == 0 {
                ("generic:case2:d=0".into(), vec![(0, f + 1), (b, g - 1)])
            } else {
                ("generic:case2:bd!=0".into(), vec![(0, f), (d, 1), (d + b, g - 1)])
            });
        }
        Err(self.no_branch("l divides neither t nor u alone"))
    }

    fn symplectic(&self, crit: bool) -> Branch {
        let (f, g, m) = (self.f, self.g, self.m);
        let w = self.val(&(&self.q - 1u32));
        let a = self.vg(m - 1);
        let b = self.vg(m);
        let c = self.vp(m);
        let d = self.vp(m - 1);
        Ok(match (crit, m % 2 == 0) {
            (false, true) => ("sp:meven".into(), vec![(0, g + 1), (w, f - g - 1), (d + w, g + 1)]),
            (false, false) => ("sp:modd".into(), vec![(0, g), (a, 1), (a + w, f - g - 1), (a + w + 1, g + 1)]),
            (true, true) => ("sp:meven".into(), vec![(0, g + 1), (1, f - g - 1), (d + 1, 1), (b + d + 1, g - 1)]),
            (true, false) => ("sp:modd".into(), vec![(0, g), (a, 1), (a + c, f - g - 1), (a + c + 1, g)]),
        })
    }

    fn parabolic(&self, crit: bool) -> Branch {
        let (f, g, m) = (self.f, self.g, self.m);
        let x = i128_of(&dimension_constant(self.inst).expect("parabolic family"));
        let w = self.val(&(&self.q - 1u32));
        let a = self.vg(m - 1);
        let b = self.vg(m);
        let c = self.vp(m);
        let d = self.vp(m - 1);
        Ok(match (crit, m % 2 == 0) {
            (false, true) => ("o:meven".into(), vec![(0, x + 1), (w, f - x - 1), (d, g - x), (d + w, x + 1)]),
            (false, false) if a > 1 => (
                "o:modd:a>1".into(),
                vec![(0, x), (1, g - x), (a, 1), (a + w, f - x - 1), (a + w + 1, x + 1)],
            ),
            (false, false) => ("o:modd:a=1".into(), vec![(0, x), (1, g + 1 - x), (a + w, f - x - 1), (a + w + 1, x + 1)]),
            (true, true) if b > 1 => (
                "o:meven:b>1".into(),
                vec![(0, x + 1), (1, f - x - 1), (d + 1, 1), (d + b, g - x), (d + b + 1, x - 1)],
            ),
            (true, true) => ("o:meven:b=1".into(), vec![(0, x + 1), (1, f - x - 1), (d + 1, g + 1 - x), (d + b + 1, x - 1)]),
            (true, false) if a > 1 => (
                "o:modd:a>1".into(),
                vec![(0, x), (1, g - x), (a, 1), (a + c, f - x - 1), (a + c + 1, x)],
            ),
            (true, false) => ("o:modd:a=1".into(), vec![(0, x), (1, g - x + 1), (a + c, f - x - 1), (a + c + 1, x)]),
        })
    }

    fn elliptic(&self, crit: bool) -> Branch {
        let (f, g, m) = (self.f, self.g, self.m);
        let w = self.val(&(&self.q - 1u32));
        let a = self.vg(m - 2);
        let b = self.vg(m - 1);
        let c = self.vp(m);
        let d = self.vp(m - 1);
        let even = m % 2 == 0;
        if self.l == 2 {
            return Ok(match (crit, even) {
                (false, false) => ("om:modd:ell=2".into(), vec![(0, g + 1), (w, f - g - 1), (w + 1, g + 1)]),
                (false, true) => ("om:meven:ell=2".into(), vec![(0, g), (a, 1), (a + w, f - g - 1), (a + d + w, g + 1)]),
                (true, false) => ("om:modd:ell=2".into(), vec![(0, g + 1), (c, f - g - 1), (c + 1, 1), (b + c + 1, g - 1)]),
                (true, true) => ("om:meven:ell=2".into(), vec![(0, g), (a, 1), (a + 1, f - g - 1), (a + d + 1, g)]),
            });
        }
        if !(&self.q + 1u32).is_multiple_of(&BigInt::from(self.l)) {
            return Err(self.no_branch("odd l nilpotent without l | q+1"));
        }
        match (crit, even) {
            (false, true) => Ok(("om:meven:ell|q+1".into(), vec![(0, g), (a, f - g), (a + d, g + 1)])),
            (true, true) => Ok(("om:meven:ell|q+1".into(), vec![(0, g), (a, f - g), (a + d, g)])),
            (true, false) => Ok(("om:modd:ell|q+1".into(), vec![(0, g + 1), (c, f - g), (b + c, g - 1)])),
            (false, false) => Err(self.no_branch("A is not nilpotent here")),
        }
    }

    fn hyperbolic(&self, crit: bool) -> Branch {
        let (f, g, m) = (self.f, self.g, self.m);
        let w = self.val(&(&self.q - 1u32));
        let even = m % 2 == 0;
        if self.l == 2 {
            if even {
                if !crit {
                    return Ok(("op:meven:ell=2".into(), vec![(0, f), (1, g + 1 - f), (w + 1, f)]));
                }
                let c = self.vp(m - 1);
                let b = self.vg(m);
                return Ok(if b != c {
                    ("op:meven:ell=2:b!=c".into(), vec![(0, f), (c + 1, 1), (b + 1, g - f + 1), (b + c + 1, f - 2)])
                } else {
                    ("op:meven:ell=2:b=c".into(), vec![(0, f), (c + 1, g - f + 2), (2 * c + 1, f - 2)])
                });
            }
            let a = self.vg(m - 1);
            let d = self.vp(m - 2);
            return Ok(match (crit, a == d) {
                (false, false) => ("op:modd:ell=2:a!=d".into(), vec![(0, f - 1), (d, g - f + 1), (a, 1), (a + w + d, f)]),
                (false, true) => ("op:modd:ell=2:a=d".into(), vec![(0, f - 1), (a, g + 2 - f), (a + d + w, f)]),
                (true, false) => ("op:modd:ell=2:a!=d".into(), vec![(0, f - 1), (a, 1), (d, g + 1 - f), (a + d + 1, f - 1)]),
                (true, true) => ("op:modd:ell=2:a=d".into(), vec![(0, f - 1), (a, g + 2 - f), (2 * a + 1, f - 1)]),
            });
        }
        if !(&self.q + 1u32).is_multiple_of(&BigInt::from(self.l)) {
            return Err(self.no_branch("odd l nilpotent without l | q+1"));
        }
        if even {
            if !crit {
                return Err(self.no_branch("A is not nilpotent here"));
            }
            let c = self.vp(m - 1);
            let b = self.vg(m);
            return Ok(if b != c {
                ("op:meven:ell|q+1:b!=c".into(), vec![(0, f), (c, 1), (b, g - f + 1), (b + c, f - 2)])
            } else {
                ("op:meven:ell|q+1:b=c".into(), vec![(0, f), (c, g - f + 2), (2 * c, f - 2)])
            });
        }
        let a = self.vg(m - 1);
        let d = self.vp(m - 2);
        // the tabulated Smith entry sits at a + v([m]_q)
        let top = if !crit && self.has(Typo::TableOpB) { a + self.vg(m) } else { a + d };
        Ok(match (crit, a == d) {
            (false, false) => ("op:modd:ell|q+1:a!=d".into(), vec![(0, f - 1), (a, 1), (d, g - f + 1), (top, f)]),
            (false, true) => ("op:modd:ell|q+1:a=d".into(), vec![(0, f - 1), (a, g - f + 2), (top, f)]),
            (true, false) => ("op:modd:ell|q+1:a!=d".into(), vec![(0, f - 1), (a, 1), (d, g - f + 1), (a + d, f - 1)]),
            (true, true) => ("op:modd:ell|q+1:a=d".into(), vec![(0, f - 1), (a, g - f + 2), (2 * a, f - 1)]),
        })
    }

    fn unitary_even(&self, crit: bool) -> Branch {
        let (f, m) = (self.f, self.m);
        let q = &self.q;
        let q2 = q * q;
        let g = if self.has(Typo::TableUeG) {
            i128_of(&(q.pow(3) * gauss_one(m as u32 - 1, &q2) * (self.pw(2 * m - 1) + 1u32) / (q - 1u32)))
        } else {
            self.g
        };
        let x = if self.has(Typo::TableUeX) {
            i128_of(&((self.pw(2 * m) - 1u32) * (self.pw(2 * m - 1) + 1u32) / ((&q2 - 1u32) * (q - 1u32))))
        } else {
            i128_of(&dimension_constant(self.inst).expect("unitary family"))
        };
        let l = self.l as i64;
        let (lm, lm1) = (m % l == 0, (m - 1) % l == 0);
        let w = self.val(&(&q2 - 1u32));
        let a = self.vg2(m - 1);
        let b = self.vg2(m);
        let c = self.vp(2 * m - 1);
        let d = self.vp(2 * m - 3);
        if !crit {
            if lm1 {
                return Ok(if a != d {
                    (
                        "ue:ell|m-1:a!=d".into(),
                        vec![(0, x), (a, 1), (d, g - x), (w + a, f - x - 1), (w + a + d, x + 1)],
                    )
                } else {
                    ("ue:ell|m-1:a=d".into(), vec![(0, x), (a, g + 1 - x), (w + a, f - x - 1), (w + a + d, x + 1)])
                });
            }
            let ctx = if lm { "ue:ell|m" } else { "ue:ell!|m(m-1)" };
            return Ok(if w == d {
                (format!("{ctx}:w=d"), vec![(0, x + 1), (w, f + g - 2 * x - 1), (2 * w, x + 1)])
            } else {
                (format!("{ctx}:w!=d"), vec![(0, x + 1), (w, f - x - 1), (d, g - x), (w + d, x + 1)])
            });
        }
        if lm1 {
            return Ok(if a != c {
                (
                    "ue:ell|m-1:a!=c".into(),
                    vec![(0, x), (a, 1), (c, g - x), (a + d, f - x - 1), (a + c + d, x)],
                )
            } else {
                ("ue:ell|m-1:a=c".into(), vec![(0, x), (a, g + 1 - x), (a + d, f - x - 1), (a + c + d, x)])
            });
        }
        if lm {
            // v(u) = b + d unless l = 3, where l | 2m-3 raises v(s)
            let d = self.vp(1);
            let vu = self.val(&self.spec.u);
            if b != d && vu != b + d {
                return Err(self.no_branch("l | 2m-3 with b != d lies outside the case analysis"));
            }
            return Ok(if b != d {
                (
                    "ue:ell|m:b!=d".into(),
                    vec![(0, x + 1), (d, f - x - 1), (b + d, g - x), (2 * d, 1), (b + 2 * d, x - 1)],
                )
            } else {
                ("ue:ell|m:b=d".into(), vec![(0, x + 1), (b, f - x - 1), (vu, g - x + 1), (vu + b, x - 1)])
            });
        }
        Ok(if c != d {
            ("ue:ell!|m(m-1):c!=d".into(), vec![(0, x + 1), (c, f - x - 1), (d, g - x), (c + d, x)])
        } else {
            ("ue:ell!|m(m-1):c=d".into(), vec![(0, x + 1), (c, f + g - 2 * x - 1), (2 * c, x)])
        })
    }

    fn unitary_odd(&self, crit: bool) -> Branch {
        let (f, m) = (self.f, self.m);
        let q = &self.q;
        let q2 = q * q;
        let g = if self.has(Typo::TableUoG) {
            i128_of(&(&q2 * gauss_one(m as u32 - 1, &q2) * (self.pw(2 * m - 2) - 1u32) / (q - 1u32)))
        } else {
            self.g
        };
        let lm = m % self.l as i64 == 0;
        let w = self.val(&(&q2 - 1u32));
        let a = self.vg2(m - 1);
        let b = self.vg2(m);
        if !crit {
            let d = if self.has(Typo::TableUoD) { self.vp(2 * m + 1) } else { self.vp(2 * m - 1) };
            return Ok(if !lm && a >= 1 {
                ("uo:ell!|m:a>0".into(), vec![(0, g), (a, 1), (w + a, f - g - 1), (w + a + d, g + 1)])
            } else {
                let ctx = if lm { "uo:ell|m" } else { "uo:ell!|m:a=0" };
                (ctx.into(), vec![(0, g + 1), (w, f - g - 1), (w + d, g + 1)])
            });
        }
        let c = self.vp(2 * m - 1);
        let d = self.vp(2 * m + 1);
        Ok(if lm {
            ("uo:ell|m".into(), vec![(0, g + 1), (d, f - g - 1), (2 * d, 1), (b + 2 * d, g - 1)])
        } else if a >= 1 {
            ("uo:ell!|m:a>0".into(), vec![(0, g), (a, 1), (d + a, f - g - 1), (d + a + c, g)])
        } else {
            ("uo:ell!|m:a=0".into(), vec![(0, g + 1), (d, f - g - 1), (d + c, g)])
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::PrimePower;
    use crate::srg::spectrum;

    #[test]
    fn unitary_x_at_the_smallest_case() {
        let inst = Instance::new(PolarFamily::UE, PrimePower::from_value(2).unwrap(), 2).unwrap();
        let spec = spectrum(&inst);
        let ctx = Ctx::new(&inst, 3, &spec, &[]);
        let (_, terms) = ctx.unitary_even(false).unwrap();
        // x = 14
        assert_eq!(terms, vec![(0, 15), (1, 15), (2, 15)]);
    }
}
