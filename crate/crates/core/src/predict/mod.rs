//! Closed-form elementary divisors of the Smith group `S = coker A` and the
//! critical group `K = coker L` of a polar graph.
//!
//! For each prime `l` dividing the group order one case of the analysis
//! applies: the characteristic (`l = p`), one of the two non-nilpotent
//! eigenvalue cases, or a family-specific nilpotent case. Each case is a short
//! list of `(exponent, multiplicity)` terms in `f`, `g` and a handful of
//! `l`-adic valuations. The driver checks every list against the counts and
//! orders it must reproduce before handing it out.

mod branches;

pub use branches::dimension_constant;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polar::PolarFamily;
use crate::snf::{DivisorProfile, GroupDecomposition};
use crate::srg::{self, Instance, SrgError, Which};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Smith,
    Critical,
}

impl Target {
    pub const BOTH: [Target; 2] = [Target::Smith, Target::Critical];

    pub fn is_critical(self) -> bool {
        self == Target::Critical
    }

    pub fn which(self) -> Which {
        match self {
            Target::Smith => Which::A,
            Target::Critical => Which::L,
        }
    }

    fn letter(self) -> char {
        match self {
            Target::Smith => 'S',
            Target::Critical => 'K',
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Smith => "smith",
            Target::Critical => "critical",
        })
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "smith" | "s" => Ok(Target::Smith),
            "critical" | "k" => Ok(Target::Critical),
            _ => Err(format!("unknown target '{s}'")),
        }
    }
}

/// Known misprints in the tabulated forms of the results. Each one can be
/// switched back on to check that verification notices it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Typo {
    /// Unitary, even dimension: `g` with denominator `q - 1`.
    #[serde(rename = "tableue-g")]
    TableUeG,
    /// Unitary, even dimension: the tabulated `x`.
    #[serde(rename = "tableue-x")]
    TableUeX,
    /// Unitary, odd dimension: the tabulated `g`.
    #[serde(rename = "tableuo-g")]
    TableUoG,
    /// Unitary, odd dimension: Smith `d` taken from `q^{2m+1} + 1`.
    #[serde(rename = "tableuo-d")]
    TableUoD,
    /// `O+`, odd `l`, `m` odd: a term at `a + b` with `b = v([m]_q)`.
    #[serde(rename = "tableop-b")]
    TableOpB,
}

impl Typo {
    pub const ALL: [Typo; 5] = [Typo::TableUeG, Typo::TableUeX, Typo::TableUoG, Typo::TableUoD, Typo::TableOpB];

    pub fn tag(self) -> &'static str {
        match self {
            Typo::TableUeG => "tableue-g",
            Typo::TableUeX => "tableue-x",
            Typo::TableUoG => "tableuo-g",
            Typo::TableUoD => "tableuo-d",
            Typo::TableOpB => "tableop-b",
        }
    }

    /// The smallest instance on which the misprint changes a prediction.
    pub fn witness(self) -> (PolarFamily, u64, u32) {
        match self {
            Typo::TableUeG | Typo::TableUeX => (PolarFamily::UE, 2, 2),
            Typo::TableUoG | Typo::TableUoD => (PolarFamily::UO, 2, 2),
            Typo::TableOpB => (PolarFamily::OPlus, 2, 3),
        }
    }
}

impl fmt::Display for Typo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Typo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Typo::ALL
            .into_iter()
            .find(|t| t.tag() == s)
            .ok_or_else(|| format!("unknown typo hook '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredictError {
    #[error(transparent)]
    Srg(#[from] SrgError),
    #[error("no case covers l = {ell} for {instance}: {detail}")]
    NoBranch { instance: String, ell: u64, detail: String },
    #[error("prediction for l = {ell} ({trace}) fails its checks: {detail}")]
    Guard { ell: u64, trace: String, detail: String },
    #[error("instance too large: {0}")]
    TooLarge(String),
}

/// The prediction at one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePrediction {
    pub ell: u64,
    /// Which case produced the terms, e.g. `S:generic:case2` or `K:om:modd:ell|q+1`.
    pub trace: String,
    pub profile: DivisorProfile,
    /// Failed checks; empty for a sound prediction.
    pub issues: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub family: PolarFamily,
    pub q: u64,
    pub m: u32,
    pub target: Target,
    pub v: u64,
    pub k: u64,
    pub primes: Vec<PrimePrediction>,
}

impl Prediction {
    pub fn prime(&self, ell: u64) -> Option<&PrimePrediction> {
        self.primes.iter().find(|p| p.ell == ell)
    }

    pub fn profile(&self, ell: u64) -> Option<&DivisorProfile> {
        self.prime(ell).map(|p| &p.profile)
    }

    pub fn branch(&self, ell: u64) -> Option<&str> {
        self.prime(ell).map(|p| p.trace.as_str())
    }

    pub fn profiles(&self) -> impl Iterator<Item = &DivisorProfile> {
        self.primes.iter().map(|p| &p.profile)
    }

    pub fn free_rank(&self) -> u64 {
        u64::from(self.target.is_critical())
    }

    pub fn group(&self) -> GroupDecomposition {
        GroupDecomposition::from_profiles(self.free_rank(), self.profiles())
    }

    pub fn is_sound(&self) -> bool {
        self.primes.iter().all(|p| p.issues.is_empty())
    }
}

/// `S` predicted prime by prime.
pub fn predict_smith(inst: &Instance) -> Result<Prediction, PredictError> {
    predict(inst, Target::Smith)
}

/// `K` predicted prime by prime; the free part `Z` is implicit.
pub fn predict_critical(inst: &Instance) -> Result<Prediction, PredictError> {
    predict(inst, Target::Critical)
}

pub fn predict(inst: &Instance, target: Target) -> Result<Prediction, PredictError> {
    let pred = predict_with(inst, target, &[])?;
    if let Some(bad) = pred.primes.iter().find(|p| !p.issues.is_empty()) {
        return Err(PredictError::Guard { ell: bad.ell, trace: bad.trace.clone(), detail: bad.issues.join("; ") });
    }
    Ok(pred)
}

/// Like [`predict`] with the given misprints enabled. Failed checks are
/// recorded per prime instead of aborting, so a report can show them.
pub fn predict_with(inst: &Instance, target: Target, typos: &[Typo]) -> Result<Prediction, PredictError> {
    let params = srg::srg_params(inst);
    let spec = srg::spectrum(inst);
    let big = |x: &num_bigint::BigInt| x.to_string();
    let v = params.v.to_u64().ok_or_else(|| PredictError::TooLarge(big(&params.v)))?;
    let k = params.k.to_u64().ok_or_else(|| PredictError::TooLarge(big(&params.k)))?;
    let primes = srg::relevant_primes(inst, target.is_critical())?;
    let mut out = Vec::with_capacity(primes.len());
    for ell in primes {
        let nilpotent = srg::is_nilpotent(inst, ell, target.which())?;
        let ctx = branches::Ctx::new(inst, ell, &spec, typos);
        let (trace, terms) = ctx.select(target, nilpotent)?;
        let trace = format!("{}:{}", target.letter(), trace);
        let want_count = if target.is_critical() { v - 1 } else { v };
        let want_mass = srg::order_valuation(&spec, &params, ell, target.is_critical());
        let want_mass = want_mass.to_i128().ok_or_else(|| PredictError::TooLarge(big(&want_mass)))?;
        out.push(finish(ell, trace, &terms, want_count, want_mass, target));
    }
    Ok(Prediction { family: inst.family, q: inst.q.value(), m: inst.m, target, v, k, primes: out })
}

/// Checks a term list and turns it into a profile. Terms with multiplicity
/// zero are dropped; coinciding exponents are summed but flagged.
fn finish(ell: u64, trace: String, terms: &[(i64, i128)], want_count: u64, want_mass: i128, target: Target) -> PrimePrediction {
    let mut issues = Vec::new();
    let mut entries: BTreeMap<u32, u64> = BTreeMap::new();
    let mut seen: BTreeMap<i64, i128> = BTreeMap::new();
    for &(a, e) in terms {
        if e == 0 {
            continue;
        }
        if e < 0 {
            issues.push(format!("negative multiplicity e_{a} = {e}"));
            continue;
        }
        if a < 0 {
            issues.push(format!("negative exponent {a}"));
            continue;
        }
        if seen.insert(a, e).is_some() {
            issues.push(format!("two terms at exponent {a}"));
        }
        *entries.entry(a as u32).or_insert(0) += e as u64;
    }
    let count: i128 = terms.iter().map(|&(_, e)| e).sum();
    if count != want_count as i128 {
        issues.push(format!("{count} slots where {want_count} are needed"));
    }
    let mass: i128 = terms.iter().map(|&(a, e)| a as i128 * e).sum();
    if mass != want_mass {
        issues.push(format!("l-valuation {mass} of the order, expected {want_mass}"));
    }
    let free = u64::from(target.is_critical());
    PrimePrediction { ell, trace, profile: DivisorProfile::new(ell, entries, free), issues }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::PrimePower;

    fn inst(f: PolarFamily, q: u64, m: u32) -> Instance {
        Instance::new(f, PrimePower::from_value(q).unwrap(), m).unwrap()
    }

    fn map(pairs: &[(u32, u64)]) -> BTreeMap<u32, u64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn symplectic_two_two() {
        let s = predict_smith(&inst(PolarFamily::S, 2, 2)).unwrap();
        assert_eq!(s.group().to_string(), "Z/2 + (Z/3)^6");
        assert_eq!(s.branch(3), Some("S:generic:case2"));
        assert_eq!(s.branch(2), Some("S:char"));
        let k = predict_critical(&inst(PolarFamily::S, 2, 2)).unwrap();
        assert_eq!(k.group().to_string(), "Z + Z/3 + (Z/9)^4 + (Z/5)^8");
    }

    #[test]
    fn named_profiles() {
        let s = predict_smith(&inst(PolarFamily::S, 3, 2)).unwrap();
        assert_eq!(s.profile(2).unwrap().entries, map(&[(0, 16), (1, 8), (3, 16)]));
        assert_eq!(s.branch(2), Some("S:sp:meven"));
        let o = predict_smith(&inst(PolarFamily::O, 3, 2)).unwrap();
        assert_eq!(o.profile(2).unwrap().entries, map(&[(0, 10), (1, 14), (2, 6), (3, 10)]));
        let ue = predict_smith(&inst(PolarFamily::UE, 2, 2)).unwrap();
        assert_eq!(ue.profile(3).unwrap().entries, map(&[(0, 15), (1, 15), (2, 15)]));
        assert_eq!(ue.group().to_string(), "Z/4 + (Z/3)^15 + (Z/9)^15");
        let om = predict_critical(&inst(PolarFamily::OMinus, 2, 3)).unwrap();
        assert_eq!(om.profile(3).unwrap().entries, map(&[(0, 7), (2, 14), (3, 5)]));
        assert_eq!(om.branch(3), Some("K:om:modd:ell|q+1"));
        let uo = predict_smith(&inst(PolarFamily::UO, 2, 2)).unwrap();
        assert_eq!(uo.profile(3).unwrap().entries, map(&[(0, 45), (1, 75), (3, 45)]));
    }

    #[test]
    fn critical_has_no_characteristic_part() {
        for fam in PolarFamily::ALL {
            for q in [2u64, 3, 4, 5, 7, 8, 9] {
                let i = inst(fam, q, fam.min_m());
                let k = predict_critical(&i).unwrap();
                assert!(k.prime(i.q.p()).is_none(), "{i}");
            }
        }
    }

    #[test]
    fn every_typo_breaks_its_witness() {
        for t in Typo::ALL {
            let (fam, q, m) = t.witness();
            let i = inst(fam, q, m);
            let clean = [predict_with(&i, Target::Smith, &[]).unwrap(), predict_with(&i, Target::Critical, &[]).unwrap()];
            let dirty = [predict_with(&i, Target::Smith, &[t]).unwrap(), predict_with(&i, Target::Critical, &[t]).unwrap()];
            assert!(clean.iter().all(Prediction::is_sound));
            assert_ne!(clean, dirty, "{t}");
            assert_eq!(t.tag().parse::<Typo>(), Ok(t));
        }
    }
}
