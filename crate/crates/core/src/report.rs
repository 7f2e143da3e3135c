//! Verification of predictions against explicit computation.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::IntegerMatrix;
use crate::par::{self, Execution};
use crate::polar::{build_graph, PolarError, PolarFamily, PolarGraph};
use crate::predict::{self, PredictError, Target, Typo};
use crate::snf::{self, det, DivisorProfile, GroupDecomposition, SnfError};
use crate::srg::{self, Instance, SrgError};

/// Above this size determinants are compared modulo several large primes
/// instead of exactly.
pub const EXACT_DETERMINANT_LIMIT: usize = 200;

const FINGERPRINT_PRIMES: [u64; 3] = [det::WIDE_PRIME, 2_305_843_009_213_693_921, 1_000_000_000_000_000_003];

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Polar(#[from] PolarError),
    #[error(transparent)]
    Srg(#[from] SrgError),
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error(transparent)]
    Snf(#[from] SnfError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentDiff {
    pub exponent: u32,
    pub predicted: u64,
    pub computed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeCheck {
    pub ell: u64,
    pub trace: String,
    pub predicted: DivisorProfile,
    pub computed: DivisorProfile,
    #[serde(rename = "match")]
    pub matched: bool,
    pub diff: Vec<ExponentDiff>,
    pub issues: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetReport {
    pub target: Target,
    pub predicted_group: String,
    pub computed_group: String,
    pub primes: Vec<PrimeCheck>,
}

impl TargetReport {
    pub fn all_match(&self) -> bool {
        self.primes.iter().all(|p| p.matched)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalChecks {
    /// `A^2 = kI + λA + μ(J - I - A)` on the constructed graph.
    pub srg_identity: bool,
    /// Spanning trees `= t^f u^g / v`.
    pub tree_count: bool,
    /// `|det A| = k r^f |s|^g`.
    pub determinant: bool,
    /// `p` does not divide `|K|`.
    pub characteristic_free: bool,
}

impl GlobalChecks {
    pub fn all(&self) -> bool {
        self.srg_identity && self.tree_count && self.determinant && self.characteristic_free
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub construct_ms: u64,
    pub compute_ms: u64,
    pub total_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub family: PolarFamily,
    pub q: u64,
    pub m: u32,
    pub v: u64,
    pub k: u64,
    pub typos: Vec<Typo>,
    pub targets: Vec<TargetReport>,
    pub checks: GlobalChecks,
    pub verdict: bool,
    pub timing: Timing,
}

impl VerificationReport {
    pub fn target(&self, t: Target) -> Option<&TargetReport> {
        self.targets.iter().find(|r| r.target == t)
    }

    /// Primes whose profiles disagree, per target.
    pub fn mismatches(&self) -> Vec<(Target, u64)> {
        self.targets
            .iter()
            .flat_map(|t| t.primes.iter().filter(|p| !p.matched).map(move |p| (t.target, p.ell)))
            .collect()
    }

    /// The report with timing zeroed, for byte-level comparison.
    pub fn without_timing(&self) -> Self {
        VerificationReport { timing: Timing { construct_ms: 0, compute_ms: 0, total_ms: 0 }, ..self.clone() }
    }
}

fn diff(p: &DivisorProfile, c: &DivisorProfile) -> Vec<ExponentDiff> {
    let keys: std::collections::BTreeSet<u32> = p.entries.keys().chain(c.entries.keys()).copied().collect();
    let mut out: Vec<ExponentDiff> = keys
        .into_iter()
        .filter(|&a| p.get(a) != c.get(a))
        .map(|a| ExponentDiff { exponent: a, predicted: p.get(a), computed: c.get(a) })
        .collect();
    if p.free_rank != c.free_rank {
        // the free part is reported under a sentinel exponent
        out.push(ExponentDiff { exponent: u32::MAX, predicted: p.free_rank, computed: c.free_rank });
    }
    out
}

pub fn matrix_for(graph: &PolarGraph, target: Target) -> IntegerMatrix {
    match target {
        Target::Smith => graph.adjacency_matrix(),
        Target::Critical => graph.laplacian_matrix(),
    }
}

fn check_target(
    inst: &Instance,
    graph: &PolarGraph,
    target: Target,
    typos: &[Typo],
    exec: Execution,
) -> Result<TargetReport, VerifyError> {
    let pred = predict::predict_with(inst, target, typos)?;
    let mat = matrix_for(graph, target);
    let computed: Vec<Result<DivisorProfile, SnfError>> =
        par::map(exec, &pred.primes, |p| snf::divisor_profile_with(&mat, p.ell, Execution::Sequential));
    let mut primes = Vec::with_capacity(pred.primes.len());
    for (p, c) in pred.primes.iter().zip(computed) {
        let c = c?;
        let matched = p.issues.is_empty() && p.profile == c;
        primes.push(PrimeCheck {
            ell: p.ell,
            trace: p.trace.clone(),
            diff: diff(&p.profile, &c),
            predicted: p.profile.clone(),
            computed: c,
            matched,
            issues: p.issues.clone(),
        });
    }
    let free = u64::from(target.is_critical());
    let computed_group = GroupDecomposition::from_profiles(free, primes.iter().map(|p| &p.computed));
    Ok(TargetReport { target, predicted_group: pred.group().to_string(), computed_group: computed_group.to_string(), primes })
}

fn determinant_matches(a: &IntegerMatrix, want: &BigInt, exec: Execution) -> bool {
    if a.rows() <= EXACT_DETERMINANT_LIMIT {
        return &snf::bareiss_determinant(a).abs() == want;
    }
    let got = par::map(exec, &FINGERPRINT_PRIMES, |&p| det::determinant_mod_prime(a, p));
    FINGERPRINT_PRIMES.iter().zip(got).all(|(&p, d)| {
        let w = det::big_mod(want, p);
        d == w || (d + w).is_multiple_of(p)
    })
}

fn tree_count_matches(l: &IntegerMatrix, want: &BigInt, exec: Execution) -> bool {
    if l.rows() <= EXACT_DETERMINANT_LIMIT {
        return &snf::tree_count_of_laplacian(l) == want;
    }
    let got = par::map(exec, &FINGERPRINT_PRIMES, |&p| snf::tree_count_mod(l, p));
    FINGERPRINT_PRIMES.iter().zip(got).all(|(&p, d)| d == det::big_mod(want, p))
}

/// Builds the graph, computes both groups where requested, and compares each
/// prime's profile with the prediction.
pub fn verify_instance(
    inst: &Instance,
    targets: &[Target],
    typos: &[Typo],
    exec: Execution,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let graph = build_graph(inst.family, inst.q, inst.m)?;
    let construct_ms = start.elapsed().as_millis() as u64;
    let params = srg::srg_params(inst);
    let spec = srg::spectrum(inst);
    let srg_identity = srg::verify_srg_identity_with(&graph, &params, exec).is_ok();
    let (smith_order, crit_order) = srg::group_orders(&spec, &params)?;
    let a = graph.adjacency_matrix();
    let l = graph.laplacian_matrix();
    let determinant = determinant_matches(&a, &srg::expand(&smith_order), exec);
    let tree_count = tree_count_matches(&l, &srg::expand(&crit_order), exec);
    let p = inst.q.p();
    let char_part = snf::divisor_profile_with(&l, p, exec)?;
    let characteristic_free = !crit_order.contains_key(&p) && char_part.torsion().next().is_none();
    let mut reports = Vec::with_capacity(targets.len());
    for &t in targets {
        reports.push(check_target(inst, &graph, t, typos, exec)?);
    }
    let checks = GlobalChecks { srg_identity, tree_count, determinant, characteristic_free };
    let verdict = checks.all() && reports.iter().all(TargetReport::all_match);
    let total_ms = start.elapsed().as_millis() as u64;
    let timing = Timing { construct_ms, compute_ms: total_ms - construct_ms, total_ms };
    Ok(VerificationReport {
        family: inst.family,
        q: inst.q.value(),
        m: inst.m,
        v: graph.vertex_count() as u64,
        k: graph.degrees().first().copied().unwrap_or(0) as u64,
        typos: typos.to_vec(),
        targets: reports,
        checks,
        verdict,
        timing,
    })
}

/// The acceptance battery as `(family, q, m)`.
pub const BATTERY: [(PolarFamily, u64, u32); 9] = [
    (PolarFamily::S, 2, 2),
    (PolarFamily::S, 3, 2),
    (PolarFamily::S, 2, 3),
    (PolarFamily::O, 3, 2),
    (PolarFamily::O, 5, 2),
    (PolarFamily::OMinus, 2, 3),
    (PolarFamily::OPlus, 2, 3),
    (PolarFamily::UE, 2, 2),
    (PolarFamily::UO, 2, 2),
];

pub fn battery() -> Vec<Instance> {
    BATTERY
        .iter()
        .map(|&(f, q, m)| Instance::new(f, crate::ffield::PrimePower::from_value(q).unwrap(), m).unwrap())
        .collect()
}

/// Per-target mismatch locations, keyed by target then prime.
pub fn mismatch_map(report: &VerificationReport) -> BTreeMap<Target, Vec<u64>> {
    let mut out: BTreeMap<Target, Vec<u64>> = BTreeMap::new();
    for (t, l) in report.mismatches() {
        out.entry(t).or_default().push(l);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_symplectic_verifies() {
        let inst = battery()[0];
        let r = verify_instance(&inst, &Target::BOTH, &[], Execution::Sequential).unwrap();
        assert!(r.verdict, "{r:?}");
        assert_eq!(r.target(Target::Smith).unwrap().computed_group, "Z/2 + (Z/3)^6");
    }

    #[test]
    fn injected_typo_is_localized() {
        let inst = battery()[7];
        let r = verify_instance(&inst, &[Target::Smith], &[Typo::TableUeG], Execution::Sequential).unwrap();
        assert!(!r.verdict);
        assert_eq!(r.mismatches(), vec![(Target::Smith, 3)]);
        assert!(!r.target(Target::Smith).unwrap().primes[1].diff.is_empty());
    }
}
