//! The stable per-target JSON summary.

use std::collections::BTreeMap;

use polar_snf::predict::{Prediction, Target};
use polar_snf::{DivisorProfile, GroupDecomposition, PolarFamily};
use serde_json::{json, Map, Value};

pub struct Summary<'a> {
    pub family: PolarFamily,
    pub q: u64,
    pub m: u32,
    pub target: Target,
    pub v: u64,
    pub k: u64,
    pub profiles: Vec<&'a DivisorProfile>,
    pub branches: Option<BTreeMap<u64, String>>,
    pub matched: Option<bool>,
}

impl<'a> Summary<'a> {
    pub fn of_prediction(p: &'a Prediction) -> Self {
        Summary {
            family: p.family,
            q: p.q,
            m: p.m,
            target: p.target,
            v: p.v,
            k: p.k,
            profiles: p.profiles().collect(),
            branches: Some(p.primes.iter().map(|x| (x.ell, x.trace.clone())).collect()),
            matched: None,
        }
    }

    pub fn group(&self) -> GroupDecomposition {
        GroupDecomposition::from_profiles(u64::from(self.target.is_critical()), self.profiles.iter().copied())
    }

    pub fn to_json(&self) -> Map<String, Value> {
        let profiles: BTreeMap<String, BTreeMap<String, u64>> = self
            .profiles
            .iter()
            .map(|p| (p.ell.to_string(), p.entries.iter().map(|(a, m)| (a.to_string(), *m)).collect()))
            .collect();
        let mut out = Map::new();
        out.insert("family".into(), json!(self.family));
        out.insert("q".into(), json!(self.q));
        out.insert("m".into(), json!(self.m));
        out.insert("target".into(), json!(self.target));
        out.insert("v".into(), json!(self.v));
        out.insert("k".into(), json!(self.k));
        out.insert("profiles".into(), json!(profiles));
        out.insert("group".into(), json!(self.group().to_string()));
        if let Some(b) = &self.branches {
            let b: BTreeMap<String, &String> = b.iter().map(|(l, t)| (l.to_string(), t)).collect();
            out.insert("branches".into(), json!(b));
        }
        if let Some(m) = self.matched {
            out.insert("match".into(), json!(m));
        }
        out
    }
}
