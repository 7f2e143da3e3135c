use std::fmt;
use std::fs;
use std::path::Path;

use num_traits::ToPrimitive;
use polar_snf::par::{self, Execution};
use polar_snf::predict::{self, PredictError, Target, Typo};
use polar_snf::report::{self, VerificationReport, VerifyError};
use polar_snf::srg::{self, Instance};
use polar_snf::{build_graph, snf, DivisorProfile, PolarError, PolarFamily, PrimePower};
use serde_json::{json, Value};

use crate::schema::Summary;
use crate::Export;

#[derive(Debug)]
pub enum CliError {
    BadInput(String),
    Resource(String),
    Io(String),
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::BadInput(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::BadInput(s) | CliError::Resource(s) | CliError::Io(s) | CliError::Failed(s) => f.write_str(s),
        }
    }
}

impl From<PolarError> for CliError {
    fn from(e: PolarError) -> Self {
        match e {
            PolarError::Field(polar_snf::FieldError::DegreeTooLarge { .. }) => CliError::Resource(e.to_string()),
            e => CliError::BadInput(e.to_string()),
        }
    }
}

impl From<PredictError> for CliError {
    fn from(e: PredictError) -> Self {
        match e {
            PredictError::TooLarge(_) => CliError::Resource(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Polar(p) => p.into(),
            VerifyError::Predict(p) => p.into(),
            e => CliError::Failed(e.to_string()),
        }
    }
}

pub type Outcome = Result<bool, CliError>;

pub fn instance(family: &str, q: u64, m: u32) -> Result<Instance, CliError> {
    let family: PolarFamily = family
        .parse()
        .map_err(|_| CliError::BadInput(format!("unknown family '{family}'; expected one of s, o, ominus, oplus, ue, uo")))?;
    let q = PrimePower::from_value(q).map_err(|_| CliError::BadInput("q must be a prime power".into()))?;
    Instance::new(family, q, m).map_err(|e| CliError::BadInput(e.to_string()))
}

fn vertex_bound(inst: &Instance, v_max: u64) -> Result<u64, CliError> {
    let v = srg::srg_params(inst).v;
    match v.to_u64() {
        Some(n) if n <= v_max => Ok(n),
        _ => Err(CliError::Resource(format!("{inst} has {v} vertices, above the bound {v_max}"))),
    }
}

fn emit(value: &Value, json_path: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    println!("{text}");
    if let Some(p) = json_path {
        fs::write(p, format!("{text}\n")).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn one_or_many(mut items: Vec<Value>) -> Value {
    if items.len() == 1 {
        items.pop().unwrap()
    } else {
        Value::Array(items)
    }
}

pub fn predict(family: &str, q: u64, m: u32, targets: &[Target], json_path: Option<&Path>) -> Outcome {
    let inst = instance(family, q, m)?;
    let mut out = Vec::new();
    for &t in targets {
        let p = predict::predict(&inst, t)?;
        out.push(Value::Object(Summary::of_prediction(&p).to_json()));
    }
    emit(&one_or_many(out), json_path)?;
    Ok(true)
}

fn factored_string(profiles: &[DivisorProfile]) -> String {
    let parts: Vec<String> = profiles
        .iter()
        .filter(|p| p.mass() > 0)
        .map(|p| if p.mass() == 1 { p.ell.to_string() } else { format!("{}^{}", p.ell, p.mass()) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" * ")
    }
}

pub fn compute(family: &str, q: u64, m: u32, targets: &[Target], v_max: u64, json_path: Option<&Path>) -> Outcome {
    let inst = instance(family, q, m)?;
    vertex_bound(&inst, v_max)?;
    let graph = build_graph(inst.family, inst.q, inst.m)?;
    let measured = srg::measured_params(&graph).ok_or_else(|| CliError::Failed("graph is not strongly regular".into()))?;
    if measured != srg::srg_params(&inst) {
        return Err(CliError::Failed(format!("measured parameters {measured:?} differ from the formulas")));
    }
    let mut out = Vec::new();
    for &t in targets {
        let mat = report::matrix_for(&graph, t);
        let primes = srg::relevant_primes(&inst, t.is_critical()).map_err(|e| CliError::Failed(e.to_string()))?;
        let profiles: Vec<Result<DivisorProfile, snf::SnfError>> =
            par::map(Execution::default(), &primes, |&l| snf::divisor_profile_with(&mat, l, Execution::Sequential));
        let profiles: Vec<DivisorProfile> =
            profiles.into_iter().collect::<Result<_, _>>().map_err(|e| CliError::Failed(e.to_string()))?;
        let summary = Summary {
            family: inst.family,
            q: inst.q.value(),
            m: inst.m,
            target: t,
            v: graph.vertex_count() as u64,
            k: measured.k.to_u64().unwrap_or(0),
            profiles: profiles.iter().collect(),
            branches: None,
            matched: None,
        };
        let mut obj = summary.to_json();
        let order = summary.group().order().to_string();
        obj.insert("vertices".into(), json!(graph.vertex_count()));
        obj.insert("degree".into(), json!(measured.k.to_u64()));
        obj.insert("free_rank".into(), json!(profiles.first().map_or(0, |p| p.free_rank)));
        let key = if t.is_critical() { "tree_count" } else { "determinant" };
        obj.insert(key.into(), json!(order));
        obj.insert(format!("{key}_factored"), json!(factored_string(&profiles)));
        out.push(Value::Object(obj));
    }
    emit(&one_or_many(out), json_path)?;
    Ok(true)
}

fn describe(r: &VerificationReport) {
    let status = if r.verdict { "ok" } else { "FAIL" };
    eprintln!("{}({},{}) {status}", r.family, r.q, r.m);
    for t in &r.targets {
        for p in t.primes.iter().filter(|p| !p.matched) {
            eprintln!("  {} l={} [{}]: {:?} {:?}", t.target, p.ell, p.trace, p.diff, p.issues);
        }
    }
}

pub fn verify(
    family: &str,
    q: u64,
    m: u32,
    targets: &[Target],
    typos: &[Typo],
    v_max: u64,
    json_path: Option<&Path>,
) -> Outcome {
    let inst = instance(family, q, m)?;
    vertex_bound(&inst, v_max)?;
    let r = report::verify_instance(&inst, targets, typos, Execution::default())?;
    describe(&r);
    emit(&serde_json::to_value(&r).expect("reports serialize"), json_path)?;
    Ok(r.verdict)
}

fn run_all(instances: &[Instance], targets: &[Target], typos: &[Typo]) -> Result<Vec<VerificationReport>, CliError> {
    let results = par::map(Execution::default(), instances, |inst| {
        report::verify_instance(inst, targets, typos, Execution::Sequential)
    });
    results.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

pub fn verify_battery(targets: &[Target], typos: &[Typo], json_path: Option<&Path>) -> Outcome {
    let reports = run_all(&report::battery(), targets, typos)?;
    reports.iter().for_each(describe);
    emit(&serde_json::to_value(&reports).expect("reports serialize"), json_path)?;
    Ok(reports.iter().all(|r| r.verdict))
}

pub fn export(family: &str, q: u64, m: u32, what: Export, out: &Path) -> Outcome {
    let inst = instance(family, q, m)?;
    let graph = build_graph(inst.family, inst.q, inst.m)?;
    let text = match what {
        Export::Adjacency => graph.adjacency_matrix().to_string(),
        Export::Laplacian => graph.laplacian_matrix().to_string(),
        Export::Points => graph.points_text(),
    };
    fs::write(out, text).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    Ok(true)
}

/// Every valid instance with `q <= q_max`, `m <= m_max` and at most `v_max`
/// vertices, ordered by family, then `q`, then `m`.
pub fn sweep_instances(q_max: u64, m_max: u32, v_max: u64) -> Vec<Instance> {
    let mut out = Vec::new();
    for fam in PolarFamily::ALL {
        for q in 2..=q_max {
            let Ok(q) = PrimePower::from_value(q) else {
                continue;
            };
            for m in fam.min_m()..=m_max {
                let inst = Instance::new(fam, q, m).expect("m is in range");
                if vertex_bound(&inst, v_max).is_ok() {
                    out.push(inst);
                }
            }
        }
    }
    out
}

pub fn sweep(q_max: u64, m_max: u32, v_max: u64, targets: &[Target], json_path: Option<&Path>) -> Outcome {
    let instances = sweep_instances(q_max, m_max, v_max);
    let reports = run_all(&instances, targets, &[])?;
    let rows: Vec<Value> = reports
        .iter()
        .map(|r| {
            let bad: Vec<Value> = r
                .mismatches()
                .into_iter()
                .map(|(t, l)| json!({"target": t, "ell": l}))
                .collect();
            json!({"family": r.family, "q": r.q, "m": r.m, "v": r.v, "verdict": r.verdict, "checks": r.checks, "mismatches": bad})
        })
        .collect();
    reports.iter().filter(|r| !r.verdict).for_each(describe);
    let passed = reports.iter().filter(|r| r.verdict).count();
    eprintln!("{passed}/{} instances verified", reports.len());
    emit(&Value::Array(rows), json_path)?;
    Ok(passed == reports.len())
}
