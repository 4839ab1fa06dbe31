//! Running a job and assembling its JSON report.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;
use transversal_core::gates::{compute_groups, decompose_action, GateGroups};
use transversal_core::monomial::{
    check_h_hypotheses, check_t_id_hypotheses, closed_form_h, closed_form_t_id, delta_generators,
    delta_span, evaluate, minimal_full_level, MonomialCodeSpec,
};
use transversal_core::oracle::{coset_phase_check, Class, GateClass, Witness};
use transversal_core::zmod::{ZModule, ZVector};
use transversal_core::{CssCode, Error};

use crate::job::{CliError, CodeSource, Job, Task, SCHEMA_VERSION};

/// Exhaustive verification is used when `N^n` is at most this.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 12;
/// Uniform random gates drawn in sampled verification.
pub const UNIFORM_SAMPLES: usize = 64;
/// Random elements drawn from each computed group in sampled verification.
pub const GROUP_SAMPLES: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleJson {
    pub generators: Vec<Vec<u64>>,
    pub length: u32,
}

impl From<&ZModule> for ModuleJson {
    fn from(m: &ZModule) -> Self {
        ModuleJson {
            generators: m.to_rows(),
            length: m.length(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorJson {
    #[serde(rename = "J")]
    pub j: Vec<usize>,
    pub a: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionJson {
    pub gate: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub in_h: bool,
    pub in_t: bool,
    pub in_id: bool,
    /// Present only for gates in `H`; elsewhere the logical action is undefined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub global_phase: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<FactorJson>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessJson {
    pub kind: &'static str,
    pub v: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
}

impl From<&Witness> for WitnessJson {
    fn from(w: &Witness) -> Self {
        match w {
            Witness::Coset { v, u } => WitnessJson {
                kind: "coset",
                v: v.to_string(),
                u: Some(u.to_string()),
            },
            Witness::Nonlinear { v } => WitnessJson {
                kind: "nonlinear",
                v: v.to_string(),
                u: None,
            },
            Witness::Phase { v } => WitnessJson {
                kind: "phase",
                v: v.to_string(),
                u: None,
            },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GateCheckJson {
    pub gate: Vec<u64>,
    pub classification: &'static str,
    pub groups: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    pub agreement: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DisagreementJson {
    pub gate: Vec<u64>,
    pub classification: &'static str,
    pub groups: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateCheckJson>,
    pub mode: &'static str,
    pub checked: usize,
    pub disagreements: Vec<DisagreementJson>,
    pub agreement: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedModuleJson {
    /// `"closed-form"` or `"generic"`.
    pub source: &'static str,
    #[serde(flatten)]
    pub module: ModuleJson,
    pub matches_generic: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<u64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaJson {
    pub quotients: Vec<String>,
    pub monomials: Vec<String>,
    #[serde(flatten)]
    pub module: ModuleJson,
    pub contained_in_h: bool,
    pub equals_h: bool,
    /// A vector in exactly one of the span and `H`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<u64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormJson {
    pub fallback: bool,
    #[serde(rename = "H")]
    pub h: ClosedModuleJson,
    #[serde(rename = "T")]
    pub t: ClosedModuleJson,
    #[serde(rename = "Id")]
    pub id: ClosedModuleJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<DeltaJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_reason: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: u32,
    pub ell: u32,
    #[serde(rename = "N")]
    pub modulus: u64,
    /// `[n, K]`.
    pub params: [usize; 2],
    /// Coset representatives `w_1..w_K` of the logical qubits.
    pub logical_basis: Vec<String>,
    /// Monomial `u_i` with `w_i = ev(u_i)`, for monomial codes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub encoding: Option<Vec<String>>,
    #[serde(rename = "H", skip_serializing_if = "Option::is_none")]
    pub h: Option<ModuleJson>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<ModuleJson>,
    #[serde(rename = "Id", skip_serializing_if = "Option::is_none")]
    pub id: Option<ModuleJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub logical_actions: Option<Vec<ActionJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedFormJson>,
}

/// A finished report plus any consistency failures found while building it.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub failures: Vec<String>,
}

/// Indented JSON with short rows (generator rows, factors) kept on one line.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("reports serialize");
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    out
}

const INLINE_WIDTH: usize = 100;

fn is_flat(v: &Value) -> bool {
    let scalar = |x: &Value| !x.is_array() && !x.is_object();
    match v {
        Value::Array(a) => a.iter().all(scalar),
        Value::Object(m) => m
            .values()
            .all(|x| scalar(x) || x.as_array().is_some_and(|a| a.iter().all(scalar))),
        _ => true,
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let compact = serde_json::to_string(v).expect("values serialize");
    if is_flat(v) && indent + compact.len() <= INLINE_WIDTH {
        out.push_str(&compact);
        return;
    }
    let pad = " ".repeat(indent + 2);
    match v {
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad);
                write_value(out, x, indent + 2);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&" ".repeat(indent));
            out.push(']');
        }
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&serde_json::to_string(k).expect("keys serialize"));
                out.push_str(": ");
                write_value(out, x, indent + 2);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&" ".repeat(indent));
            out.push('}');
        }
        _ => out.push_str(&compact),
    }
}

fn class_name(c: Class) -> &'static str {
    match c {
        Class::NotInH => "NotInH",
        Class::InH => "InH",
        Class::TransversalLogical => "TransversalLogical",
        Class::LogicalIdentity => "LogicalIdentity",
    }
}

fn group_class(g: &GateGroups, b: &ZVector) -> Result<Class, Error> {
    Ok(if g.id.contains(b)? {
        Class::LogicalIdentity
    } else if g.t.contains(b)? {
        Class::TransversalLogical
    } else if g.h.contains(b)? {
        Class::InH
    } else {
        Class::NotInH
    })
}

/// Classifies `gates` with the oracle on up to `threads` workers. The order
/// of the result matches `gates`.
fn classify_all(css: &CssCode, gates: &[ZVector], threads: usize) -> Result<Vec<GateClass>, Error> {
    if gates.is_empty() {
        return Ok(Vec::new());
    }
    let chunk = gates.len().div_ceil(threads.clamp(1, gates.len()));
    std::thread::scope(|s| {
        let workers: Vec<_> = gates
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|b| coset_phase_check(css, b))
                        .collect::<Result<Vec<_>, _>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(gates.len());
        for w in workers {
            out.extend(w.join().expect("oracle worker panicked")?);
        }
        Ok(out)
    })
}

fn random_element(rng: &mut ChaCha8Rng, m: &ZModule, n: usize, ell: u32) -> ZVector {
    let mut v = ZVector::zeros(n, ell);
    for g in m.gens() {
        v = v.add(&g.scale(rng.gen_range(0..1u64 << ell)));
    }
    v
}

fn candidates(job: &Job, g: &GateGroups) -> Result<(&'static str, Vec<ZVector>), Error> {
    let n = job.css.len();
    let ell = job.ell;
    let modulus = 1u64 << ell;
    let exhaustive = (n as u32)
        .checked_mul(ell)
        .is_some_and(|bits| bits < 64 && 1u64 << bits <= EXHAUSTIVE_LIMIT);
    if exhaustive {
        let total = 1u64 << (n as u32 * ell);
        let all = (0..total)
            .map(|x| {
                let entries = (0..n)
                    .map(|i| x >> (ell * (n - 1 - i) as u32) & (modulus - 1))
                    .collect();
                ZVector::new(entries, ell)
            })
            .collect::<Result<_, _>>()?;
        return Ok(("exhaustive", all));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(job.seed);
    let mut out = Vec::new();
    for m in [&g.h, &g.t, &g.id] {
        out.extend(m.gens().iter().cloned());
        for _ in 0..GROUP_SAMPLES {
            out.push(random_element(&mut rng, m, n, ell));
        }
    }
    for _ in 0..UNIFORM_SAMPLES {
        let entries = (0..n).map(|_| rng.gen_range(0..modulus)).collect();
        out.push(ZVector::new(entries, ell)?);
    }
    let mut seen = HashSet::new();
    out.retain(|v| seen.insert(v.entries().to_vec()));
    Ok(("sampled", out))
}

fn verify(job: &Job, g: &GateGroups, threads: usize) -> Result<VerifyJson, Error> {
    let gate = match &job.gate {
        None => None,
        Some(b) => {
            let oracle = coset_phase_check(&job.css, b)?;
            let expected = group_class(g, b)?;
            Some(GateCheckJson {
                gate: b.entries().to_vec(),
                classification: class_name(oracle.class),
                groups: class_name(expected),
                witness: oracle.witness.as_ref().map(WitnessJson::from),
                agreement: oracle.class == expected,
            })
        }
    };

    let (mode, gates) = candidates(job, g)?;
    let classes = classify_all(&job.css, &gates, threads)?;
    let mut disagreements = Vec::new();
    for (b, c) in gates.iter().zip(&classes) {
        let expected = group_class(g, b)?;
        if c.class != expected {
            disagreements.push(DisagreementJson {
                gate: b.entries().to_vec(),
                classification: class_name(c.class),
                groups: class_name(expected),
            });
        }
    }
    let agreement = disagreements.is_empty() && gate.as_ref().is_none_or(|c| c.agreement);
    Ok(VerifyJson {
        gate,
        mode,
        checked: gates.len(),
        disagreements,
        agreement,
    })
}

fn actions(job: &Job, g: &GateGroups) -> Result<Vec<ActionJson>, Error> {
    let ell = job.ell;
    let mut gates: Vec<(Option<String>, ZVector)> = Vec::new();
    if let Some(b) = &job.gate {
        gates.push((None, b.clone()));
    } else if let Some(d) = job.monomial().and_then(|s| delta_generators(s, ell).ok()) {
        for u in d.delta.sorted_by_degree() {
            gates.push((
                Some(format!("ev({u})")),
                ZVector::lift(&evaluate(u), ell, 1),
            ));
        }
    } else {
        for (i, b) in g.h.gens().iter().enumerate() {
            gates.push((Some(format!("H[{i}]")), b.clone()));
        }
    }

    let mut out = Vec::with_capacity(gates.len());
    for (label, b) in gates {
        let in_h = g.h.contains(&b)?;
        let (global_phase, factors) = if in_h {
            let d = decompose_action(&job.css, &b)?;
            let factors = d
                .one_based()
                .into_iter()
                .map(|(j, a)| FactorJson { j, a })
                .collect();
            (Some(d.global_phase), Some(factors))
        } else {
            (None, None)
        };
        out.push(ActionJson {
            gate: b.entries().to_vec(),
            label,
            in_h,
            in_t: g.t.contains(&b)?,
            in_id: g.id.contains(&b)?,
            global_phase,
            factors,
        });
    }
    Ok(out)
}

/// First generator of `a` outside `b`, else first generator of `b` outside `a`.
fn difference_witness(a: &ZModule, b: &ZModule) -> Result<Option<Vec<u64>>, Error> {
    for (x, y) in [(a, b), (b, a)] {
        for v in x.gens() {
            if !y.contains(v)? {
                return Ok(Some(v.entries().to_vec()));
            }
        }
    }
    Ok(None)
}

fn generic_module(m: &ZModule, reason: String) -> ClosedModuleJson {
    ClosedModuleJson {
        source: "generic",
        module: m.into(),
        matches_generic: None,
        reason: Some(reason),
        witness: None,
    }
}

fn compare_module(
    name: &str,
    closed: &ZModule,
    generic: &ZModule,
    ell: u32,
    failures: &mut Vec<String>,
) -> Result<ClosedModuleJson, Error> {
    let witness = difference_witness(closed, generic)?;
    if witness.is_some() {
        failures.push(format!(
            "closed-form {name} differs from the generic {name} at l={ell}"
        ));
    }
    Ok(ClosedModuleJson {
        source: "closed-form",
        module: closed.into(),
        matches_generic: Some(witness.is_none()),
        reason: None,
        witness,
    })
}

fn closed_form(
    spec: Result<&MonomialCodeSpec, &str>,
    g: &GateGroups,
    failures: &mut Vec<String>,
) -> Result<ClosedFormJson, Error> {
    let ell = g.ell;
    let spec = match spec {
        Ok(spec) => spec,
        Err(reason) => {
            let reason = reason.to_string();
            return Ok(ClosedFormJson {
                fallback: true,
                h: generic_module(&g.h, reason.clone()),
                t: generic_module(&g.t, reason.clone()),
                id: generic_module(&g.id, reason),
                delta: None,
                delta_reason: None,
            });
        }
    };

    let h = match closed_form_h(spec, ell) {
        Ok(m) => compare_module("H", &m, &g.h, ell, failures)?,
        Err(e @ Error::Hypothesis(_)) => generic_module(&g.h, e.to_string()),
        Err(e) => return Err(e),
    };
    let (t, id) = match closed_form_t_id(spec, ell) {
        Ok((t, id)) => (
            compare_module("T", &t, &g.t, ell, failures)?,
            compare_module("Id", &id, &g.id, ell, failures)?,
        ),
        Err(e @ Error::Hypothesis(_)) => (
            generic_module(&g.t, e.to_string()),
            generic_module(&g.id, e.to_string()),
        ),
        Err(e) => return Err(e),
    };

    let (delta, delta_reason) = match delta_generators(spec, ell) {
        Ok(d) => {
            let span = delta_span(spec, ell)?;
            let contained = span.is_submodule_of(&g.h)?;
            let equal = contained && span.length() == g.h.length();
            let delta = DeltaJson {
                quotients: d.quotients.tokens(),
                monomials: d
                    .delta
                    .sorted_by_degree()
                    .iter()
                    .map(|u| u.to_string())
                    .collect(),
                module: (&span).into(),
                contained_in_h: contained,
                equals_h: equal,
                witness: difference_witness(&span, &g.h)?,
            };
            (Some(delta), None)
        }
        Err(e @ Error::Hypothesis(_)) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };

    let fallback = h.source == "generic" || t.source == "generic";
    Ok(ClosedFormJson {
        fallback,
        h,
        t,
        id,
        delta,
        delta_reason,
    })
}

/// Runs every task of `job`. Oracle calls are spread over `threads` workers;
/// the report does not depend on the thread count.
pub fn run(job: &Job, threads: usize) -> Result<Outcome, CliError> {
    let css = &job.css;
    let (n, k) = css.params();
    let mut report = Report {
        version: SCHEMA_VERSION,
        ell: job.ell,
        modulus: 1u64 << job.ell,
        params: [n, k],
        logical_basis: css
            .pair()
            .extension()
            .iter()
            .map(|w| w.to_string())
            .collect(),
        encoding: job
            .monomial()
            .map(|s| s.encoding().iter().map(|u| u.to_string()).collect()),
        h: None,
        t: None,
        id: None,
        logical_actions: None,
        verify: None,
        closed_form: None,
    };
    let mut failures = Vec::new();
    if job.tasks.is_empty() {
        return Ok(Outcome { report, failures });
    }

    let g = compute_groups(css, job.ell)?;
    if job.has(Task::Groups) {
        report.h = Some((&g.h).into());
        report.t = Some((&g.t).into());
        report.id = Some((&g.id).into());
    }
    if job.has(Task::Action) {
        report.logical_actions = Some(actions(job, &g)?);
    }
    if job.has(Task::Verify) {
        let v = verify(job, &g, threads)?;
        if !v.disagreements.is_empty() {
            failures.push(format!(
                "oracle and computed groups disagree on {} gates",
                v.disagreements.len()
            ));
        }
        report.verify = Some(v);
    }
    if job.has(Task::ClosedForm) {
        let spec = match &job.source {
            CodeSource::Monomial(_) if !css.y_z().is_zero() => Err("closed forms assume y_z = 0"),
            CodeSource::Monomial(s) => Ok(s),
            CodeSource::Matrix => Err("code is not given by monomials"),
        };
        report.closed_form = Some(closed_form(spec, &g, &mut failures)?);
    }
    Ok(Outcome { report, failures })
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelJson {
    pub ell: u32,
    pub h_closed_form: bool,
    pub t_id_closed_form: bool,
    pub delta: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReedMullerJson {
    pub q: u32,
    pub r: u32,
    /// `q + (l - 1) r` at the job's level.
    pub bound: u32,
    /// `bound <= m - 1`.
    pub applies: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonomialInfoJson {
    pub m: u32,
    pub encoding: Vec<String>,
    pub decreasing: bool,
    /// Least `l` with `x1...xm` in `M2 M1^(l-1)`.
    pub minimal_full_level: Option<u32>,
    pub h_levels: Vec<u32>,
    pub t_id_levels: Vec<u32>,
    pub levels: Vec<LevelJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reed_muller: Option<ReedMullerJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InfoJson {
    pub version: u32,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub ell: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monomial: Option<MonomialInfoJson>,
}

fn hypothesis_holds(
    r: Result<(), Error>,
    reasons: &mut Vec<String>,
    what: &str,
) -> Result<bool, Error> {
    match r {
        Ok(()) => Ok(true),
        Err(Error::Hypothesis(h)) => {
            reasons.push(format!("{what}: {h}"));
            Ok(false)
        }
        Err(e) => Err(e),
    }
}

/// Code parameters and the levels at which each closed form applies.
pub fn info(job: &Job) -> Result<InfoJson, CliError> {
    let (n, k) = job.css.params();
    let monomial = match job.monomial() {
        None => None,
        Some(spec) => {
            let m = spec.vars();
            let full = minimal_full_level(spec);
            let top = job.ell.max(full.unwrap_or(m + 1)).min(30);
            let mut levels = Vec::new();
            for ell in 1..=top {
                let mut reasons = Vec::new();
                let h = hypothesis_holds(check_h_hypotheses(spec, ell), &mut reasons, "H")?;
                let t = hypothesis_holds(check_t_id_hypotheses(spec, ell), &mut reasons, "T/Id")?;
                let d = hypothesis_holds(
                    delta_generators(spec, ell).map(|_| ()),
                    &mut reasons,
                    "Delta",
                )?;
                levels.push(LevelJson {
                    ell,
                    h_closed_form: h,
                    t_id_closed_form: t,
                    delta: d,
                    reasons,
                });
            }
            let reed_muller = spec.reed_muller_orders().map(|(q, r)| {
                let bound = q + (job.ell - 1) * r;
                ReedMullerJson {
                    q,
                    r,
                    bound,
                    applies: bound < m,
                }
            });
            Some(MonomialInfoJson {
                m,
                encoding: spec.encoding().iter().map(|u| u.to_string()).collect(),
                decreasing: spec.m1().is_decreasing() && spec.m2().is_decreasing(),
                minimal_full_level: full,
                h_levels: levels
                    .iter()
                    .filter(|l| l.h_closed_form)
                    .map(|l| l.ell)
                    .collect(),
                t_id_levels: levels
                    .iter()
                    .filter(|l| l.t_id_closed_form)
                    .map(|l| l.ell)
                    .collect(),
                levels,
                reed_muller,
            })
        }
    };
    Ok(InfoJson {
        version: SCHEMA_VERSION,
        n,
        k,
        ell: job.ell,
        monomial,
    })
}
