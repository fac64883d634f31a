//! Decisions for finitely generated varieties: each property is reduced to
//! a check on the FSI members `K`, after auditing the hypotheses the
//! reduction needs.

mod report;

pub use report::{DecisionReport, Hypothesis, HypothesisAudit, Status, SubClosedAudit, Verdict, SCHEMA_VERSION};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{FiniteAlgebra, SubUniverse};
use crate::algebra_set::AlgebraSet;
use crate::congruence::{has_cep, CepFailure};
use crate::error::{Error, Result};
use crate::homsearch::{class_check, is_retract, ClassCheck, ClassProperty};
use crate::iso::canonical_form;
use crate::variety::{fsi_star, fsi_sub_closed, has_jonsson_terms, has_malcev_term, Detection, GeneratorSet};

pub const THM_JONSSON: &str = "Jonsson: FSI members of a finitely generated CD variety lie in HS of the generators";
pub const THM_CEP: &str = "CEP transfer: a CD variety has the CEP iff its FSI members do";
pub const THM_EP: &str = "For a variety, the CEP and the extension property coincide";
pub const THM_KEARNES: &str = "Kearnes: a residually small CD variety with the AP has the CEP";
pub const THM_AP: &str =
    "AP transfer: a variety with the CEP whose FSI members are closed under subalgebras has the AP iff its FSI members have the one-sided AP";
pub const THM_TIP: &str = "TIP iff one-sided AP and extension property";
pub const THM_SE: &str =
    "SE transfer: an arithmetical variety whose FSI members form a universal class has SE iff its FSI members do";
pub const THM_ISBELL: &str = "Isbell: SAP iff AP and SE";
pub const THM_STRONG_SPANS: &str =
    "Strong amalgams for all doubly injective FSI spans give the SAP in an arithmetical variety with the CEP";
pub const THM_JOIN_AP: &str =
    "Join of AP varieties: CEP, AP and sub-closed FSI classes on both sides, with shared FSI members retracts of every member containing them";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Property {
    Cep,
    Ep,
    Ap,
    Tip,
    Se,
    Sap,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::Cep,
        Property::Ep,
        Property::Ap,
        Property::Tip,
        Property::Se,
        Property::Sap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Property::Cep => "CEP",
            Property::Ep => "EP",
            Property::Ap => "AP",
            Property::Tip => "TIP",
            Property::Se => "SE",
            Property::Sap => "SAP",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown property `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecideOptions {
    pub assume_cd: bool,
    pub assume_arithmetical: bool,
    /// Record per-phase timings. Off by default so reports are reproducible.
    pub timings: bool,
}

/// Result of one dispatch step before it is wrapped in a report.
#[derive(Clone, Debug)]
struct Outcome {
    verdict: Verdict,
    reason: String,
    witness: Option<Value>,
    certificates: Vec<Value>,
    theorems: Vec<&'static str>,
}

impl Outcome {
    fn undecided(reason: String) -> Self {
        Outcome {
            verdict: Verdict::Undecided,
            reason,
            witness: None,
            certificates: Vec::new(),
            theorems: Vec::new(),
        }
    }
}

/// Decision state for one generating set. Shared steps (the FSI class,
/// hypothesis checks, CEP and AP) are computed once and reused.
pub struct Session {
    g: GeneratorSet,
    options: DecideOptions,
    k: Option<AlgebraSet>,
    cd: Option<Hypothesis>,
    arithmetical: Option<Hypothesis>,
    sub_closed: Option<(bool, Option<Value>)>,
    outcomes: BTreeMap<&'static str, Outcome>,
    timings: BTreeMap<String, f64>,
}

impl Session {
    pub fn new(g: GeneratorSet, options: DecideOptions) -> Self {
        Session {
            g,
            options,
            k: None,
            cd: None,
            arithmetical: None,
            sub_closed: None,
            outcomes: BTreeMap::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.g
    }

    fn timed<T>(&mut self, phase: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self);
        let ms = start.elapsed().as_secs_f64() * 1e3;
        *self.timings.entry(phase.to_string()).or_insert(0.0) += ms;
        out
    }

    /// The FSI members of the generated variety, up to isomorphism.
    pub fn fsi_class(&mut self) -> Result<&AlgebraSet> {
        if self.k.is_none() {
            let k = self.timed("fsi_star", |s| fsi_star(&s.g))?;
            self.k = Some(k);
        }
        Ok(self.k.as_ref().expect("just computed"))
    }

    pub fn cd(&mut self) -> Hypothesis {
        if self.cd.is_none() {
            let h = if self.options.assume_cd {
                Hypothesis::new(Status::Assumed, "--assume-cd")
            } else {
                let t = self.timed("cd", |s| Ok(has_jonsson_terms(&s.g))).expect("infallible");
                Hypothesis::new(detection_status(t.verdict), t.evidence)
            };
            self.cd = Some(h);
        }
        self.cd.clone().expect("just computed")
    }

    pub fn arithmetical(&mut self) -> Hypothesis {
        if self.arithmetical.is_none() {
            let h = if self.options.assume_arithmetical {
                Hypothesis::new(Status::Assumed, "--assume-arithmetical")
            } else {
                let (m, j) = self
                    .timed("arithmetical", |s| Ok((has_malcev_term(&s.g), has_jonsson_terms(&s.g))))
                    .expect("infallible");
                let status = match (m.verdict, j.verdict) {
                    (Detection::Yes, Detection::Yes) => Status::Yes,
                    (Detection::No, _) | (_, Detection::No) => Status::No,
                    _ => Status::Unknown,
                };
                Hypothesis::new(status, format!("{}; {}", m.evidence, j.evidence))
            };
            self.arithmetical = Some(h);
        }
        self.arithmetical.clone().expect("just computed")
    }

    fn sub_closed(&mut self) -> Result<(bool, Option<Value>)> {
        if self.sub_closed.is_none() {
            let limits = *self.g.limits();
            self.fsi_class()?;
            let closure = self.timed("fsi_sub_closed", |s| fsi_sub_closed(s.k.as_ref().expect("computed"), &limits))?;
            self.sub_closed = Some((closure.holds, closure.witness_json()));
        }
        Ok(self.sub_closed.clone().expect("just computed"))
    }

    fn audit(&mut self) -> Result<HypothesisAudit> {
        let k = self.fsi_class()?;
        let (fsi_star_size, trivial_in_fsi) = (k.len(), k.has_trivial());
        let (holds, witness) = self.sub_closed()?;
        let cd = self.cd();
        let arithmetical = self
            .arithmetical
            .clone()
            .unwrap_or_else(|| Hypothesis::new(Status::Unknown, "not evaluated: not required for this property"));
        Ok(HypothesisAudit {
            cd,
            arithmetical,
            fsi_sub_closed: SubClosedAudit { holds, witness },
            trivial_in_fsi,
            fsi_star_size,
        })
    }

    fn require_cd(&mut self) -> Option<String> {
        let h = self.cd();
        (!h.status.verified()).then(|| format!("hypothesis `cd` is {}: {}", h.status.as_str(), h.evidence))
    }

    fn require_arithmetical(&mut self) -> Option<String> {
        let h = self.arithmetical();
        (!h.status.verified()).then(|| format!("hypothesis `arithmetical` is {}: {}", h.status.as_str(), h.evidence))
    }

    fn require_sub_closed(&mut self) -> Result<Option<String>> {
        let (holds, _) = self.sub_closed()?;
        Ok((!holds).then(|| "hypothesis `fsi_sub_closed` fails: an FSI member has a subalgebra that is not FSI".into()))
    }

    fn class_check(&mut self, property: ClassProperty, phase: &str) -> Result<ClassCheck> {
        let limits = *self.g.limits();
        self.fsi_class()?;
        self.timed(phase, |s| class_check(s.k.as_ref().expect("computed"), property, &limits))
    }

    fn outcome(&mut self, p: Property) -> Result<Outcome> {
        if let Some(o) = self.outcomes.get(p.as_str()) {
            return Ok(o.clone());
        }
        self.fsi_class()?;
        let o = match p {
            Property::Cep => self.cep()?,
            Property::Ep => self.ep()?,
            Property::Ap => self.ap()?,
            Property::Tip => self.tip()?,
            Property::Se => self.se()?,
            Property::Sap => self.sap()?,
        };
        self.outcomes.insert(p.as_str(), o.clone());
        Ok(o)
    }

    fn cep(&mut self) -> Result<Outcome> {
        if let Some(reason) = self.require_cd() {
            return Ok(Outcome::undecided(reason));
        }
        let limits = *self.g.limits();
        // A failing generator settles the question directly.
        let gens: Vec<Arc<FiniteAlgebra>> = self.g.generators().iter().cloned().map(Arc::new).collect();
        let members: Vec<Arc<FiniteAlgebra>> = self.k.as_ref().expect("computed").members().to_vec();
        let mut checked = 0;
        for (is_generator, b) in gens.iter().map(|b| (true, b)).chain(members.iter().map(|b| (false, b))) {
            let check = self.timed("cep", |_| has_cep(b, &limits))?;
            checked += 1;
            if let Some(failure) = check.failure {
                let theorems = if is_generator { vec![] } else { vec![THM_JONSSON, THM_CEP] };
                // Raw subuniverses and their isomorphism types, for comparison
                // with listings that count only the latter.
                let subs = b.all_subuniverses(limits.max_subuniverses)?;
                let types = AlgebraSet::from_algebras(subs.iter().map(|s| b.subalgebra(s)).collect::<Result<Vec<_>>>()?)?;
                return Ok(Outcome {
                    verdict: Verdict::False,
                    reason: format!(
                        "`{}` {} fails the CEP",
                        b.name(),
                        if is_generator { "(a generator)" } else { "(an FSI member)" }
                    ),
                    witness: Some(json!({
                        "cep_failure": cep_failure_json(b, &failure),
                        "subuniverses": { "raw": subs.len(), "up_to_isomorphism": types.len() },
                    })),
                    certificates: Vec::new(),
                    theorems,
                });
            }
        }
        Ok(Outcome {
            verdict: Verdict::True,
            reason: format!("all {} FSI members have the CEP ({checked} algebras checked)", members.len()),
            witness: None,
            certificates: Vec::new(),
            theorems: vec![THM_JONSSON, THM_CEP],
        })
    }

    fn ep(&mut self) -> Result<Outcome> {
        let mut o = self.outcome(Property::Cep)?;
        if o.verdict.is_decided() {
            o.reason = format!("same as the CEP: {}", o.reason);
            o.theorems.push(THM_EP);
        }
        Ok(o)
    }

    fn ap(&mut self) -> Result<Outcome> {
        let cep = self.outcome(Property::Cep)?;
        match cep.verdict {
            Verdict::Undecided => return Ok(cep),
            Verdict::False => {
                let mut theorems = cep.theorems.clone();
                theorems.push(THM_KEARNES);
                return Ok(Outcome {
                    verdict: Verdict::False,
                    reason: format!("the CEP fails, so the AP fails: {}", cep.reason),
                    witness: cep.witness,
                    certificates: Vec::new(),
                    theorems,
                });
            }
            Verdict::True => {}
        }
        if let Some(reason) = self.require_sub_closed()? {
            return Ok(Outcome::undecided(reason));
        }
        let check = self.class_check(ClassProperty::OneAp, "one_sided_ap")?;
        let mut theorems = cep.theorems.clone();
        theorems.push(THM_AP);
        Ok(Outcome {
            verdict: Verdict::from_bool(check.holds),
            reason: if check.holds {
                format!("every doubly injective FSI span ({}) has a one-sided amalgam", check.checked)
            } else {
                "a doubly injective FSI span has no one-sided amalgam in K".into()
            },
            witness: check.counterexample.as_ref().map(|c| c.to_json()),
            certificates: if check.holds { certificates_json(&check) } else { Vec::new() },
            theorems,
        })
    }

    fn tip(&mut self) -> Result<Outcome> {
        let cep = self.outcome(Property::Cep)?;
        if cep.verdict == Verdict::False {
            let mut theorems = cep.theorems.clone();
            theorems.extend([THM_EP, THM_TIP]);
            return Ok(Outcome {
                verdict: Verdict::False,
                reason: format!("the extension property fails: {}", cep.reason),
                witness: cep.witness,
                certificates: Vec::new(),
                theorems,
            });
        }
        let ap = self.outcome(Property::Ap)?;
        let verdict = cep.verdict.and(ap.verdict);
        let mut theorems = ap.theorems.clone();
        theorems.extend([THM_EP, THM_TIP]);
        Ok(match verdict {
            Verdict::Undecided => Outcome::undecided(ap.reason),
            Verdict::False => Outcome {
                verdict,
                reason: format!("the AP fails: {}", ap.reason),
                witness: ap.witness,
                certificates: Vec::new(),
                theorems,
            },
            Verdict::True => Outcome {
                verdict,
                reason: "the CEP and the AP both hold".into(),
                witness: None,
                certificates: ap.certificates,
                theorems,
            },
        })
    }

    fn se(&mut self) -> Result<Outcome> {
        if let Some(reason) = self.require_arithmetical() {
            return Ok(Outcome::undecided(reason));
        }
        if let Some(reason) = self.require_sub_closed()? {
            return Ok(Outcome::undecided(reason));
        }
        let check = self.class_check(ClassProperty::Se, "se")?;
        Ok(Outcome {
            verdict: Verdict::from_bool(check.holds),
            reason: if check.holds {
                format!("no FSI member has a proper epic subalgebra ({} checked)", check.checked)
            } else {
                "an FSI member has a proper epic subalgebra".into()
            },
            witness: check.counterexample.as_ref().map(|c| c.to_json()),
            certificates: Vec::new(),
            theorems: vec![THM_JONSSON, THM_SE],
        })
    }

    fn sap(&mut self) -> Result<Outcome> {
        let ap = self.outcome(Property::Ap)?;
        if ap.verdict == Verdict::False {
            let mut theorems = ap.theorems.clone();
            theorems.push(THM_ISBELL);
            return Ok(Outcome {
                verdict: Verdict::False,
                reason: format!("the AP fails: {}", ap.reason),
                witness: ap.witness,
                certificates: Vec::new(),
                theorems,
            });
        }
        let se = self.outcome(Property::Se)?;
        let verdict = ap.verdict.and(se.verdict);
        let mut theorems = ap.theorems.clone();
        theorems.extend(se.theorems.iter().copied().filter(|t| *t != THM_JONSSON));
        theorems.push(THM_ISBELL);
        match verdict {
            Verdict::Undecided => {
                let reason = if ap.verdict == Verdict::Undecided { ap.reason } else { se.reason };
                Ok(Outcome::undecided(reason))
            }
            Verdict::False => Ok(Outcome {
                verdict,
                reason: format!("SE fails: {}", se.reason),
                witness: se.witness,
                certificates: Vec::new(),
                theorems,
            }),
            Verdict::True => {
                let strong = self.class_check(ClassProperty::SapSpans, "strong_spans")?;
                let mut certificates = ap.certificates.clone();
                let mut reason = "the AP and SE both hold".to_string();
                if strong.holds {
                    theorems.push(THM_STRONG_SPANS);
                    reason.push_str("; every doubly injective FSI span also has a strong amalgam in K");
                    certificates = certificates_json(&strong);
                }
                Ok(Outcome {
                    verdict,
                    reason,
                    witness: None,
                    certificates,
                    theorems,
                })
            }
        }
    }

    pub fn decide(&mut self, property: Property) -> Result<DecisionReport> {
        let o = self.outcome(property)?;
        let audit = self.audit()?;
        Ok(self.report(property.as_str().to_string(), o, audit))
    }

    fn report(&self, property: String, o: Outcome, audit: HypothesisAudit) -> DecisionReport {
        let mut theorems_used: Vec<String> = Vec::new();
        for t in o.theorems {
            if !theorems_used.iter().any(|u| u == t) {
                theorems_used.push(t.to_string());
            }
        }
        DecisionReport {
            property,
            verdict: o.verdict,
            reason: o.reason,
            generators: self.g.generators().iter().map(|a| a.name().to_string()).collect(),
            audit,
            witness: o.witness,
            certificates: o.certificates,
            theorems_used,
            timings: if self.options.timings {
                self.timings.clone()
            } else {
                BTreeMap::new()
            },
        }
    }
}

fn detection_status(d: Detection) -> Status {
    match d {
        Detection::Yes => Status::Yes,
        Detection::No => Status::No,
        Detection::Unknown => Status::Unknown,
    }
}

fn certificates_json(check: &ClassCheck) -> Vec<Value> {
    check
        .certificates
        .iter()
        .map(|(span, am)| json!({ "span": span.to_json(), "amalgam": am.to_json() }))
        .collect()
}

/// A CEP failure with element labels of the parent algebra.
pub fn cep_failure_json(b: &FiniteAlgebra, f: &CepFailure) -> Value {
    let members = f.subuniverse.members();
    let lab = |x: usize| b.label(x);
    let theta_blocks: Vec<Vec<String>> = f
        .theta
        .blocks()
        .iter()
        .map(|blk| blk.iter().map(|&i| lab(members[i])).collect())
        .collect();
    json!({
        "B": b.name(),
        "A": members,
        "A_labels": members.iter().map(|&m| lab(m)).collect::<Vec<_>>(),
        "theta": theta_blocks,
        "pair": [lab(f.pair.0), lab(f.pair.1)],
        "generated": f.generated.blocks().iter().map(|blk| blk.iter().map(|&x| lab(x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "generated_is_total": f.generated.is_total(),
    })
}

/// Runs the decision pipeline for one property.
pub fn decide(property: Property, g: &GeneratorSet, options: DecideOptions) -> Result<DecisionReport> {
    Session::new(g.clone(), options).decide(property)
}

/// Checks the sufficient criterion for the AP of the join `V(G₁) ∨ V(G₂)`.
/// TRUE means the criterion is met; UNDECIDED means it is not, which says
/// nothing about the join.
pub fn check_join_ap(g1: &GeneratorSet, g2: &GeneratorSet, options: DecideOptions) -> Result<DecisionReport> {
    g1.generators()[0].check_same_signature(&g2.generators()[0])?;
    let mut s1 = Session::new(g1.clone(), options);
    let mut s2 = Session::new(g2.clone(), options);
    let mut theorems: Vec<&'static str> = Vec::new();
    let audit = |s: &mut Session| s.audit();
    let mut blocked: Option<(String, Option<Value>)> = None;
    'hyp: for (side, s) in [("first", &mut s1), ("second", &mut s2)] {
        for p in [Property::Cep, Property::Ap] {
            let o = s.outcome(p)?;
            theorems.extend(o.theorems.iter().copied());
            if o.verdict != Verdict::True {
                blocked = Some((
                    format!("{p} of the {side} variety is {}: {}", o.verdict.as_str(), o.reason),
                    o.witness,
                ));
                break 'hyp;
            }
        }
    }
    let audit1 = audit(&mut s1)?;
    let audit2 = audit(&mut s2)?;
    if blocked.is_none() {
        let k1 = s1.fsi_class()?.clone();
        let k2 = s2.fsi_class()?.clone();
        let limits = *g1.limits();
        blocked = retract_failure(&k1, &k2, &limits)?;
    }
    theorems.push(THM_JOIN_AP);
    let mut audit = audit1.clone();
    audit.cd.evidence = format!("first: {}; second: {}", audit1.cd.evidence, audit2.cd.evidence);
    audit.cd.status = weaker(audit1.cd.status, audit2.cd.status);
    audit.fsi_sub_closed.holds = audit1.fsi_sub_closed.holds && audit2.fsi_sub_closed.holds;
    if audit.fsi_sub_closed.witness.is_none() {
        audit.fsi_sub_closed.witness = audit2.fsi_sub_closed.witness.clone();
    }
    audit.fsi_star_size = audit1.fsi_star_size + audit2.fsi_star_size;
    audit.trivial_in_fsi = audit1.trivial_in_fsi || audit2.trivial_in_fsi;
    let o = match blocked {
        Some((reason, witness)) => Outcome {
            verdict: Verdict::Undecided,
            reason: format!("criterion not met: {reason}"),
            witness,
            certificates: Vec::new(),
            theorems,
        },
        None => Outcome {
            verdict: Verdict::True,
            reason: "both varieties have the CEP and AP, and shared FSI members are retracts".into(),
            witness: None,
            certificates: Vec::new(),
            theorems,
        },
    };
    let mut gens = g1.generators().to_vec();
    gens.extend(g2.generators().iter().cloned());
    let joined = Session::new(GeneratorSet::new(gens, *g1.limits())?, options);
    let mut report = joined.report("JOIN_AP".into(), o, audit);
    report.timings = if options.timings {
        let mut t = BTreeMap::new();
        for (k, v) in s1.timings.iter().chain(s2.timings.iter()) {
            *t.entry(k.clone()).or_insert(0.0) += v;
        }
        t
    } else {
        BTreeMap::new()
    };
    Ok(report)
}

fn weaker(a: Status, b: Status) -> Status {
    let rank = |s: Status| match s {
        Status::Yes => 3,
        Status::Assumed => 2,
        Status::Unknown => 1,
        Status::No => 0,
    };
    if rank(a) <= rank(b) {
        a
    } else {
        b
    }
}

/// The first copy of a shared FSI member inside a member of `K₁ ∪ K₂` that
/// is not a retract.
fn retract_failure(
    k1: &AlgebraSet,
    k2: &AlgebraSet,
    limits: &crate::limits::Limits,
) -> Result<Option<(String, Option<Value>)>> {
    let shared: Vec<_> = k1.forms().iter().filter(|f| k2.position_of_form(f).is_some()).cloned().collect();
    for b in k1.members().iter().chain(k2.members().iter()) {
        for sub in b.all_subuniverses(limits.max_subuniverses)? {
            let a = b.subalgebra(&sub)?;
            if !shared.contains(&canonical_form(&a)) {
                continue;
            }
            if is_retract(b, &sub)?.is_none() {
                return Ok(Some((
                    format!("a shared FSI member is not a retract of `{}`", b.name()),
                    Some(retract_witness(b, &sub)),
                )));
            }
        }
    }
    Ok(None)
}

fn retract_witness(b: &FiniteAlgebra, sub: &SubUniverse) -> Value {
    json!({
        "not_a_retract": {
            "B": b.name(),
            "A": sub.members(),
            "A_labels": sub.members().iter().map(|&m| b.label(m)).collect::<Vec<_>>(),
        }
    })
}
