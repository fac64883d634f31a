use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    True,
    False,
    Undecided,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::True => "TRUE",
            Verdict::False => "FALSE",
            Verdict::Undecided => "UNDECIDED",
        }
    }

    pub fn is_decided(self) -> bool {
        self != Verdict::Undecided
    }

    /// Three-valued conjunction: FALSE wins, then UNDECIDED.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            (Verdict::True, Verdict::True) => Verdict::True,
            _ => Verdict::Undecided,
        }
    }
}

/// Status of a hypothesis. `Assumed` only ever comes from a user flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Yes,
    No,
    Unknown,
    Assumed,
}

impl Status {
    pub fn verified(self) -> bool {
        matches!(self, Status::Yes | Status::Assumed)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Yes => "YES",
            Status::No => "NO",
            Status::Unknown => "UNKNOWN",
            Status::Assumed => "ASSUMED",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub status: Status,
    pub evidence: String,
}

impl Hypothesis {
    pub fn new(status: Status, evidence: impl Into<String>) -> Self {
        Hypothesis {
            status,
            evidence: evidence.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubClosedAudit {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisAudit {
    /// Congruence distributivity.
    pub cd: Hypothesis,
    /// Congruence distributivity and permutability. Evaluated only for the
    /// properties that need it.
    pub arithmetical: Hypothesis,
    pub fsi_sub_closed: SubClosedAudit,
    pub trivial_in_fsi: bool,
    pub fsi_star_size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecisionReport {
    pub property: String,
    pub verdict: Verdict,
    /// One line on how the verdict was reached, or which hypothesis blocked it.
    pub reason: String,
    pub generators: Vec<String>,
    pub audit: HypothesisAudit,
    pub witness: Option<Value>,
    /// Sampled verified amalgams backing a TRUE verdict.
    pub certificates: Vec<Value>,
    pub theorems_used: Vec<String>,
    /// Milliseconds per phase; empty unless timings were requested.
    pub timings: BTreeMap<String, f64>,
}

impl DecisionReport {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "schema": SCHEMA_VERSION,
            "property": self.property,
            "verdict": self.verdict,
            "reason": self.reason,
            "generators": self.generators,
            "audit": self.audit,
            "certificates": self.certificates,
            "theorems_used": self.theorems_used,
            "timings": self.timings,
        });
        if let Some(w) = &self.witness {
            v["witness"] = w.clone();
        }
        v
    }

    pub fn to_json_string(&self) -> String {
        crate::format::to_pretty(&self.to_json())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} for V({}): {}", self.property, self.generators.join(", "), self.verdict.as_str());
        let _ = writeln!(out, "  {}", self.reason);
        let a = &self.audit;
        let _ = writeln!(out, "  congruence distributive: {} ({})", a.cd.status.as_str(), a.cd.evidence);
        let _ = writeln!(
            out,
            "  arithmetical: {} ({})",
            a.arithmetical.status.as_str(),
            a.arithmetical.evidence
        );
        let _ = writeln!(
            out,
            "  FSI class: {} members, closed under subalgebras: {}, contains trivial: {}",
            a.fsi_star_size,
            if a.fsi_sub_closed.holds { "yes" } else { "no" },
            if a.trivial_in_fsi { "yes" } else { "no" }
        );
        for t in &self.theorems_used {
            let _ = writeln!(out, "  using {t}");
        }
        if let Some(w) = &self.witness {
            let _ = writeln!(out, "  witness: {w}");
        }
        if !self.certificates.is_empty() {
            let _ = writeln!(out, "  {} sampled certificates attached", self.certificates.len());
        }
        for (phase, ms) in &self.timings {
            let _ = writeln!(out, "  {phase}: {ms:.1} ms");
        }
        out
    }
}
