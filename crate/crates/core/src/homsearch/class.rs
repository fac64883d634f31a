use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::amalgam::{search_amalgam_in, Amalgam, AmalgamMode};
use super::span::{spans_over, triples, Span, SpanKind};
use super::{for_each_homomorphism, search_amalgam, Require};
use crate::algebra::{direct_product, Elem, FiniteAlgebra, SubUniverse};
use crate::algebra_set::AlgebraSet;
use crate::error::{Error, Result};
use crate::hom::Homomorphism;
use crate::limits::Limits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ClassProperty {
    #[serde(rename = "EP")]
    Ep,
    #[serde(rename = "1AP")]
    OneAp,
    #[serde(rename = "AP")]
    Ap,
    #[serde(rename = "TIP")]
    Tip,
    #[serde(rename = "SE")]
    Se,
    #[serde(rename = "SAP_spans")]
    SapSpans,
}

impl ClassProperty {
    fn spans(self) -> Option<(SpanKind, AmalgamMode)> {
        match self {
            ClassProperty::Ep => Some((SpanKind::InjectiveSurjective, AmalgamMode::OneSided)),
            ClassProperty::OneAp => Some((SpanKind::DoublyInjective, AmalgamMode::OneSided)),
            ClassProperty::Ap => Some((SpanKind::DoublyInjective, AmalgamMode::Plain)),
            ClassProperty::Tip => Some((SpanKind::Injective, AmalgamMode::OneSided)),
            ClassProperty::SapSpans => Some((SpanKind::DoublyInjective, AmalgamMode::Strong)),
            ClassProperty::Se => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Counterexample {
    /// A span with no amalgam of the required kind.
    Span(Span),
    /// A proper subalgebra through which all pairs of homomorphisms into
    /// the class are determined.
    EpicSubalgebra {
        algebra: Arc<FiniteAlgebra>,
        subuniverse: SubUniverse,
    },
}

impl Counterexample {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Counterexample::Span(s) => json!({ "span": s.to_json() }),
            Counterexample::EpicSubalgebra { algebra, subuniverse } => json!({
                "epic_subalgebra": {
                    "B": algebra.name(),
                    "A": subuniverse.members(),
                    "A_labels": subuniverse.members().iter().map(|&m| algebra.label(m)).collect::<Vec<_>>(),
                }
            }),
        }
    }

    pub fn span(&self) -> Option<&Span> {
        match self {
            Counterexample::Span(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClassCheck {
    pub property: ClassProperty,
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
    /// Spans (or subalgebras, for SE) examined before the verdict.
    pub checked: usize,
    /// A few verified amalgams from the search, in enumeration order.
    pub certificates: Vec<(Span, Amalgam)>,
}

const SAMPLED: usize = 3;

struct TripleOutcome {
    checked: usize,
    failure: Option<Span>,
    certificates: Vec<(Span, Amalgam)>,
}

/// Decides a class-level property of `K` by exhaustive search. Triples of
/// members are processed in parallel; the reported counterexample is the
/// first one in enumeration order whatever the thread count.
pub fn class_check(k: &AlgebraSet, property: ClassProperty, limits: &Limits) -> Result<ClassCheck> {
    let Some((kind, mode)) = property.spans() else {
        return se_check(k, limits);
    };
    let work = triples(k, kind);
    let first_failure = AtomicUsize::new(usize::MAX);
    let members = k.members();
    let outcomes: Vec<Option<TripleOutcome>> = work
        .par_iter()
        .enumerate()
        .map(|(i, &(a, b, c))| -> Result<Option<TripleOutcome>> {
            if i > first_failure.load(Ordering::Relaxed) {
                return Ok(None);
            }
            let spans = spans_over(&members[a], &members[b], &members[c], kind, limits)?;
            let mut out = TripleOutcome {
                checked: 0,
                failure: None,
                certificates: Vec::new(),
            };
            for span in spans {
                out.checked += 1;
                match search_amalgam(&span, k, mode)? {
                    Some(am) => {
                        if out.certificates.len() < SAMPLED {
                            out.certificates.push((span, am));
                        }
                    }
                    None => {
                        out.failure = Some(span);
                        first_failure.fetch_min(i, Ordering::Relaxed);
                        break;
                    }
                }
            }
            Ok(Some(out))
        })
        .collect::<Result<_>>()?;
    let mut result = ClassCheck {
        property,
        holds: true,
        counterexample: None,
        checked: 0,
        certificates: Vec::new(),
    };
    for outcome in outcomes.into_iter().flatten() {
        result.checked += outcome.checked;
        for cert in outcome.certificates {
            if result.certificates.len() < SAMPLED {
                result.certificates.push(cert);
            }
        }
        if let Some(span) = outcome.failure {
            result.holds = false;
            result.counterexample = Some(Counterexample::Span(span));
            break;
        }
    }
    Ok(result)
}

fn se_check(k: &AlgebraSet, limits: &Limits) -> Result<ClassCheck> {
    let mut checked = 0;
    for b in k.members() {
        for sub in b.all_subuniverses(limits.max_subuniverses)? {
            if sub.len() == b.size() {
                continue;
            }
            checked += 1;
            if is_epic_subalgebra(b, &sub, k)? {
                return Ok(ClassCheck {
                    property: ClassProperty::Se,
                    holds: false,
                    counterexample: Some(Counterexample::EpicSubalgebra {
                        algebra: b.clone(),
                        subuniverse: sub,
                    }),
                    checked,
                    certificates: Vec::new(),
                });
            }
        }
    }
    Ok(ClassCheck {
        property: ClassProperty::Se,
        holds: true,
        counterexample: None,
        checked,
        certificates: Vec::new(),
    })
}

/// Whether any two homomorphisms from `B` into a member of `K` that agree
/// on the subuniverse must be equal. `B` must be isomorphic to a member.
pub fn is_epic_subalgebra(b: &FiniteAlgebra, sub: &SubUniverse, k: &AlgebraSet) -> Result<bool> {
    if !k.contains(b) {
        return Err(Error::InvalidInput(format!("`{}` is not in the class", b.name())));
    }
    for c in k.members() {
        let mut by_restriction: HashMap<Vec<Elem>, Homomorphism> = HashMap::new();
        let mut split = false;
        for_each_homomorphism(b, c, &[], Require::None, |h| {
            let key: Vec<Elem> = sub.members().iter().map(|&m| h.apply(m)).collect();
            match by_restriction.get(&key) {
                Some(other) if *other != h => {
                    split = true;
                    ControlFlow::Break(())
                }
                Some(_) => ControlFlow::Continue(()),
                None => {
                    by_restriction.insert(key, h);
                    ControlFlow::Continue(())
                }
            }
        })?;
        if split {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct ProbeResult {
    pub holds: bool,
    pub counterexample: Option<Span>,
    /// Spans closed by pairing the two one-sided amalgams.
    pub paired: usize,
    /// Spans that needed the exhaustive search over products.
    pub exhaustive: usize,
}

/// Whether every doubly injective span in `K` has an amalgam whose target
/// is a product of two members. Pairs a one-sided amalgam with one for the
/// swapped span first, then searches all products `D₁ × D₂`.
pub fn condition4_probe(k: &AlgebraSet, limits: &Limits) -> Result<ProbeResult> {
    let spans = super::enumerate_spans(k, SpanKind::DoublyInjective, limits)?;
    let mut result = ProbeResult {
        holds: true,
        counterexample: None,
        paired: 0,
        exhaustive: 0,
    };
    let mut products: Option<Vec<Arc<FiniteAlgebra>>> = None;
    for span in spans {
        if paired_amalgam(&span, k, limits)?.is_some() {
            result.paired += 1;
            continue;
        }
        if products.is_none() {
            products = Some(binary_products(k, limits)?);
        }
        let products = products.as_ref().expect("just filled");
        let mut found = false;
        for d in products.iter() {
            if d.size() < span.b.size().max(span.c.size()) {
                continue;
            }
            if search_amalgam_in(&span, d, AmalgamMode::Plain)?.is_some() {
                found = true;
                break;
            }
        }
        if found {
            result.exhaustive += 1;
        } else {
            result.holds = false;
            result.counterexample = Some(span);
            break;
        }
    }
    Ok(result)
}

/// The amalgam in `D_B × D_C` built from a one-sided amalgam of the span
/// (into `D_C`) and one of the swapped span (into `D_B`).
pub fn paired_amalgam(span: &Span, k: &AlgebraSet, limits: &Limits) -> Result<Option<Amalgam>> {
    let Some(right) = search_amalgam(span, k, AmalgamMode::OneSided)? else {
        return Ok(None);
    };
    let Some(left) = search_amalgam(&span.swapped(), k, AmalgamMode::OneSided)? else {
        return Ok(None);
    };
    // left: psi_b is a hom C -> D_B, psi_c an embedding B -> D_B
    let (db, dc) = (&left.target, &right.target);
    if db.size().saturating_mul(dc.size()) > limits.max_algebra_size {
        return Err(Error::resource("paired amalgam size", limits.max_algebra_size));
    }
    let (d, _) = direct_product(&[db, dc])?;
    let m = dc.size();
    let psi_b = Homomorphism::new(
        (0..span.b.size())
            .map(|x| left.psi_c.apply(x) * m + right.psi_b.apply(x))
            .collect(),
        d.size(),
    );
    let psi_c = Homomorphism::new(
        (0..span.c.size())
            .map(|x| left.psi_b.apply(x) * m + right.psi_c.apply(x))
            .collect(),
        d.size(),
    );
    let am = Amalgam {
        target: Arc::new(d),
        target_index: None,
        psi_b,
        psi_c,
        strong: false,
    };
    super::verify_amalgam(span, &am, AmalgamMode::Plain).map_err(Error::InternalContradiction)?;
    Ok(Some(am))
}

fn binary_products(k: &AlgebraSet, limits: &Limits) -> Result<Vec<Arc<FiniteAlgebra>>> {
    let mut out = Vec::new();
    for (i, x) in k.members().iter().enumerate() {
        for y in &k.members()[i..] {
            if x.size() * y.size() > limits.max_algebra_size {
                continue;
            }
            out.push(Arc::new(direct_product(&[x, y])?.0));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn k_of(algs: Vec<FiniteAlgebra>) -> AlgebraSet {
        AlgebraSet::from_algebras(algs).unwrap()
    }

    #[test]
    fn distributive_fsi_class() {
        let k = k_of(vec![catalog::chain_lattice(1), catalog::chain_lattice(2)]);
        let lim = Limits::default();
        assert!(class_check(&k, ClassProperty::OneAp, &lim).unwrap().holds);
        let ap = class_check(&k, ClassProperty::Ap, &lim).unwrap();
        assert!(!ap.holds);
        let span = ap.counterexample.unwrap().span().unwrap().clone();
        assert!(span.a.is_trivial() && span.b.size() == 2 && span.c.size() == 2);
        assert_ne!(span.phi_b.image(), span.phi_c.image());
        assert!(condition4_probe(&k, &lim).unwrap().holds);
    }

    #[test]
    fn trivial_class_has_everything() {
        let k = k_of(vec![catalog::chain_lattice(1)]);
        let lim = Limits::default();
        for p in [
            ClassProperty::Ep,
            ClassProperty::OneAp,
            ClassProperty::Ap,
            ClassProperty::Tip,
            ClassProperty::Se,
            ClassProperty::SapSpans,
        ] {
            assert!(class_check(&k, p, &lim).unwrap().holds, "{p:?}");
        }
    }

    #[test]
    fn epic_subalgebras() {
        let k = k_of(vec![catalog::chain_lattice(1), catalog::chain_lattice(2)]);
        let l2 = catalog::chain_lattice(2);
        assert!(is_epic_subalgebra(&l2, &SubUniverse::full(&l2), &k).unwrap());
        let bottom = SubUniverse::new(&l2, vec![0]).unwrap();
        assert!(!is_epic_subalgebra(&l2, &bottom, &k).unwrap());
        let l3 = catalog::chain_lattice(3);
        assert!(is_epic_subalgebra(&l3, &bottom, &k).is_err());
    }

    #[test]
    fn se_counterexamples_are_epic() {
        let k = k_of(vec![catalog::chain_lattice(1), catalog::chain_lattice(2)]);
        let se = class_check(&k, ClassProperty::Se, &Limits::default()).unwrap();
        assert!(se.holds);
    }
}
