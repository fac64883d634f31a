use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{for_each_homomorphism, Require, Span, SpanKind};
use crate::algebra::{direct_product, Elem, FiniteAlgebra};
use crate::algebra_set::AlgebraSet;
use crate::error::{Error, Result};
use crate::hom::Homomorphism;
use crate::limits::Limits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AmalgamMode {
    /// Both legs embeddings.
    Plain,
    /// `ψ_C` an embedding, `ψ_B` any homomorphism.
    OneSided,
    /// Plain, and the images meet exactly in the image of `A`.
    Strong,
}

/// `ψ_B: B → D` and `ψ_C: C → D` closing a span.
#[derive(Clone, Debug)]
pub struct Amalgam {
    pub target: Arc<FiniteAlgebra>,
    /// Position of the target in the class searched, when it came from one.
    pub target_index: Option<usize>,
    pub psi_b: Homomorphism,
    pub psi_c: Homomorphism,
    pub strong: bool,
}

impl Amalgam {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "D": self.target.name(),
            "psiB": self.psi_b.image(),
            "psiC": self.psi_c.image(),
            "strong": self.strong,
        })
    }
}

fn is_strong(span: &Span, psi_b: &Homomorphism, psi_c: &Homomorphism, target_size: usize) -> bool {
    let mut in_b = vec![false; target_size];
    for &v in psi_b.image() {
        in_b[v] = true;
    }
    let mut in_a = vec![false; target_size];
    for &v in psi_b.after(&span.phi_b).image() {
        in_a[v] = true;
    }
    psi_c.image().iter().all(|&v| !in_b[v] || in_a[v])
}

/// Checks an amalgam from scratch against the span: both legs are
/// homomorphisms, the square commutes, the legs are injective as the mode
/// demands, and the intersection condition holds when claimed.
pub fn verify_amalgam(span: &Span, am: &Amalgam, mode: AmalgamMode) -> Result<(), String> {
    let d = &am.target;
    if !am.psi_b.is_homomorphism(&span.b, d) {
        return Err("psiB is not a homomorphism".into());
    }
    if !am.psi_c.is_homomorphism(&span.c, d) {
        return Err("psiC is not a homomorphism".into());
    }
    for x in 0..span.a.size() {
        if am.psi_b.apply(span.phi_b.apply(x)) != am.psi_c.apply(span.phi_c.apply(x)) {
            return Err(format!("square does not commute at {}", span.a.label(x)));
        }
    }
    if !am.psi_c.is_injective() {
        return Err("psiC is not injective".into());
    }
    if mode != AmalgamMode::OneSided && !am.psi_b.is_injective() {
        return Err("psiB is not injective".into());
    }
    let strong = is_strong(span, &am.psi_b, &am.psi_c, d.size());
    if (mode == AmalgamMode::Strong || am.strong) && !strong {
        return Err("images meet outside the image of A".into());
    }
    Ok(())
}

/// First amalgam of `span` in `K` for `mode`: targets in class order, then
/// embeddings of `C`, then legs from `B` forced to commute on `A`.
pub fn search_amalgam(span: &Span, k: &AlgebraSet, mode: AmalgamMode) -> Result<Option<Amalgam>> {
    if mode != AmalgamMode::OneSided && span.kind != SpanKind::DoublyInjective {
        return Err(Error::InvalidInput(
            "plain and strong amalgams are defined for doubly injective spans".into(),
        ));
    }
    let require_b = if mode == AmalgamMode::OneSided {
        Require::None
    } else {
        Require::Injective
    };
    for (di, d) in k.members().iter().enumerate() {
        if d.size() < span.c.size() || (require_b == Require::Injective && d.size() < span.b.size()) {
            continue;
        }
        if let Some(am) = search_in(span, d, mode, require_b)? {
            let am = Amalgam {
                target_index: Some(di),
                ..am
            };
            verify_amalgam(span, &am, mode).map_err(Error::InternalContradiction)?;
            return Ok(Some(am));
        }
    }
    Ok(None)
}

/// Amalgam search with a fixed target.
pub fn search_amalgam_in(span: &Span, d: &Arc<FiniteAlgebra>, mode: AmalgamMode) -> Result<Option<Amalgam>> {
    let require_b = if mode == AmalgamMode::OneSided {
        Require::None
    } else {
        Require::Injective
    };
    let found = search_in(span, d, mode, require_b)?;
    if let Some(am) = &found {
        verify_amalgam(span, am, mode).map_err(Error::InternalContradiction)?;
    }
    Ok(found)
}

fn search_in(span: &Span, d: &Arc<FiniteAlgebra>, mode: AmalgamMode, require_b: Require) -> Result<Option<Amalgam>> {
    let mut result = None;
    let mut inner_err = None;
    for_each_homomorphism(&span.c, d, &[], Require::Injective, |psi_c| {
        let constraints: Vec<(Elem, Elem)> = (0..span.a.size())
            .map(|x| (span.phi_b.apply(x), psi_c.apply(span.phi_c.apply(x))))
            .collect();
        let outcome = for_each_homomorphism(&span.b, d, &constraints, require_b, |psi_b| {
            let strong = is_strong(span, &psi_b, &psi_c, d.size());
            if mode == AmalgamMode::Strong && !strong {
                return ControlFlow::Continue(());
            }
            result = Some(Amalgam {
                target: d.clone(),
                target_index: None,
                psi_b,
                psi_c: psi_c.clone(),
                strong: strong && mode != AmalgamMode::OneSided,
            });
            ControlFlow::Break(())
        });
        if let Err(e) = outcome {
            inner_err = Some(e);
            return ControlFlow::Break(());
        }
        if result.is_some() {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    if let Some(e) = inner_err {
        return Err(e);
    }
    Ok(result)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    B,
    C,
}

/// A target with homomorphisms from `B` and `C` that commute over the span
/// and separate `x` from `y` on the given side.
#[derive(Clone, Debug)]
pub struct PairWitness {
    pub side: Side,
    pub x: Elem,
    pub y: Elem,
    pub target: Arc<FiniteAlgebra>,
    pub psi_b: Homomorphism,
    pub psi_c: Homomorphism,
}

impl PairWitness {
    fn check(&self, span: &Span) -> Result<()> {
        let bad = |what: &str| {
            Error::WitnessInvalid(format!(
                "witness for ({}, {}) on side {:?} into `{}`: {what}",
                self.x,
                self.y,
                self.side,
                self.target.name()
            ))
        };
        if !self.psi_b.is_homomorphism(&span.b, &self.target) || !self.psi_c.is_homomorphism(&span.c, &self.target) {
            return Err(bad("not a homomorphism"));
        }
        if (0..span.a.size()).any(|a| self.psi_b.apply(span.phi_b.apply(a)) != self.psi_c.apply(span.phi_c.apply(a))) {
            return Err(bad("square does not commute"));
        }
        let leg = match self.side {
            Side::B => &self.psi_b,
            Side::C => &self.psi_c,
        };
        if self.x >= leg.domain_size() || self.y >= leg.domain_size() || leg.apply(self.x) == leg.apply(self.y) {
            return Err(bad("pair not separated"));
        }
        Ok(())
    }
}

/// The amalgam whose target is the product of the witnesses' targets, with
/// tuple maps as legs. Identical witnesses contribute one factor. The empty
/// family gives the one-element algebra.
pub fn product_amalgam(span: &Span, witnesses: &[PairWitness], limits: &Limits) -> Result<Amalgam> {
    for w in witnesses {
        w.check(span)?;
    }
    let mut factors: Vec<&PairWitness> = Vec::new();
    for w in witnesses {
        if !factors
            .iter()
            .any(|f| f.target == w.target && f.psi_b == w.psi_b && f.psi_c == w.psi_c)
        {
            factors.push(w);
        }
    }
    let size = factors
        .iter()
        .try_fold(1usize, |acc, f| acc.checked_mul(f.target.size()))
        .filter(|&s| s <= limits.max_algebra_size)
        .ok_or_else(|| Error::resource("product amalgam size", limits.max_algebra_size))?;
    type Encoder = Box<dyn Fn(&[Elem]) -> Elem>;
    let (target, encode): (FiniteAlgebra, Encoder) = if factors.is_empty() {
        (FiniteAlgebra::trivial(span.a.signature().clone()), Box::new(|_| 0))
    } else {
        let targets: Vec<&FiniteAlgebra> = factors.iter().map(|f| f.target.as_ref()).collect();
        let (p, _) = direct_product(&targets)?;
        let sizes: Vec<usize> = targets.iter().map(|t| t.size()).collect();
        (
            p,
            Box::new(move |coords: &[Elem]| coords.iter().zip(&sizes).fold(0, |acc, (&c, &s)| acc * s + c)),
        )
    };
    debug_assert_eq!(target.size(), size);
    let leg = |n: usize, pick: &dyn Fn(&PairWitness) -> &Homomorphism| {
        let image = (0..n)
            .map(|x| {
                let coords: Vec<Elem> = factors.iter().map(|f| pick(f).apply(x)).collect();
                encode(&coords)
            })
            .collect();
        Homomorphism::new(image, size)
    };
    let psi_b = leg(span.b.size(), &|f| &f.psi_b);
    let psi_c = leg(span.c.size(), &|f| &f.psi_c);
    let target = Arc::new(target);
    let strong = span.kind == SpanKind::DoublyInjective && is_strong(span, &psi_b, &psi_c, size);
    let am = Amalgam {
        target,
        target_index: None,
        psi_b,
        psi_c,
        strong,
    };
    verify_amalgam(span, &am, AmalgamMode::Plain).map_err(|e| Error::WitnessInvalid(format!("product: {e}")))?;
    Ok(am)
}

/// For every pair of distinct elements of `B` and of `C`, the first
/// separating witness found in `K`, or `None` when some pair has none.
pub fn separating_witnesses(span: &Span, k: &AlgebraSet) -> Result<Option<Vec<PairWitness>>> {
    let mut out = Vec::new();
    for side in [Side::B, Side::C] {
        let n = match side {
            Side::B => span.b.size(),
            Side::C => span.c.size(),
        };
        for x in 0..n {
            for y in x + 1..n {
                if let Some(w) = out.iter().find(|w: &&PairWitness| {
                    let leg = match side {
                        Side::B => &w.psi_b,
                        Side::C => &w.psi_c,
                    };
                    leg.apply(x) != leg.apply(y)
                }) {
                    let reuse = PairWitness {
                        side,
                        x,
                        y,
                        ..w.clone()
                    };
                    out.push(reuse);
                    continue;
                }
                match find_separating(span, k, side, x, y)? {
                    Some(w) => out.push(w),
                    None => return Ok(None),
                }
            }
        }
    }
    Ok(Some(out))
}

fn find_separating(span: &Span, k: &AlgebraSet, side: Side, x: Elem, y: Elem) -> Result<Option<PairWitness>> {
    for d in k.members() {
        let mut found = None;
        let mut inner_err = None;
        for_each_homomorphism(&span.c, d, &[], Require::None, |psi_c| {
            let constraints: Vec<(Elem, Elem)> = (0..span.a.size())
                .map(|a| (span.phi_b.apply(a), psi_c.apply(span.phi_c.apply(a))))
                .collect();
            let r = for_each_homomorphism(&span.b, d, &constraints, Require::None, |psi_b| {
                let leg = match side {
                    Side::B => &psi_b,
                    Side::C => &psi_c,
                };
                if leg.apply(x) != leg.apply(y) {
                    found = Some(PairWitness {
                        side,
                        x,
                        y,
                        target: d.clone(),
                        psi_b: psi_b.clone(),
                        psi_c: psi_c.clone(),
                    });
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            if let Err(e) = r {
                inner_err = Some(e);
                return ControlFlow::Break(());
            }
            if found.is_some() {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        if let Some(e) = inner_err {
            return Err(e);
        }
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn point_span() -> Span {
        let t = Arc::new(catalog::chain_lattice(1));
        let l2 = Arc::new(catalog::chain_lattice(2));
        Span::new(
            t,
            l2.clone(),
            l2,
            Homomorphism::new(vec![1], 2),
            Homomorphism::new(vec![0], 2),
            SpanKind::DoublyInjective,
        )
        .unwrap()
    }

    fn chains(ks: &[usize]) -> AlgebraSet {
        AlgebraSet::from_algebras(ks.iter().map(|&k| catalog::chain_lattice(k))).unwrap()
    }

    #[test]
    fn two_embeddings_need_three_elements() {
        let span = point_span();
        assert!(search_amalgam(&span, &chains(&[1, 2]), AmalgamMode::Plain).unwrap().is_none());
        let am = search_amalgam(&span, &chains(&[1, 2, 3]), AmalgamMode::Plain).unwrap().unwrap();
        assert_eq!(am.target.size(), 3);
        assert_eq!(am.psi_b.image(), &[0, 1]);
        assert_eq!(am.psi_c.image(), &[1, 2]);
        assert!(search_amalgam(&span, &chains(&[1, 2]), AmalgamMode::OneSided).unwrap().is_some());
    }

    #[test]
    fn identity_span_amalgamates_in_itself() {
        let c4 = Arc::new(catalog::c4());
        let id = Homomorphism::identity(4);
        let span = Span::new(c4.clone(), c4.clone(), c4.clone(), id.clone(), id, SpanKind::DoublyInjective).unwrap();
        let k = AlgebraSet::from_algebras([catalog::c4()]).unwrap();
        for mode in [AmalgamMode::Plain, AmalgamMode::OneSided, AmalgamMode::Strong] {
            let am = search_amalgam(&span, &k, mode).unwrap().unwrap();
            assert_eq!(am.psi_b.image(), &[0, 1, 2, 3]);
            assert_eq!(am.psi_c.image(), &[0, 1, 2, 3]);
        }
    }

    #[test]
    fn strong_implies_plain() {
        let span = point_span();
        let k = chains(&[1, 2, 3, 4]);
        let strong = search_amalgam(&span, &k, AmalgamMode::Strong).unwrap();
        let plain = search_amalgam(&span, &k, AmalgamMode::Plain).unwrap();
        assert!(strong.is_some() && plain.is_some());
        assert!(strong.unwrap().strong);
    }

    #[test]
    fn product_from_separating_witnesses() {
        let span = point_span();
        let ws = separating_witnesses(&span, &chains(&[1, 2, 3])).unwrap().unwrap();
        let am = product_amalgam(&span, &ws, &Limits::default()).unwrap();
        assert!(am.psi_b.is_injective() && am.psi_c.is_injective());
        verify_amalgam(&span, &am, AmalgamMode::Plain).unwrap();
    }

    #[test]
    fn reused_witness_gives_two_factors() {
        let span = point_span();
        let ws = separating_witnesses(&span, &chains(&[2])).unwrap().unwrap();
        assert_eq!(ws.len(), 2);
        let am = product_amalgam(&span, &ws, &Limits::default()).unwrap();
        assert_eq!(am.target.size(), 4);
    }

    #[test]
    fn empty_family_is_trivial() {
        let t = Arc::new(catalog::chain_lattice(1));
        let id = Homomorphism::identity(1);
        let span = Span::new(t.clone(), t.clone(), t, id.clone(), id, SpanKind::DoublyInjective).unwrap();
        let am = product_amalgam(&span, &[], &Limits::default()).unwrap();
        assert_eq!(am.target.size(), 1);
    }

    #[test]
    fn bad_witness_rejected() {
        let span = point_span();
        let l2 = Arc::new(catalog::chain_lattice(2));
        let w = PairWitness {
            side: Side::B,
            x: 0,
            y: 1,
            target: l2,
            psi_b: Homomorphism::new(vec![1, 1], 2),
            psi_c: Homomorphism::new(vec![0, 1], 2),
        };
        assert!(matches!(
            product_amalgam(&span, &[w], &Limits::default()),
            Err(Error::WitnessInvalid(_))
        ));
    }
}
