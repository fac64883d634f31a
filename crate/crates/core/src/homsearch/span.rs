use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{find_homomorphisms, Require};
use crate::algebra::{Elem, FiniteAlgebra};
use crate::algebra_set::AlgebraSet;
use crate::congruence::CongruenceLattice;
use crate::error::{Error, Result};
use crate::hom::Homomorphism;
use crate::iso::{automorphisms, is_isomorphic};
use crate::limits::Limits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpanKind {
    DoublyInjective,
    Injective,
    InjectiveSurjective,
}

impl SpanKind {
    pub fn admits(self, phi_b: &Homomorphism, phi_c: &Homomorphism) -> bool {
        phi_b.is_injective()
            && match self {
                SpanKind::DoublyInjective => phi_c.is_injective(),
                SpanKind::Injective => true,
                SpanKind::InjectiveSurjective => phi_c.is_surjective(),
            }
    }
}

/// `φ_B: A → B` and `φ_C: A → C`.
#[derive(Clone, Debug)]
pub struct Span {
    pub a: Arc<FiniteAlgebra>,
    pub b: Arc<FiniteAlgebra>,
    pub c: Arc<FiniteAlgebra>,
    pub phi_b: Homomorphism,
    pub phi_c: Homomorphism,
    pub kind: SpanKind,
}

impl Span {
    /// Checks both maps and the kind.
    pub fn new(
        a: Arc<FiniteAlgebra>,
        b: Arc<FiniteAlgebra>,
        c: Arc<FiniteAlgebra>,
        phi_b: Homomorphism,
        phi_c: Homomorphism,
        kind: SpanKind,
    ) -> Result<Self> {
        a.check_same_signature(&b)?;
        a.check_same_signature(&c)?;
        if !phi_b.is_homomorphism(&a, &b) {
            return Err(Error::NotAHomomorphism(format!("phiB {:?}: {} -> {}", phi_b.image(), a.name(), b.name())));
        }
        if !phi_c.is_homomorphism(&a, &c) {
            return Err(Error::NotAHomomorphism(format!("phiC {:?}: {} -> {}", phi_c.image(), a.name(), c.name())));
        }
        if !kind.admits(&phi_b, &phi_c) {
            return Err(Error::InvalidInput(format!("maps do not form a {kind:?} span")));
        }
        Ok(Span {
            a,
            b,
            c,
            phi_b,
            phi_c,
            kind,
        })
    }

    /// The span with the roles of `B` and `C` exchanged.
    pub fn swapped(&self) -> Span {
        Span {
            a: self.a.clone(),
            b: self.c.clone(),
            c: self.b.clone(),
            phi_b: self.phi_c.clone(),
            phi_c: self.phi_b.clone(),
            kind: self.kind,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "A": self.a.name(),
            "B": self.b.name(),
            "C": self.c.name(),
            "kind": self.kind,
            "phiB": self.phi_b.image(),
            "phiC": self.phi_c.image(),
        })
    }
}

/// Orbit key of a pair of maps under `Aut(A) × Aut(B) × Aut(C)`.
fn orbit_key(
    f: &Homomorphism,
    g: &Homomorphism,
    aut_a: &[Homomorphism],
    aut_b: &[Homomorphism],
    aut_c: &[Homomorphism],
) -> (Vec<Elem>, Vec<Elem>) {
    let least = |h: &Homomorphism, auts: &[Homomorphism]| -> Vec<Elem> {
        auts.iter()
            .map(|beta| beta.after(h).image().to_vec())
            .min()
            .expect("identity is an automorphism")
    };
    aut_a
        .iter()
        .map(|alpha| (least(&f.after(alpha), aut_b), least(&g.after(alpha), aut_c)))
        .min()
        .expect("identity is an automorphism")
}

/// Candidate second legs `A → C` for a kind.
fn second_legs(a: &FiniteAlgebra, c: &FiniteAlgebra, kind: SpanKind, limits: &Limits) -> Result<Vec<Homomorphism>> {
    match kind {
        SpanKind::DoublyInjective => find_homomorphisms(a, c, &[], Require::Injective, None),
        SpanKind::Injective => find_homomorphisms(a, c, &[], Require::None, None),
        SpanKind::InjectiveSurjective => {
            // one surjection per kernel: the rest differ by automorphisms of C
            let con = CongruenceLattice::compute(a, limits.max_congruences)?;
            let mut legs = Vec::new();
            for theta in con.elements() {
                if theta.num_blocks() != c.size() {
                    continue;
                }
                let (q, proj) = a.quotient(theta)?;
                if let Some(iso) = is_isomorphic(&q, c)? {
                    legs.push(iso.after(&proj));
                }
            }
            Ok(legs)
        }
    }
}

/// Every span of the given kind over `(A, B, C)`, one per orbit under the
/// automorphism groups, in search order.
pub fn spans_over(
    a: &Arc<FiniteAlgebra>,
    b: &Arc<FiniteAlgebra>,
    c: &Arc<FiniteAlgebra>,
    kind: SpanKind,
    limits: &Limits,
) -> Result<Vec<Span>> {
    let firsts = find_homomorphisms(a, b, &[], Require::Injective, None)?;
    if firsts.is_empty() {
        return Ok(Vec::new());
    }
    let seconds = second_legs(a, c, kind, limits)?;
    if seconds.is_empty() {
        return Ok(Vec::new());
    }
    let aut_a = automorphisms(a);
    let aut_b = automorphisms(b);
    let aut_c = automorphisms(c);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for f in &firsts {
        for g in &seconds {
            if seen.insert(orbit_key(f, g, &aut_a, &aut_b, &aut_c)) {
                out.push(Span {
                    a: a.clone(),
                    b: b.clone(),
                    c: c.clone(),
                    phi_b: f.clone(),
                    phi_c: g.clone(),
                    kind,
                });
            }
        }
    }
    Ok(out)
}

/// The index triples `(A, B, C)` over `K` in enumeration order.
pub(crate) fn triples(k: &AlgebraSet, kind: SpanKind) -> Vec<(usize, usize, usize)> {
    let n = k.len();
    let mut out = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let (sa, sb, sc) = (k.get(a).size(), k.get(b).size(), k.get(c).size());
                let fits = match kind {
                    SpanKind::DoublyInjective => sc >= sa,
                    SpanKind::Injective => true,
                    SpanKind::InjectiveSurjective => sc <= sa,
                };
                if sa <= sb && fits {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

/// All spans of a kind in `K`, up to the automorphism symmetry.
pub fn enumerate_spans(k: &AlgebraSet, kind: SpanKind, limits: &Limits) -> Result<Vec<Span>> {
    let mut out = Vec::new();
    for (a, b, c) in triples(k, kind) {
        let m = k.members();
        out.extend(spans_over(&m[a], &m[b], &m[c], kind, limits)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn trivial_class_has_one_span() {
        let k = AlgebraSet::from_algebras([catalog::chain_lattice(1)]).unwrap();
        for kind in [SpanKind::DoublyInjective, SpanKind::Injective, SpanKind::InjectiveSurjective] {
            assert_eq!(enumerate_spans(&k, kind, &Limits::default()).unwrap().len(), 1);
        }
    }

    #[test]
    fn point_into_two_lattice() {
        let k = AlgebraSet::from_algebras([catalog::chain_lattice(1), catalog::chain_lattice(2)]).unwrap();
        let spans = enumerate_spans(&k, SpanKind::DoublyInjective, &Limits::default()).unwrap();
        let over_point: Vec<(Vec<Elem>, Vec<Elem>)> = spans
            .iter()
            .filter(|s| s.a.is_trivial() && s.b.size() == 2 && s.c.size() == 2)
            .map(|s| (s.phi_b.image().to_vec(), s.phi_c.image().to_vec()))
            .collect();
        assert_eq!(
            over_point,
            vec![(vec![0], vec![0]), (vec![0], vec![1]), (vec![1], vec![0]), (vec![1], vec![1])]
        );
    }

    #[test]
    fn boolean_into_s2_is_unique() {
        let k = AlgebraSet::from_algebras([catalog::lukasiewicz_chain(1), catalog::lukasiewicz_chain(2)]).unwrap();
        let spans = enumerate_spans(&k, SpanKind::DoublyInjective, &Limits::default()).unwrap();
        let b2_s2: Vec<&Span> = spans.iter().filter(|s| s.a.size() == 2 && s.b.size() == 3).collect();
        assert!(!b2_s2.is_empty());
        assert!(b2_s2.iter().all(|s| s.phi_b.image() == [0, 2]));
    }

    #[test]
    fn kinds_respected() {
        let k = AlgebraSet::from_algebras([catalog::chain_lattice(1), catalog::chain_lattice(2), catalog::chain_lattice(3)])
            .unwrap();
        for kind in [SpanKind::DoublyInjective, SpanKind::Injective, SpanKind::InjectiveSurjective] {
            for s in enumerate_spans(&k, kind, &Limits::default()).unwrap() {
                assert!(kind.admits(&s.phi_b, &s.phi_c));
                assert!(s.phi_b.is_homomorphism(&s.a, &s.b) && s.phi_c.is_homomorphism(&s.a, &s.c));
            }
        }
    }
}
