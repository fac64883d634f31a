//! Backtracking homomorphism search and everything built on it: spans,
//! amalgams and class-level checks.

mod amalgam;
mod class;
mod span;

pub use amalgam::{
    product_amalgam, search_amalgam, search_amalgam_in, separating_witnesses, verify_amalgam, Amalgam, AmalgamMode,
    PairWitness, Side,
};
pub use class::{
    class_check, condition4_probe, is_epic_subalgebra, paired_amalgam, ClassCheck, ClassProperty, Counterexample,
    ProbeResult,
};
pub use span::{enumerate_spans, spans_over, Span, SpanKind};

use std::ops::ControlFlow;

use crate::algebra::{Elem, FiniteAlgebra, SubUniverse};
use crate::error::{Error, Result};
use crate::hom::Homomorphism;

/// Extra condition on the maps returned by a search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Require {
    None,
    Injective,
    Surjective,
}

const UNSET: usize = usize::MAX;

/// Search state: a partial map extended by propagating every operation over
/// the already assigned elements.
struct Search<'a> {
    dom: &'a FiniteAlgebra,
    cod: &'a FiniteAlgebra,
    gens: Vec<Elem>,
    image: Vec<Elem>,
    trail: Vec<Elem>,
    used: Vec<usize>,
    injective: bool,
    args: Vec<Elem>,
    mapped: Vec<Elem>,
}

impl<'a> Search<'a> {
    fn new(dom: &'a FiniteAlgebra, cod: &'a FiniteAlgebra, injective: bool) -> Self {
        Search {
            dom,
            cod,
            gens: dom.generating_set(),
            image: vec![UNSET; dom.size()],
            trail: Vec::new(),
            used: vec![0; cod.size()],
            injective,
            args: Vec::new(),
            mapped: Vec::new(),
        }
    }

    /// Assigns `a ↦ b` and propagates; `false` on contradiction. The trail
    /// may hold partial work on failure and must be unwound by the caller.
    fn assign(&mut self, a: Elem, b: Elem) -> bool {
        let start = self.trail.len();
        if !self.set(a, b) {
            return false;
        }
        self.propagate(start)
    }

    fn set(&mut self, a: Elem, b: Elem) -> bool {
        match self.image[a] {
            UNSET => {
                if self.injective && self.used[b] > 0 {
                    return false;
                }
                self.image[a] = b;
                self.used[b] += 1;
                self.trail.push(a);
                true
            }
            existing => existing == b,
        }
    }

    fn propagate(&mut self, mut next: usize) -> bool {
        let dom = self.dom;
        let cod = self.cod;
        while next < self.trail.len() {
            let e = self.trail[next];
            next += 1;
            for (op, sym) in dom.signature().symbols().iter().enumerate() {
                let k = sym.arity;
                if k == 0 {
                    continue;
                }
                for pos in 0..k {
                    let snapshot = self.trail.len();
                    let mut counters = vec![0usize; k];
                    loop {
                        self.args.clear();
                        self.mapped.clear();
                        for (i, &c) in counters.iter().enumerate() {
                            let x = if i == pos { e } else { self.trail[c] };
                            self.args.push(x);
                            self.mapped.push(self.image[x]);
                        }
                        let r = dom.apply(op, &self.args);
                        let v = cod.apply(op, &self.mapped);
                        if !self.set(r, v) {
                            return false;
                        }
                        if !advance(&mut counters, pos, snapshot) {
                            break;
                        }
                    }
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let a = self.trail.pop().expect("nonempty trail");
            self.used[self.image[a]] -= 1;
            self.image[a] = UNSET;
        }
    }

    fn run<F>(&mut self, depth: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[Elem]) -> ControlFlow<()>,
    {
        let Some(&g) = self.gens[depth..].iter().find(|&&g| self.image[g] == UNSET) else {
            debug_assert!(self.image.iter().all(|&v| v != UNSET));
            return visit(&self.image);
        };
        let depth = depth + self.gens[depth..].iter().position(|&x| x == g).expect("present");
        for b in 0..self.cod.size() {
            let mark = self.trail.len();
            if self.assign(g, b) {
                self.run(depth + 1, visit)?;
            }
            self.undo(mark);
        }
        ControlFlow::Continue(())
    }
}

fn advance(counters: &mut [usize], skip: usize, bound: usize) -> bool {
    let mut i = counters.len();
    loop {
        if i == 0 {
            return false;
        }
        i -= 1;
        if i == skip {
            continue;
        }
        counters[i] += 1;
        if counters[i] < bound {
            return true;
        }
        counters[i] = 0;
    }
}

/// Calls `visit` on every homomorphism `dom → cod` extending `constraints`
/// and meeting `require`, in lexicographic order of generator images.
/// Each map is checked against the full tables before it is handed out.
pub fn for_each_homomorphism<F>(
    dom: &FiniteAlgebra,
    cod: &FiniteAlgebra,
    constraints: &[(Elem, Elem)],
    require: Require,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(Homomorphism) -> ControlFlow<()>,
{
    dom.check_same_signature(cod)?;
    for &(a, b) in constraints {
        if a >= dom.size() || b >= cod.size() {
            return Err(Error::InvalidInput(format!("constraint {a} ↦ {b} out of range")));
        }
    }
    if require == Require::Injective && dom.size() > cod.size() {
        return Ok(());
    }
    if require == Require::Surjective && dom.size() < cod.size() {
        return Ok(());
    }
    let mut search = Search::new(dom, cod, require == Require::Injective);
    for (op, sym) in dom.signature().symbols().iter().enumerate() {
        if sym.arity == 0 && !search.assign(dom.apply(op, &[]), cod.apply(op, &[])) {
            return Ok(());
        }
    }
    for &(a, b) in constraints {
        if !search.assign(a, b) {
            return Ok(());
        }
    }
    let mut failure = None;
    let _ = search.run(0, &mut |image: &[Elem]| {
        let h = Homomorphism::new(image.to_vec(), cod.size());
        if require == Require::Surjective && !h.is_surjective() {
            return ControlFlow::Continue(());
        }
        if !h.is_homomorphism(dom, cod) {
            failure = Some(h);
            return ControlFlow::Break(());
        }
        visit(h)
    });
    match failure {
        Some(h) => Err(Error::InternalContradiction(format!(
            "search produced a non-homomorphism {:?} from `{}` to `{}`",
            h.image(),
            dom.name(),
            cod.name()
        ))),
        None => Ok(()),
    }
}

/// Up to `limit` homomorphisms (all when `None`), in search order.
pub fn find_homomorphisms(
    dom: &FiniteAlgebra,
    cod: &FiniteAlgebra,
    constraints: &[(Elem, Elem)],
    require: Require,
    limit: Option<usize>,
) -> Result<Vec<Homomorphism>> {
    let mut out = Vec::new();
    if limit == Some(0) {
        return Ok(out);
    }
    for_each_homomorphism(dom, cod, constraints, require, |h| {
        out.push(h);
        if limit.is_some_and(|l| out.len() >= l) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(out)
}

pub fn find_homomorphism(
    dom: &FiniteAlgebra,
    cod: &FiniteAlgebra,
    constraints: &[(Elem, Elem)],
    require: Require,
) -> Result<Option<Homomorphism>> {
    Ok(find_homomorphisms(dom, cod, constraints, require, Some(1))?.pop())
}

/// A homomorphism `B → A` that fixes the subuniverse `A` pointwise, given
/// as a map into the subalgebra's induced indexing.
pub fn is_retract(b: &FiniteAlgebra, sub: &SubUniverse) -> Result<Option<Homomorphism>> {
    let a = b.subalgebra(sub)?;
    let constraints: Vec<(Elem, Elem)> = sub.members().iter().enumerate().map(|(i, &m)| (m, i)).collect();
    find_homomorphism(b, &a, &constraints, Require::None)
}
