//! Free algebras of finitely generated varieties, kept as term-function
//! value vectors, and term-condition detection on them.

use std::collections::HashMap;
use rustc_hash::FxHashMap;

use serde::Serialize;

use super::GeneratorSet;
use crate::algebra::{for_each_tuple, Elem, FiniteAlgebra};
use crate::congruence::UnionFind;
use crate::error::{Error, Result};

/// Three-valued outcome of a term-condition search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Detection {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct TermCheck {
    pub verdict: Detection,
    pub evidence: String,
}

/// A coordinate: a generator and an assignment of its elements to the variables.
type Coord = (usize, Vec<Elem>);

/// The subalgebra of `∏ A` over `coords` generated by the variable
/// projections, as value vectors. Variables come first, in order.
#[derive(Debug)]
pub struct TermClosure<'a> {
    gens: &'a [FiniteAlgebra],
    coords: Vec<Coord>,
    elements: Vec<Vec<Elem>>,
    variables: Vec<usize>,
}

impl<'a> TermClosure<'a> {
    /// Fails with `RESOURCE_LIMIT` past `budget` elements.
    pub fn compute(gens: &'a [FiniteAlgebra], vars: usize, coords: Vec<Coord>, budget: usize) -> Result<Self> {
        let sig = gens[0].signature();
        let mut index: FxHashMap<Vec<Elem>, usize> = FxHashMap::default();
        let mut elements: Vec<Vec<Elem>> = Vec::new();
        let mut push = |v: &[Elem], elements: &mut Vec<Vec<Elem>>| -> Result<usize> {
            if let Some(&i) = index.get(v) {
                return Ok(i);
            }
            if elements.len() >= budget {
                return Err(Error::resource("free algebra elements", budget));
            }
            index.insert(v.to_vec(), elements.len());
            elements.push(v.to_vec());
            Ok(elements.len() - 1)
        };
        let mut variables = Vec::with_capacity(vars);
        for i in 0..vars {
            let v: Vec<Elem> = coords.iter().map(|(_, asg)| asg[i]).collect();
            variables.push(push(&v, &mut elements)?);
        }
        for (op, sym) in sig.symbols().iter().enumerate() {
            if sym.arity == 0 {
                let v: Vec<Elem> = coords.iter().map(|(g, _)| gens[*g].apply(op, &[])).collect();
                push(&v, &mut elements)?;
            }
        }
        // Semi-naive saturation: element `e` meets every tuple whose largest
        // operand is `e`, with `pos` the first position holding it.
        let mut v = Vec::with_capacity(coords.len());
        // A binary operation commutative in every generator needs one operand order.
        let commutative: Vec<bool> = sig
            .symbols()
            .iter()
            .enumerate()
            .map(|(op, sym)| {
                sym.arity == 2
                    && gens.iter().all(|a| {
                        (0..a.size()).all(|x| (0..a.size()).all(|y| a.apply(op, &[x, y]) == a.apply(op, &[y, x])))
                    })
            })
            .collect();
        let mut e = 0;
        while e < elements.len() {
            for (op, sym) in sig.symbols().iter().enumerate() {
                let k = sym.arity;
                for pos in 0..k {
                    if pos > 0 && (e == 0 || commutative[op]) {
                        break;
                    }
                    let bounds: Vec<usize> = (0..k).map(|i| if i < pos { e } else { e + 1 }).collect();
                    let mut counters = vec![0usize; k];
                    counters[pos] = e;
                    loop {
                        v.clear();
                        for (j, (g, _)) in coords.iter().enumerate() {
                            let a = &gens[*g];
                            let idx = counters.iter().fold(0, |acc, &o| acc * a.size() + elements[o][j]);
                            v.push(a.ops()[op].table()[idx]);
                        }
                        push(&v, &mut elements)?;
                        if !odometer(&mut counters, pos, &bounds) {
                            break;
                        }
                    }
                }
            }
            e += 1;
        }
        Ok(TermClosure {
            gens,
            coords,
            elements,
            variables,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Vec<Elem>] {
        &self.elements
    }

    pub fn variables(&self) -> &[usize] {
        &self.variables
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    fn coords_where(&self, pred: impl Fn(&[Elem]) -> bool) -> Vec<usize> {
        (0..self.coords.len()).filter(|&j| pred(&self.coords[j].1)).collect()
    }

    /// The algebra on the value vectors, with the operations computed
    /// coordinatewise.
    pub fn materialize(&self, name: &str) -> Result<FiniteAlgebra> {
        let index: FxHashMap<&[Elem], usize> = self.elements.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect();
        let mut args = Vec::new();
        let mut v = Vec::new();
        let sig = self.gens[0].signature().clone();
        let m = self.elements.len();
        for sym in sig.symbols() {
            let entries = m.checked_pow(sym.arity as u32).filter(|&e| e <= 1 << 24);
            if entries.is_none() {
                return Err(Error::resource("materialized free algebra table entries", 1 << 24));
            }
        }
        FiniteAlgebra::from_fn(name, sig, m, None, |op, t| {
            v.clear();
            for (j, (g, _)) in self.coords.iter().enumerate() {
                args.clear();
                args.extend(t.iter().map(|&o| self.elements[o][j]));
                v.push(self.gens[*g].apply(op, &args));
            }
            index[v.as_slice()]
        })
    }
}

fn odometer(counters: &mut [usize], skip: usize, bounds: &[usize]) -> bool {
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
        if counters[i] < bounds[i] {
            return true;
        }
        counters[i] = 0;
    }
}

fn all_coords(gens: &[FiniteAlgebra], k: usize, keep: impl Fn(&[Elem]) -> bool) -> Vec<Coord> {
    let mut coords = Vec::new();
    for (g, a) in gens.iter().enumerate() {
        for_each_tuple(a.size(), k, |t| {
            if keep(t) {
                coords.push((g, t.to_vec()));
            }
        });
    }
    coords
}

/// `F(k)` for the variety generated by `G`, on all coordinates `A^k`.
#[derive(Debug)]
pub struct FreeAlgebra<'a> {
    closure: TermClosure<'a>,
}

impl<'a> FreeAlgebra<'a> {
    pub fn len(&self) -> usize {
        self.closure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closure.is_empty()
    }

    /// Indices of `x₁ … x_k`.
    pub fn designated(&self) -> &[usize] {
        self.closure.variables()
    }

    pub fn closure(&self) -> &TermClosure<'a> {
        &self.closure
    }

    pub fn carrier(&self) -> Result<FiniteAlgebra> {
        self.closure.materialize(&format!("F({})", self.designated().len()))
    }
}

pub fn free_algebra(g: &GeneratorSet, k: usize) -> Result<FreeAlgebra<'_>> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidInput(format!("free algebras on {k} generators are not supported")));
    }
    let coords = all_coords(g.generators(), k, |_| true);
    Ok(FreeAlgebra {
        closure: TermClosure::compute(g.generators(), k, coords, g.limits().max_free)?,
    })
}

fn holds_everywhere(gens: &[FiniteAlgebra], eq: impl Fn(&FiniteAlgebra, Elem, Elem) -> bool) -> bool {
    gens.iter().all(|a| (0..a.size()).all(|x| (0..a.size()).all(|y| eq(a, x, y))))
}

fn binary_ops(a: &FiniteAlgebra) -> Vec<(usize, String)> {
    a.signature()
        .symbols()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.arity == 2)
        .map(|(i, s)| (i, s.name.clone()))
        .collect()
}

fn unary_ops(a: &FiniteAlgebra) -> Vec<(usize, String)> {
    a.signature()
        .symbols()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.arity == 1)
        .map(|(i, s)| (i, s.name.clone()))
        .collect()
}

/// A majority term `p(p(q(x,y), q(y,z)), q(x,z))` over two binary operations.
fn majority_candidate(gens: &[FiniteAlgebra]) -> Option<String> {
    let bins = binary_ops(&gens[0]);
    for (p, pn) in &bins {
        for (q, qn) in &bins {
            let m = |a: &FiniteAlgebra, x: Elem, y: Elem, z: Elem| {
                let l = a.apply(*p, &[a.apply(*q, &[x, y]), a.apply(*q, &[y, z])]);
                a.apply(*p, &[l, a.apply(*q, &[x, z])])
            };
            let ok = holds_everywhere(gens, |a, x, y| m(a, x, x, y) == x && m(a, x, y, x) == x && m(a, y, x, x) == x);
            if ok {
                return Some(format!("majority term {pn}({pn}({qn}(x,y),{qn}(y,z)),{qn}(x,z))"));
            }
        }
    }
    None
}

/// Mal'cev candidates: `m(m(i(i(x,y),z), i(i(z,y),x)), j(x,z))` over binary
/// operations, and `j(j(m(x,n(y)), m(x,z)), m(n(y),z))` with a unary `n`.
fn malcev_candidate(gens: &[FiniteAlgebra]) -> Option<String> {
    let bins = binary_ops(&gens[0]);
    let malcev = |t: &dyn Fn(&FiniteAlgebra, Elem, Elem, Elem) -> Elem| {
        holds_everywhere(gens, |a, x, y| t(a, x, y, y) == x && t(a, x, x, y) == y)
    };
    for (i, iname) in &bins {
        for (m, mname) in &bins {
            for (j, jname) in &bins {
                let t = |a: &FiniteAlgebra, x: Elem, y: Elem, z: Elem| {
                    let l = a.apply(*i, &[a.apply(*i, &[x, y]), z]);
                    let r = a.apply(*i, &[a.apply(*i, &[z, y]), x]);
                    a.apply(*m, &[a.apply(*m, &[l, r]), a.apply(*j, &[x, z])])
                };
                if malcev(&t) {
                    return Some(format!(
                        "Mal'cev term {mname}({mname}({iname}({iname}(x,y),z),{iname}({iname}(z,y),x)),{jname}(x,z))"
                    ));
                }
            }
        }
    }
    for (n, nname) in unary_ops(&gens[0]) {
        for (m, mname) in &bins {
            for (j, jname) in &bins {
                let t = |a: &FiniteAlgebra, x: Elem, y: Elem, z: Elem| {
                    let ny = a.apply(n, &[y]);
                    let l = a.apply(*j, &[a.apply(*m, &[x, ny]), a.apply(*m, &[x, z])]);
                    a.apply(*j, &[l, a.apply(*m, &[ny, z])])
                };
                if malcev(&t) {
                    return Some(format!(
                        "Mal'cev term {jname}({jname}({mname}(x,{nname}(y)),{mname}(x,z)),{mname}({nname}(y),z))"
                    ));
                }
            }
        }
    }
    None
}

/// Jónsson terms via the ternary free algebra projected onto the coordinates
/// `(a,b,a)`, `(a,a,b)`, `(a,b,b)`. A verified majority term short-cuts the
/// search.
pub fn has_jonsson_terms(g: &GeneratorSet) -> TermCheck {
    if let Some(evidence) = majority_candidate(g.generators()) {
        return TermCheck {
            verdict: Detection::Yes,
            evidence,
        };
    }
    jonsson_by_closure(g)
}

pub(crate) fn jonsson_by_closure(g: &GeneratorSet) -> TermCheck {
    let repeated = |t: &[Elem]| t[0] == t[1] || t[0] == t[2] || t[1] == t[2];
    let coords = all_coords(g.generators(), 3, repeated);
    let closure = match TermClosure::compute(g.generators(), 3, coords, g.limits().max_free) {
        Ok(c) => c,
        Err(e) if e.is_resource_limit() => {
            return TermCheck {
                verdict: Detection::Unknown,
                evidence: e.to_string(),
            }
        }
        Err(e) => {
            return TermCheck {
                verdict: Detection::Unknown,
                evidence: e.to_string(),
            }
        }
    };
    let aba = closure.coords_where(|t| t[0] == t[2]);
    let aab = closure.coords_where(|t| t[0] == t[1]);
    let abb = closure.coords_where(|t| t[1] == t[2]);
    let els = closure.elements();
    let in_m: Vec<usize> = (0..els.len())
        .filter(|&t| aba.iter().all(|&j| els[t][j] == closure.coords()[j].1[0]))
        .collect();
    let mut uf = UnionFind::new(els.len());
    for relation in [&aab, &abb] {
        let mut classes: HashMap<Vec<Elem>, usize> = HashMap::new();
        for &t in &in_m {
            let key: Vec<Elem> = relation.iter().map(|&j| els[t][j]).collect();
            let rep = *classes.entry(key).or_insert(t);
            uf.union(rep, t);
        }
    }
    let (x, z) = (closure.variables()[0], closure.variables()[2]);
    let connected = uf.find(x) == uf.find(z);
    TermCheck {
        verdict: if connected { Detection::Yes } else { Detection::No },
        evidence: format!(
            "{} of {} ternary terms satisfy t(a,b,a)=a; x and z are {}connected",
            in_m.len(),
            els.len(),
            if connected { "" } else { "not " }
        ),
    }
}

/// A Mal'cev term via the ternary free algebra projected onto the
/// coordinates `(a,a,b)`, `(a,b,b)`. Verified candidate terms short-cut
/// the search.
pub fn has_malcev_term(g: &GeneratorSet) -> TermCheck {
    if let Some(evidence) = malcev_candidate(g.generators()) {
        return TermCheck {
            verdict: Detection::Yes,
            evidence,
        };
    }
    malcev_by_closure(g)
}

pub(crate) fn malcev_by_closure(g: &GeneratorSet) -> TermCheck {
    let coords = all_coords(g.generators(), 3, |t| t[0] == t[1] || t[1] == t[2]);
    let closure = match TermClosure::compute(g.generators(), 3, coords, g.limits().max_free) {
        Ok(c) => c,
        Err(e) => {
            return TermCheck {
                verdict: Detection::Unknown,
                evidence: e.to_string(),
            }
        }
    };
    let cs = closure.coords();
    let found = closure.elements().iter().any(|v| {
        cs.iter().enumerate().all(|(j, (_, t))| {
            let want_abb = t[1] == t[2];
            let want_aab = t[0] == t[1];
            (!want_abb || v[j] == t[0]) && (!want_aab || v[j] == t[2])
        })
    });
    TermCheck {
        verdict: if found { Detection::Yes } else { Detection::No },
        evidence: format!(
            "{} ternary term functions on the relevant coordinates; Mal'cev term {}",
            closure.len(),
            if found { "found" } else { "absent" }
        ),
    }
}
