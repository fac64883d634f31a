//! Finite algebras given by operation tables.
//!
//! Elements are the indices `0..size`. Labels are carried along for
//! display and serialization but play no role in any computation.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::congruence::Congruence;
use crate::error::{Error, Result};
use crate::hom::Homomorphism;

pub type Elem = usize;

/// An operation symbol with its arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OpSymbol {
    pub name: String,
    pub arity: usize,
}

/// An ordered list of operation symbols. Two signatures are equal only when
/// the sequences are equal, order included.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    symbols: Vec<OpSymbol>,
}

impl Signature {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let symbols: Vec<OpSymbol> = symbols
            .into_iter()
            .map(|(name, arity)| OpSymbol {
                name: name.into(),
                arity,
            })
            .collect();
        let mut seen = BTreeSet::new();
        for sym in &symbols {
            if !seen.insert(sym.name.as_str()) {
                return Err(Error::DuplicateOpName(sym.name.clone()));
            }
        }
        Ok(Signature { symbols })
    }

    pub fn symbols(&self) -> &[OpSymbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }

    pub fn has_constants(&self) -> bool {
        self.symbols.iter().any(|s| s.arity == 0)
    }
}

/// A single operation table, stored flat in row-major order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Operation {
    arity: usize,
    table: Vec<Elem>,
}

impl Operation {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }
}

/// A finite algebra: a nonempty universe `{0..size}` with one total table
/// per operation symbol of the signature.
#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    name: String,
    signature: Signature,
    size: usize,
    labels: Option<Vec<String>>,
    ops: Vec<Operation>,
}

impl PartialEq for FiniteAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature && self.size == other.size && self.ops == other.ops
    }
}

impl Eq for FiniteAlgebra {}

fn arity_len(size: usize, arity: usize) -> Option<usize> {
    size.checked_pow(arity as u32)
}

impl FiniteAlgebra {
    /// Builds an algebra from flat row-major tables, one per symbol in
    /// signature order, checking every invariant.
    pub fn new(
        name: impl Into<String>,
        signature: Signature,
        size: usize,
        tables: Vec<Vec<Elem>>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let name = name.into();
        if size == 0 {
            return Err(Error::EmptyUniverse(name));
        }
        if tables.len() != signature.len() {
            return Err(Error::ShapeMismatch {
                op: name.clone(),
                detail: format!(
                    "expected {} tables, found {}",
                    signature.len(),
                    tables.len()
                ),
            });
        }
        if let Some(labels) = &labels {
            if labels.len() != size {
                return Err(Error::InvalidLabels(format!(
                    "{} labels given for {} elements",
                    labels.len(),
                    size
                )));
            }
            let distinct: BTreeSet<&String> = labels.iter().collect();
            if distinct.len() != size {
                return Err(Error::InvalidLabels("labels are not distinct".into()));
            }
        }
        let mut ops = Vec::with_capacity(tables.len());
        for (sym, table) in signature.symbols().iter().zip(tables) {
            let expected = arity_len(size, sym.arity).ok_or_else(|| Error::ShapeMismatch {
                op: sym.name.clone(),
                detail: "table is too large to address".into(),
            })?;
            if table.len() != expected {
                return Err(Error::ShapeMismatch {
                    op: sym.name.clone(),
                    detail: format!("has {} entries, expected {}^{} = {}", table.len(), size, sym.arity, expected),
                });
            }
            if let Some(pos) = table.iter().position(|&v| v >= size) {
                return Err(Error::OutOfRangeEntry {
                    op: sym.name.clone(),
                    position: format!("{:?}", unflatten(pos, size, sym.arity)),
                    value: table[pos] as i64,
                    size,
                });
            }
            ops.push(Operation {
                arity: sym.arity,
                table,
            });
        }
        Ok(FiniteAlgebra {
            name,
            signature,
            size,
            labels,
            ops,
        })
    }

    /// Builds an algebra by evaluating a function for every argument tuple.
    pub fn from_fn<F>(
        name: impl Into<String>,
        signature: Signature,
        size: usize,
        labels: Option<Vec<String>>,
        mut f: F,
    ) -> Result<Self>
    where
        F: FnMut(usize, &[Elem]) -> Elem,
    {
        let mut tables = Vec::with_capacity(signature.len());
        for (i, sym) in signature.symbols().iter().enumerate() {
            let mut table = Vec::new();
            for_each_tuple(size, sym.arity, |args| table.push(f(i, args)));
            tables.push(table);
        }
        FiniteAlgebra::new(name, signature, size, tables, labels)
    }

    /// The one-element algebra of a signature.
    pub fn trivial(signature: Signature) -> Self {
        FiniteAlgebra::from_fn("trivial", signature, 1, None, |_, _| 0)
            .expect("one-element tables are always valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, a: Elem) -> String {
        match &self.labels {
            Some(labels) => labels[a].clone(),
            None => a.to_string(),
        }
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.signature.position(name)
    }

    /// Applies operation `op` to `args`.
    #[inline]
    pub fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        let operation = &self.ops[op];
        debug_assert_eq!(args.len(), operation.arity);
        let mut idx = 0;
        for &a in args {
            idx = idx * self.size + a;
        }
        operation.table[idx]
    }

    /// Applies the operation with the given name. Panics on unknown names.
    pub fn eval(&self, name: &str, args: &[Elem]) -> Elem {
        let op = self
            .op_index(name)
            .unwrap_or_else(|| panic!("no operation `{name}` in {}", self.name));
        self.apply(op, args)
    }

    pub fn constants(&self) -> Vec<Elem> {
        self.ops
            .iter()
            .filter(|o| o.arity == 0)
            .map(|o| o.table[0])
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.size == 1
    }

    pub(crate) fn check_same_signature(&self, other: &FiniteAlgebra) -> Result<()> {
        if self.signature != other.signature {
            return Err(Error::SignatureMismatch {
                left: self.name.clone(),
                right: other.name.clone(),
            });
        }
        Ok(())
    }

    /// Least subuniverse containing `seed` and every constant, by worklist
    /// saturation.
    pub fn closure(&self, seed: &[Elem]) -> Result<Vec<Elem>> {
        let mut member = vec![false; self.size];
        let mut members: Vec<Elem> = Vec::new();
        for &a in seed.iter().chain(self.constants().iter()) {
            if a >= self.size {
                return Err(Error::InvalidInput(format!(
                    "element {a} out of range for `{}`",
                    self.name
                )));
            }
            if !member[a] {
                member[a] = true;
                members.push(a);
            }
        }
        if members.is_empty() {
            return Err(Error::EmptyClosure);
        }
        let mut next = 0;
        let mut args = Vec::new();
        while next < members.len() {
            let e = members[next];
            next += 1;
            for (op_idx, op) in self.ops.iter().enumerate() {
                if op.arity == 0 {
                    continue;
                }
                // every tuple over current members with `e` somewhere
                for pos in 0..op.arity {
                    let snapshot = members.len();
                    args.clear();
                    args.resize(op.arity, 0);
                    let mut counters = vec![0usize; op.arity];
                    loop {
                        for (i, slot) in args.iter_mut().enumerate() {
                            *slot = if i == pos { e } else { members[counters[i]] };
                        }
                        let r = self.apply(op_idx, &args);
                        if !member[r] {
                            member[r] = true;
                            members.push(r);
                        }
                        if !advance_skipping(&mut counters, pos, snapshot) {
                            break;
                        }
                    }
                }
            }
        }
        members.sort_unstable();
        Ok(members)
    }

    pub fn subuniverse_closure(&self, seed: &[Elem]) -> Result<SubUniverse> {
        Ok(SubUniverse {
            members: self.closure(seed)?,
        })
    }

    /// Every nonempty subuniverse, ordered by size then lexicographically.
    pub fn all_subuniverses(&self, limit: usize) -> Result<Vec<SubUniverse>> {
        let mut found: BTreeSet<Vec<Elem>> = BTreeSet::new();
        let mut queue: Vec<Vec<Elem>> = Vec::new();
        let push = |s: Vec<Elem>, found: &mut BTreeSet<Vec<Elem>>, queue: &mut Vec<Vec<Elem>>| -> Result<()> {
            if found.insert(s.clone()) {
                if found.len() > limit {
                    return Err(Error::resource("subuniverse count", limit));
                }
                queue.push(s);
            }
            Ok(())
        };
        if self.signature.has_constants() {
            push(self.closure(&[])?, &mut found, &mut queue)?;
        }
        for a in 0..self.size {
            push(self.closure(&[a])?, &mut found, &mut queue)?;
        }
        while let Some(s) = queue.pop() {
            let mut present = vec![false; self.size];
            for &a in &s {
                present[a] = true;
            }
            for (a, _) in present.iter().enumerate().filter(|(_, &p)| !p) {
                let mut seed = s.clone();
                seed.push(a);
                push(self.closure(&seed)?, &mut found, &mut queue)?;
            }
        }
        let mut subs: Vec<SubUniverse> = found.into_iter().map(|members| SubUniverse { members }).collect();
        subs.sort_by(|x, y| x.members.len().cmp(&y.members.len()).then_with(|| x.members.cmp(&y.members)));
        Ok(subs)
    }

    /// The subalgebra on a subuniverse, indexed by the sorted member list.
    pub fn subalgebra(&self, sub: &SubUniverse) -> Result<FiniteAlgebra> {
        let members = &sub.members;
        if members.is_empty() {
            return Err(Error::EmptyUniverse(format!("{}[]", self.name)));
        }
        let mut index_of = vec![usize::MAX; self.size];
        for (i, &m) in members.iter().enumerate() {
            index_of[m] = i;
        }
        let labels = Some(members.iter().map(|&m| self.label(m)).collect());
        let name = if members.len() == self.size {
            self.name.clone()
        } else {
            format!(
                "{}{{{}}}",
                self.name,
                members.iter().map(|&m| self.label(m)).collect::<Vec<_>>().join(",")
            )
        };
        let mut outer = Vec::new();
        let mut failure = None;
        let alg = FiniteAlgebra::from_fn(name, self.signature.clone(), members.len(), labels, |op, args| {
            outer.clear();
            outer.extend(args.iter().map(|&i| members[i]));
            let r = self.apply(op, &outer);
            let idx = index_of[r];
            if idx == usize::MAX {
                failure = Some(r);
                0
            } else {
                idx
            }
        })?;
        if let Some(r) = failure {
            return Err(Error::InvalidInput(format!(
                "{:?} is not closed: produces {r}",
                members
            )));
        }
        Ok(alg)
    }

    /// Whether `members` (sorted, deduplicated) is closed under every operation.
    pub fn is_subuniverse(&self, members: &[Elem]) -> bool {
        if members.is_empty() {
            return false;
        }
        match self.closure(members) {
            Ok(c) => c.len() == members.len(),
            Err(_) => false,
        }
    }

    /// A generating set chosen greedily in index order; the constants
    /// generate the rest implicitly.
    pub fn generating_set(&self) -> Vec<Elem> {
        let mut gens = Vec::new();
        let mut covered = vec![false; self.size];
        if let Ok(c) = self.closure(&[]) {
            for a in c {
                covered[a] = true;
            }
        }
        for a in 0..self.size {
            if covered[a] {
                continue;
            }
            gens.push(a);
            let cl = self.closure(&gens).expect("nonempty seed");
            for b in cl {
                covered[b] = true;
            }
        }
        gens
    }

    /// Quotient by a congruence, with blocks numbered by least member, and
    /// the canonical projection.
    pub fn quotient(&self, theta: &Congruence) -> Result<(FiniteAlgebra, Homomorphism)> {
        if theta.size() != self.size {
            return Err(Error::NotACongruence(format!(
                "partition over {} elements given for `{}` of size {}",
                theta.size(),
                self.name,
                self.size
            )));
        }
        if let Some((op, a, b)) = theta.compatibility_violation(self) {
            return Err(Error::NotACongruence(format!(
                "operation `{}` separates {} and {}",
                self.signature.symbols()[op].name,
                self.label(a),
                self.label(b)
            )));
        }
        let reps = theta.representatives();
        let n = reps.len();
        let labels = if theta.is_identity() {
            self.labels.clone()
        } else {
            Some(
                theta
                    .blocks()
                    .iter()
                    .map(|blk| {
                        if blk.len() == 1 {
                            self.label(blk[0])
                        } else {
                            format!("[{}]", blk.iter().map(|&a| self.label(a)).collect::<Vec<_>>().join(","))
                        }
                    })
                    .collect(),
            )
        };
        let name = if theta.is_identity() {
            self.name.clone()
        } else {
            format!("{}/{}", self.name, theta.display(self))
        };
        let mut outer = Vec::new();
        let q = FiniteAlgebra::from_fn(name, self.signature.clone(), n, labels, |op, args| {
            outer.clear();
            outer.extend(args.iter().map(|&i| reps[i]));
            theta.block_of(self.apply(op, &outer))
        })?;
        let proj = Homomorphism::new(theta.block_ids().to_vec(), n);
        Ok((q, proj))
    }

    pub fn index_of_label(&self, label: &str) -> Option<Elem> {
        match &self.labels {
            Some(l) => l.iter().position(|x| x == label),
            None => label.parse().ok().filter(|&i| i < self.size),
        }
    }
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} elements)", self.name, self.size)
    }
}

/// A nonempty subset of a parent algebra's universe closed under all
/// operations. Members are sorted; the induced subalgebra indexes them in
/// that order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubUniverse {
    members: Vec<Elem>,
}

impl SubUniverse {
    /// Checks closure in `parent`.
    pub fn new(parent: &FiniteAlgebra, mut members: Vec<Elem>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.iter().any(|&m| m >= parent.size()) {
            return Err(Error::InvalidInput("subuniverse member out of range".into()));
        }
        if !parent.is_subuniverse(&members) {
            return Err(Error::InvalidInput(format!(
                "{members:?} is not a subuniverse of `{}`",
                parent.name()
            )));
        }
        Ok(SubUniverse { members })
    }

    pub fn full(parent: &FiniteAlgebra) -> Self {
        SubUniverse {
            members: (0..parent.size()).collect(),
        }
    }

    pub fn members(&self) -> &[Elem] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: Elem) -> bool {
        self.members.binary_search(&a).is_ok()
    }

    /// Position of a parent element in the induced indexing.
    pub fn index_of(&self, a: Elem) -> Option<usize> {
        self.members.binary_search(&a).ok()
    }

    /// The inclusion map as a homomorphism from the induced subalgebra.
    pub fn inclusion(&self, parent_size: usize) -> Homomorphism {
        Homomorphism::new(self.members.clone(), parent_size)
    }
}

/// Direct product, indexed lexicographically with the first factor most
/// significant, together with the coordinate projections.
pub fn direct_product(factors: &[&FiniteAlgebra]) -> Result<(FiniteAlgebra, Vec<Homomorphism>)> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidInput("direct product of an empty family".into()))?;
    for f in &factors[1..] {
        first.check_same_signature(f)?;
    }
    let sizes: Vec<usize> = factors.iter().map(|f| f.size()).collect();
    let total = sizes
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .ok_or_else(|| Error::resource("product size", usize::MAX))?;
    let decode = |mut idx: usize| -> Vec<Elem> {
        let mut coords = vec![0; sizes.len()];
        for i in (0..sizes.len()).rev() {
            coords[i] = idx % sizes[i];
            idx /= sizes[i];
        }
        coords
    };
    let encode = |coords: &[Elem]| -> usize { coords.iter().zip(&sizes).fold(0, |acc, (&c, &s)| acc * s + c) };
    let coords_of: Vec<Vec<Elem>> = (0..total).map(decode).collect();
    let all_labelled = factors.iter().all(|f| f.labels().is_some());
    let labels = if all_labelled {
        Some(
            coords_of
                .iter()
                .map(|c| {
                    format!(
                        "({})",
                        c.iter().zip(factors).map(|(&x, f)| f.label(x)).collect::<Vec<_>>().join(",")
                    )
                })
                .collect(),
        )
    } else {
        None
    };
    let name = factors.iter().map(|f| f.name()).collect::<Vec<_>>().join("x");
    let mut scratch = Vec::new();
    let mut out = Vec::new();
    let product = FiniteAlgebra::from_fn(name, first.signature().clone(), total, labels, |op, args| {
        out.clear();
        for (i, f) in factors.iter().enumerate() {
            scratch.clear();
            scratch.extend(args.iter().map(|&a| coords_of[a][i]));
            out.push(f.apply(op, &scratch));
        }
        encode(&out)
    })?;
    let projections = (0..factors.len())
        .map(|i| Homomorphism::new(coords_of.iter().map(|c| c[i]).collect(), sizes[i]))
        .collect();
    Ok((product, projections))
}

/// Calls `f` on every tuple of `{0..size}^arity` in lexicographic order.
pub fn for_each_tuple<F: FnMut(&[Elem])>(size: usize, arity: usize, mut f: F) {
    let mut tuple = vec![0; arity];
    loop {
        f(&tuple);
        let mut i = arity;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < size {
                break;
            }
            tuple[i] = 0;
        }
    }
}

fn unflatten(mut pos: usize, size: usize, arity: usize) -> Vec<usize> {
    let mut coords = vec![0; arity];
    for i in (0..arity).rev() {
        coords[i] = pos % size;
        pos /= size;
    }
    coords
}

/// Odometer over `counters` (each in `0..bound`), leaving position `skip` fixed.
fn advance_skipping(counters: &mut [usize], skip: usize, bound: usize) -> bool {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn rejects_empty_universe() {
        let sig = Signature::new([("f", 1)]).unwrap();
        let err = FiniteAlgebra::new("e", sig, 0, vec![vec![]], None).unwrap_err();
        assert!(matches!(err, Error::EmptyUniverse(_)));
    }

    #[test]
    fn rejects_bad_shapes_and_entries() {
        let sig = Signature::new([("f", 2)]).unwrap();
        let err = FiniteAlgebra::new("a", sig.clone(), 2, vec![vec![0, 1, 1]], None).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
        let err = FiniteAlgebra::new("a", sig, 2, vec![vec![0, 1, 1, 7]], None).unwrap_err();
        assert!(matches!(err, Error::OutOfRangeEntry { value: 7, .. }));
    }

    #[test]
    fn duplicate_symbol_names_rejected() {
        assert!(matches!(
            Signature::new([("f", 2), ("f", 1)]),
            Err(Error::DuplicateOpName(_))
        ));
    }

    #[test]
    fn closure_in_c4() {
        let c4 = catalog::c4();
        let one = c4.index_of_label("1").unwrap();
        let m2 = c4.index_of_label("-2").unwrap();
        assert_eq!(c4.closure(&[one]).unwrap(), vec![one]);
        assert_eq!(c4.closure(&[m2]).unwrap(), vec![m2, one]);
        assert_eq!(c4.closure(&[0, 1, 2, 3]).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn empty_closure_without_constants() {
        let l = catalog::chain_lattice(2);
        assert!(matches!(l.closure(&[]), Err(Error::EmptyClosure)));
    }

    #[test]
    fn subuniverses_of_two_lattice() {
        let l = catalog::chain_lattice(2);
        let subs: Vec<Vec<Elem>> = l
            .all_subuniverses(100)
            .unwrap()
            .into_iter()
            .map(|s| s.members().to_vec())
            .collect();
        assert_eq!(subs, vec![vec![0], vec![1], vec![0, 1]]);
    }

    #[test]
    fn subuniverse_limit() {
        let l = catalog::chain_lattice(4);
        assert!(l.all_subuniverses(3).unwrap_err().is_resource_limit());
    }

    #[test]
    fn product_of_two_lattices() {
        let l = catalog::chain_lattice(2);
        let (p, projs) = direct_product(&[&l, &l]).unwrap();
        assert_eq!(p.size(), 4);
        for proj in &projs {
            assert!(proj.is_homomorphism(&p, &l));
            assert!(proj.is_surjective());
        }
        // (0,1) meet (1,0) = (0,0)
        assert_eq!(p.eval("meet", &[1, 2]), 0);
        assert_eq!(p.eval("join", &[1, 2]), 3);
    }

    #[test]
    fn product_signature_mismatch() {
        let l = catalog::chain_lattice(2);
        let c = catalog::c4();
        assert!(matches!(direct_product(&[&l, &c]), Err(Error::SignatureMismatch { .. })));
    }

    #[test]
    fn quotient_of_three_chain() {
        let l3 = catalog::chain_lattice(3);
        let theta = Congruence::from_block_ids(vec![0, 1, 1]);
        let (q, proj) = l3.quotient(&theta).unwrap();
        assert_eq!(q.size(), 2);
        assert!(proj.is_homomorphism(&l3, &q));
        assert_eq!(q.eval("meet", &[0, 1]), 0);
        assert_eq!(q.eval("join", &[0, 1]), 1);
        let bad = Congruence::from_block_ids(vec![0, 1, 0]);
        assert!(matches!(l3.quotient(&bad), Err(Error::NotACongruence(_))));
    }

    #[test]
    fn generating_set_generates() {
        for alg in [catalog::c4(), catalog::godel_chain(4), catalog::chain_lattice(3)] {
            let gens = alg.generating_set();
            assert_eq!(alg.closure(&gens).unwrap().len(), alg.size());
        }
    }
}
