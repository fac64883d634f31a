//! Isomorphism testing and canonical forms.

use std::cmp::Ordering;
use std::ops::ControlFlow;

use sha2::{Digest, Sha256};

use crate::algebra::{for_each_tuple, Elem, FiniteAlgebra};
use crate::error::Result;
use crate::hom::Homomorphism;
use crate::homsearch::{find_homomorphism, for_each_homomorphism, Require};

/// First isomorphism `a → b` in search order, if any.
pub fn is_isomorphic(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<Option<Homomorphism>> {
    a.check_same_signature(b)?;
    if a.size() != b.size() {
        return Ok(None);
    }
    find_homomorphism(a, b, &[], Require::Injective)
}

/// All automorphisms, identity first.
pub fn automorphisms(a: &FiniteAlgebra) -> Vec<Homomorphism> {
    let mut out = Vec::new();
    for_each_homomorphism(a, a, &[], Require::Injective, |h| {
        out.push(h);
        ControlFlow::Continue(())
    })
    .expect("an algebra shares its own signature");
    out.sort_by(|x, y| {
        let ix = x.image().iter().enumerate().all(|(i, &v)| i == v);
        let iy = y.image().iter().enumerate().all(|(i, &v)| i == v);
        iy.cmp(&ix).then_with(|| x.cmp(y))
    });
    out
}

/// A labelling-independent encoding of an algebra: two algebras of one
/// signature have equal forms exactly when they are isomorphic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    words: Vec<u32>,
}

impl CanonicalForm {
    pub fn as_words(&self) -> &[u32] {
        &self.words
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.words.iter().flat_map(|w| w.to_be_bytes()).collect()
    }

    /// Hex SHA-256 of the encoding.
    pub fn hash_hex(&self) -> String {
        hex::encode(Sha256::digest(self.to_bytes()))
    }
}

/// Minimum encoding over the orderings reachable by individualization and
/// refinement, starting from colour refinement of the element invariants.
pub fn canonical_form(a: &FiniteAlgebra) -> CanonicalForm {
    canonical_labelling(a).0
}

/// The canonical form together with the ordering realising it:
/// `order[i]` is the element placed at position `i`.
pub fn canonical_labelling(a: &FiniteAlgebra) -> (CanonicalForm, Vec<Elem>) {
    let colours = refine(a, vec![0; a.size()]);
    let mut best: Option<(Vec<u32>, Vec<Elem>)> = None;
    search(a, colours, &mut best);
    let (words, order) = best.expect("search visits at least one leaf");
    let mut header: Vec<u32> = Vec::new();
    for sym in a.signature().symbols() {
        header.push(sym.name.len() as u32);
        header.extend(sym.name.bytes().map(u32::from));
        header.push(sym.arity as u32);
    }
    header.push(u32::MAX);
    header.extend(words);
    (CanonicalForm { words: header }, order)
}

fn search(a: &FiniteAlgebra, colours: Vec<usize>, best: &mut Option<(Vec<u32>, Vec<Elem>)>) {
    let n = a.size();
    let cells = num_colours(&colours);
    if cells == n {
        let mut order = vec![0; n];
        for (x, &c) in colours.iter().enumerate() {
            order[c] = x;
        }
        let words = encode(a, &order, &colours);
        let better = match best {
            None => true,
            Some((b, _)) => words.cmp(b) == Ordering::Less,
        };
        if better {
            *best = Some((words, order));
        }
        return;
    }
    // first smallest non-singleton cell
    let mut size_of = vec![0usize; cells];
    for &c in &colours {
        size_of[c] += 1;
    }
    let target = (0..cells)
        .filter(|&c| size_of[c] > 1)
        .min_by_key(|&c| (size_of[c], c))
        .expect("some cell is not a singleton");
    for x in 0..n {
        if colours[x] != target {
            continue;
        }
        // individualize x ahead of the rest of its cell
        let split: Vec<(usize, bool)> = colours.iter().enumerate().map(|(y, &c)| (c, !(y == x))).collect();
        let next = refine(a, rank(&split));
        search(a, next, best);
    }
}

fn encode(a: &FiniteAlgebra, order: &[Elem], position: &[usize]) -> Vec<u32> {
    let n = a.size();
    let mut words = vec![n as u32];
    let mut args = Vec::new();
    for (op, sym) in a.signature().symbols().iter().enumerate() {
        for_each_tuple(n, sym.arity, |t| {
            args.clear();
            args.extend(t.iter().map(|&i| order[i]));
            words.push(position[a.apply(op, &args)] as u32);
        });
    }
    words
}

fn num_colours(colours: &[usize]) -> usize {
    colours.iter().copied().max().map_or(0, |m| m + 1)
}

/// Dense ranks of arbitrary ordered keys.
fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("key present"))
        .collect()
}

/// Colour refinement: each element is recoloured by its colour and the
/// sorted multiset of (operation, position, other argument colours, result
/// colour) over every tuple it occurs in, until stable. Constants are
/// distinguished up front.
fn refine(a: &FiniteAlgebra, mut colours: Vec<usize>) -> Vec<usize> {
    let n = a.size();
    let mut constant_mark = vec![Vec::new(); n];
    for (op, sym) in a.signature().symbols().iter().enumerate() {
        if sym.arity == 0 {
            constant_mark[a.apply(op, &[])].push(op);
        }
    }
    colours = rank(&colours.iter().zip(&constant_mark).map(|(&c, m)| (c, m.clone())).collect::<Vec<_>>());
    loop {
        // Per element: current colour, then (op, position, other argument colours, result colour).
        type Key = (usize, Vec<(usize, usize, Vec<usize>, usize)>);
        let mut keys: Vec<Key> =
            colours.iter().map(|&c| (c, Vec::new())).collect();
        let mut args = Vec::new();
        for (op, sym) in a.signature().symbols().iter().enumerate() {
            let k = sym.arity;
            if k == 0 {
                continue;
            }
            for_each_tuple(n, k, |t| {
                args.clear();
                args.extend_from_slice(t);
                let r = colours[a.apply(op, &args)];
                for pos in 0..k {
                    let others: Vec<usize> = (0..k).filter(|&i| i != pos).map(|i| colours[t[i]]).collect();
                    keys[t[pos]].1.push((op, pos, others, r));
                }
            });
        }
        for key in &mut keys {
            key.1.sort();
        }
        let next = rank(&keys);
        if num_colours(&next) == num_colours(&colours) {
            return next;
        }
        colours = next;
    }
}

/// The algebra relabelled into canonical order; isomorphic inputs give
/// equal outputs.
pub fn canonical_representative(a: &FiniteAlgebra) -> FiniteAlgebra {
    let (_, order) = canonical_labelling(a);
    let mut position = vec![0; a.size()];
    for (i, &x) in order.iter().enumerate() {
        position[x] = i;
    }
    let labels = a.labels().map(|_| order.iter().map(|&x| a.label(x)).collect());
    let mut args = Vec::new();
    FiniteAlgebra::from_fn(a.name(), a.signature().clone(), a.size(), labels, |op, t| {
        args.clear();
        args.extend(t.iter().map(|&i| order[i]));
        position[a.apply(op, &args)]
    })
    .expect("relabelling preserves validity")
}
