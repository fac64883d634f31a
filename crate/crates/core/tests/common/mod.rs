//! Brute-force oracles. Nothing here calls the engine's search code: maps
//! are enumerated as raw functions and checked against the tables.

#![allow(dead_code, clippy::needless_range_loop)]

use amalgam_core::catalog;
use amalgam_core::{Elem, FiniteAlgebra};

/// Catalog algebras with at most four elements.
pub fn small_catalog() -> Vec<FiniteAlgebra> {
    let mut out = vec![catalog::c4(), catalog::boolean_algebra()];
    for k in 1..=4 {
        out.push(catalog::chain_lattice(k));
        out.push(catalog::bare_set(k));
    }
    for k in 2..=4 {
        out.push(catalog::godel_chain(k));
    }
    for n in 1..=3 {
        out.push(catalog::lukasiewicz_chain(n));
    }
    out
}

/// Calls `f` on every tuple in `0..base` of length `len`.
pub fn each_tuple(base: usize, len: usize, mut f: impl FnMut(&[Elem])) {
    if len > 0 && base == 0 {
        return;
    }
    let mut t = vec![0; len];
    loop {
        f(&t);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < base {
                break;
            }
            t[i] = 0;
        }
    }
}

fn table_entry(alg: &FiniteAlgebra, op: usize, args: &[Elem]) -> Elem {
    let n = alg.size();
    let idx = args.iter().fold(0, |acc, &a| acc * n + a);
    alg.ops()[op].table()[idx]
}

/// All set partitions of `0..n` as restricted growth strings.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let limit = if cur.is_empty() { 0 } else { max + 1 };
        for b in 0..=limit {
            cur.push(b);
            rec(n, cur, max.max(b), out);
            cur.pop();
        }
    }
    rec(n, &mut cur, 0, &mut out);
    out
}

pub fn is_compatible(alg: &FiniteAlgebra, p: &[usize]) -> bool {
    let n = alg.size();
    for (op, sym) in alg.signature().symbols().iter().enumerate() {
        let k = sym.arity;
        let mut ok = true;
        each_tuple(n, 2 * k, |t| {
            if !ok {
                return;
            }
            let (x, y) = t.split_at(k);
            if x.iter().zip(y).all(|(&a, &b)| p[a] == p[b])
                && p[table_entry(alg, op, x)] != p[table_entry(alg, op, y)]
            {
                ok = false;
            }
        });
        if !ok {
            return false;
        }
    }
    true
}

/// All congruences, as restricted growth strings.
pub fn brute_congruences(alg: &FiniteAlgebra) -> Vec<Vec<usize>> {
    partitions(alg.size())
        .into_iter()
        .filter(|p| is_compatible(alg, p))
        .collect()
}

/// The least compatible partition containing `pairs`: the meet of all
/// candidates, checked to be a candidate itself.
pub fn brute_cg(alg: &FiniteAlgebra, pairs: &[(Elem, Elem)]) -> Vec<usize> {
    let n = alg.size();
    let candidates: Vec<Vec<usize>> = brute_congruences(alg)
        .into_iter()
        .filter(|p| pairs.iter().all(|&(a, b)| p[a] == p[b]))
        .collect();
    let related = |a: usize, b: usize| candidates.iter().all(|p| p[a] == p[b]);
    let mut ids = vec![usize::MAX; n];
    let mut next = 0;
    for a in 0..n {
        if ids[a] == usize::MAX {
            for b in a..n {
                if related(a, b) {
                    ids[b] = next;
                }
            }
            next += 1;
        }
    }
    assert!(candidates.contains(&ids), "meet of congruences is a congruence");
    ids
}

pub fn is_hom(dom: &FiniteAlgebra, cod: &FiniteAlgebra, f: &[Elem]) -> bool {
    let n = dom.size();
    for (op, sym) in dom.signature().symbols().iter().enumerate() {
        let mut ok = true;
        let mut mapped = vec![0; sym.arity];
        each_tuple(n, sym.arity, |t| {
            if !ok {
                return;
            }
            for (m, &x) in mapped.iter_mut().zip(t) {
                *m = f[x];
            }
            if f[table_entry(dom, op, t)] != table_entry(cod, op, &mapped) {
                ok = false;
            }
        });
        if !ok {
            return false;
        }
    }
    true
}

fn injective(f: &[Elem]) -> bool {
    let mut seen = std::collections::HashSet::new();
    f.iter().all(|x| seen.insert(*x))
}

/// Every homomorphism, found by trying every function.
pub fn brute_homs(dom: &FiniteAlgebra, cod: &FiniteAlgebra, only_injective: bool) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    each_tuple(cod.size(), dom.size(), |f| {
        if (!only_injective || injective(f)) && is_hom(dom, cod, f) {
            out.push(f.to_vec());
        }
    });
    out
}

pub fn brute_isomorphic(a: &FiniteAlgebra, b: &FiniteAlgebra) -> bool {
    a.size() == b.size() && !brute_homs(a, b, true).is_empty()
}

/// The one-sided amalgamation property of `k`, enumerating every doubly
/// injective span without symmetry reduction.
pub fn naive_one_sided_ap(k: &[FiniteAlgebra]) -> bool {
    let n = k.len();
    let all: Vec<Vec<Vec<Vec<Elem>>>> = (0..n)
        .map(|x| (0..n).map(|y| brute_homs(&k[x], &k[y], false)).collect())
        .collect();
    let emb = |x: usize, y: usize| all[x][y].iter().filter(|f| injective(f)).collect::<Vec<_>>();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for fb in emb(a, b) {
                    for fc in emb(a, c) {
                        let closed = (0..n).any(|d| {
                            emb(c, d).iter().any(|gc| {
                                all[b][d]
                                    .iter()
                                    .any(|gb| (0..k[a].size()).all(|x| gb[fb[x]] == gc[fc[x]]))
                            })
                        });
                        if !closed {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// The copy of `alg` in which element `x` is renamed `perm[x]`.
pub fn permuted(alg: &FiniteAlgebra, perm: &[Elem]) -> FiniteAlgebra {
    let n = alg.size();
    let mut inv = vec![0; n];
    for (x, &p) in perm.iter().enumerate() {
        inv[p] = x;
    }
    let labels = alg
        .labels()
        .map(|l| (0..n).map(|y| l[inv[y]].clone()).collect::<Vec<_>>());
    let mut args = Vec::new();
    FiniteAlgebra::from_fn(format!("{}^p", alg.name()), alg.signature().clone(), n, labels, |op, ys| {
        args.clear();
        args.extend(ys.iter().map(|&y| inv[y]));
        perm[table_entry(alg, op, &args)]
    })
    .expect("permuted tables are valid")
}

/// Subsets closed under every operation, by filtering all nonempty subsets.
pub fn brute_subuniverses(alg: &FiniteAlgebra) -> Vec<Vec<Elem>> {
    let n = alg.size();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let members: Vec<Elem> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let mut closed = true;
        for (op, sym) in alg.signature().symbols().iter().enumerate() {
            each_tuple(members.len(), sym.arity, |t| {
                let args: Vec<Elem> = t.iter().map(|&i| members[i]).collect();
                if mask & (1 << table_entry(alg, op, &args)) == 0 {
                    closed = false;
                }
            });
        }
        if closed {
            out.push(members);
        }
    }
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    out
}
