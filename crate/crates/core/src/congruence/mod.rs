//! Congruences stored as normalized partitions, their generation, and the
//! congruence lattice.

mod extension;
mod lattice;

pub use extension::{has_cep, has_cep_with, separating_meet_irreducible, CepCheck, CepFailure};
pub use lattice::{is_fsi, is_si, CongruenceLattice, FiniteLattice};

use serde::{Serialize, Serializer};

use crate::algebra::{Elem, FiniteAlgebra, SubUniverse};

/// A partition of `{0..n}` in normal form: block ids are numbered by first
/// occurrence, so `block_of[0] == 0`. Equality of values is equality of
/// partitions.
///
/// Values produced by this module are compatible with the algebra they were
/// computed for; [`Congruence::from_block_ids`] accepts any partition and
/// [`Congruence::compatibility_violation`] checks it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    block_of: Vec<usize>,
}

impl Congruence {
    /// Normalizes arbitrary block labels.
    pub fn from_block_ids<T: Copy + Eq + std::hash::Hash>(ids: impl IntoIterator<Item = T>) -> Self {
        let mut seen: std::collections::HashMap<T, usize> = std::collections::HashMap::new();
        let block_of = ids
            .into_iter()
            .map(|id| {
                let next = seen.len();
                *seen.entry(id).or_insert(next)
            })
            .collect();
        Congruence { block_of }
    }

    /// Builds a partition from explicit blocks; elements not mentioned stay singletons.
    pub fn from_blocks(size: usize, blocks: &[Vec<Elem>]) -> Self {
        let mut ids: Vec<usize> = (0..size).map(|a| blocks.len() + a).collect();
        for (i, blk) in blocks.iter().enumerate() {
            for &a in blk {
                ids[a] = i;
            }
        }
        Congruence::from_block_ids(ids)
    }

    pub fn identity(size: usize) -> Self {
        Congruence {
            block_of: (0..size).collect(),
        }
    }

    pub fn total(size: usize) -> Self {
        Congruence {
            block_of: vec![0; size],
        }
    }

    pub fn size(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_of(&self, a: Elem) -> usize {
        self.block_of[a]
    }

    pub fn block_ids(&self) -> &[usize] {
        &self.block_of
    }

    pub fn num_blocks(&self) -> usize {
        self.block_of.iter().copied().max().map_or(0, |m| m + 1)
    }

    pub fn related(&self, a: Elem, b: Elem) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    pub fn is_identity(&self) -> bool {
        self.num_blocks() == self.size()
    }

    pub fn is_total(&self) -> bool {
        self.num_blocks() <= 1
    }

    pub fn blocks(&self) -> Vec<Vec<Elem>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (a, &b) in self.block_of.iter().enumerate() {
            blocks[b].push(a);
        }
        blocks
    }

    /// Least member of each block, in block order.
    pub fn representatives(&self) -> Vec<Elem> {
        let mut reps = Vec::with_capacity(self.num_blocks());
        for (a, &b) in self.block_of.iter().enumerate() {
            if b == reps.len() {
                reps.push(a);
            }
        }
        reps
    }

    /// Related pairs `(a, b)` with `a < b`.
    pub fn pairs(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for a in 0..self.size() {
            for b in a + 1..self.size() {
                if self.related(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Refinement order: `self ⊆ other` as relations.
    pub fn leq(&self, other: &Congruence) -> bool {
        let mut image = vec![usize::MAX; self.num_blocks()];
        for (a, &b) in self.block_of.iter().enumerate() {
            let target = other.block_of[a];
            if image[b] == usize::MAX {
                image[b] = target;
            } else if image[b] != target {
                return false;
            }
        }
        true
    }

    /// Intersection of the relations.
    pub fn meet(&self, other: &Congruence) -> Congruence {
        Congruence::from_block_ids(self.block_of.iter().zip(&other.block_of).map(|(&x, &y)| (x, y)))
    }

    /// Transitive closure of the union. For two congruences of one algebra
    /// this is again a congruence.
    pub fn join(&self, other: &Congruence) -> Congruence {
        let mut uf = UnionFind::from_partition(self);
        let reps = other.representatives();
        for (a, &b) in other.block_of.iter().enumerate() {
            uf.union(a, reps[b]);
        }
        uf.into_congruence()
    }

    /// First violation of compatibility: an operation and two related
    /// elements whose translates are unrelated.
    pub fn compatibility_violation(&self, alg: &FiniteAlgebra) -> Option<(usize, Elem, Elem)> {
        let n = alg.size();
        let blocks = self.blocks();
        let mut args = Vec::new();
        let mut args2 = Vec::new();
        for (op, sym) in alg.signature().symbols().iter().enumerate() {
            if sym.arity == 0 {
                continue;
            }
            for blk in &blocks {
                for w in blk.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    for pos in 0..sym.arity {
                        let mut found = None;
                        crate::algebra::for_each_tuple(n, sym.arity - 1, |rest| {
                            if found.is_some() {
                                return;
                            }
                            fill(&mut args, rest, pos, a);
                            fill(&mut args2, rest, pos, b);
                            if !self.related(alg.apply(op, &args), alg.apply(op, &args2)) {
                                found = Some((op, a, b));
                            }
                        });
                        if found.is_some() {
                            return found;
                        }
                    }
                }
            }
        }
        None
    }

    pub fn is_congruence_of(&self, alg: &FiniteAlgebra) -> bool {
        self.size() == alg.size() && self.compatibility_violation(alg).is_none()
    }

    /// Blocks rendered with the algebra's labels, e.g. `{-2,-1}{1}`.
    pub fn display(&self, alg: &FiniteAlgebra) -> String {
        self.blocks()
            .iter()
            .map(|b| format!("{{{}}}", b.iter().map(|&a| alg.label(a)).collect::<Vec<_>>().join(",")))
            .collect()
    }

    /// `θ ∩ A²`, indexed by the subuniverse's induced order.
    pub fn restrict(&self, sub: &SubUniverse) -> Congruence {
        Congruence::from_block_ids(sub.members().iter().map(|&m| self.block_of[m]))
    }

    /// Pairs of a congruence on a subalgebra, translated into parent indices.
    pub fn lift_pairs(&self, sub: &SubUniverse) -> Vec<(Elem, Elem)> {
        self.pairs()
            .into_iter()
            .map(|(a, b)| (sub.members()[a], sub.members()[b]))
            .collect()
    }
}

impl Serialize for Congruence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.blocks().serialize(serializer)
    }
}

fn fill(args: &mut Vec<Elem>, rest: &[Elem], pos: usize, value: Elem) {
    args.clear();
    args.extend_from_slice(&rest[..pos]);
    args.push(value);
    args.extend_from_slice(&rest[pos..]);
}

/// Least congruence containing `pairs`: union-find seeded with the pairs and
/// saturated under every unary translation, driven by a worklist of merges.
pub fn congruence_generated(alg: &FiniteAlgebra, pairs: &[(Elem, Elem)]) -> Congruence {
    join_generated(alg, &Congruence::identity(alg.size()), pairs)
}

/// `θ ∨ Cg(pairs)` for a congruence `θ` of `alg`.
pub fn join_generated(alg: &FiniteAlgebra, theta: &Congruence, pairs: &[(Elem, Elem)]) -> Congruence {
    let n = alg.size();
    let mut uf = UnionFind::from_partition(theta);
    let mut work: Vec<(Elem, Elem)> = Vec::new();
    for &(a, b) in pairs {
        if uf.union(a, b) {
            work.push((a, b));
        }
    }
    let symbols = alg.signature().symbols();
    let mut args = Vec::new();
    let mut args2 = Vec::new();
    while let Some((a, b)) = work.pop() {
        for (op, sym) in symbols.iter().enumerate() {
            if sym.arity == 0 {
                continue;
            }
            for pos in 0..sym.arity {
                crate::algebra::for_each_tuple(n, sym.arity - 1, |rest| {
                    fill(&mut args, rest, pos, a);
                    fill(&mut args2, rest, pos, b);
                    let x = alg.apply(op, &args);
                    let y = alg.apply(op, &args2);
                    if uf.union(x, y) {
                        work.push((x, y));
                    }
                });
            }
        }
    }
    uf.into_congruence()
}

pub fn principal_congruence(alg: &FiniteAlgebra, a: Elem, b: Elem) -> Congruence {
    congruence_generated(alg, &[(a, b)])
}

/// `Cg_B(θ)` for a congruence `θ` of the subalgebra on `sub`.
pub fn extend_from_subalgebra(parent: &FiniteAlgebra, sub: &SubUniverse, theta: &Congruence) -> Congruence {
    congruence_generated(parent, &theta.lift_pairs(sub))
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn from_partition(theta: &Congruence) -> Self {
        let reps = theta.representatives();
        UnionFind {
            parent: theta.block_ids().iter().map(|&b| reps[b]).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// Returns `true` when two distinct classes were merged.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    pub(crate) fn into_congruence(mut self) -> Congruence {
        let ids: Vec<usize> = (0..self.parent.len()).map(|a| self.find(a)).collect();
        Congruence::from_block_ids(ids)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn normal_form() {
        let c = Congruence::from_block_ids([5, 5, 2, 5]);
        assert_eq!(c.block_ids(), &[0, 0, 1, 0]);
        assert_eq!(c.blocks(), vec![vec![0, 1, 3], vec![2]]);
        assert_eq!(c.representatives(), vec![0, 2]);
    }

    #[test]
    fn reflexive_pair_generates_identity() {
        let l = catalog::chain_lattice(3);
        assert_eq!(congruence_generated(&l, &[(1, 1)]), Congruence::identity(3));
        assert_eq!(principal_congruence(&l, 2, 2), Congruence::identity(3));
    }

    #[test]
    fn three_chain_principals() {
        let l = catalog::chain_lattice(3);
        assert_eq!(principal_congruence(&l, 0, 1).blocks(), vec![vec![0, 1], vec![2]]);
        assert_eq!(principal_congruence(&l, 1, 2).blocks(), vec![vec![0], vec![1, 2]]);
        assert!(principal_congruence(&l, 0, 2).is_total());
    }

    #[test]
    fn c4_theta_generates_total() {
        let c4 = catalog::c4();
        let m2 = c4.index_of_label("-2").unwrap();
        let m1 = c4.index_of_label("-1").unwrap();
        assert!(congruence_generated(&c4, &[(m1, m2), (m2, m1)]).is_total());
        assert!(principal_congruence(&c4, m1, m2).is_total());
    }

    #[test]
    fn restriction_edge_cases() {
        let c4 = catalog::c4();
        let sub = c4.subuniverse_closure(&[0, 1]).unwrap();
        assert_eq!(Congruence::identity(4).restrict(&sub), Congruence::identity(sub.len()));
        assert_eq!(Congruence::total(4).restrict(&sub), Congruence::total(sub.len()));
    }

    #[test]
    fn lattice_ops_on_partitions() {
        let x = Congruence::from_blocks(4, &[vec![0, 1]]);
        let y = Congruence::from_blocks(4, &[vec![1, 2]]);
        assert_eq!(x.join(&y).blocks(), vec![vec![0, 1, 2], vec![3]]);
        assert!(x.meet(&y).is_identity());
        assert!(x.leq(&x.join(&y)));
        assert!(!x.leq(&y));
    }
}
