use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::{principal_congruence, Congruence};
use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};

/// A finite lattice given by its order and its join/meet tables over
/// element indices.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteLattice {
    size: usize,
    leq: Vec<Vec<bool>>,
    join: Vec<Vec<usize>>,
    meet: Vec<Vec<usize>>,
}

impl FiniteLattice {
    /// From an order relation, which must be a lattice order.
    pub fn from_order(leq: Vec<Vec<bool>>) -> Result<Self> {
        let n = leq.len();
        let bound = |x: usize, y: usize, upper: bool| -> Option<usize> {
            let candidates: Vec<usize> = (0..n)
                .filter(|&z| if upper { leq[x][z] && leq[y][z] } else { leq[z][x] && leq[z][y] })
                .collect();
            candidates.iter().copied().find(|&z| {
                candidates
                    .iter()
                    .all(|&w| if upper { leq[z][w] } else { leq[w][z] })
            })
        };
        let mut join = vec![vec![0; n]; n];
        let mut meet = vec![vec![0; n]; n];
        for x in 0..n {
            for y in 0..n {
                join[x][y] = bound(x, y, true)
                    .ok_or_else(|| Error::InvalidInput(format!("no least upper bound of {x} and {y}")))?;
                meet[x][y] = bound(x, y, false)
                    .ok_or_else(|| Error::InvalidInput(format!("no greatest lower bound of {x} and {y}")))?;
            }
        }
        Ok(FiniteLattice { size: n, leq, join, meet })
    }

    /// Reads a lattice off an algebra with binary meet and join tables.
    pub fn from_algebra(alg: &FiniteAlgebra, meet_op: &str, join_op: &str) -> Result<Self> {
        let m = alg
            .op_index(meet_op)
            .ok_or_else(|| Error::InvalidInput(format!("no operation `{meet_op}`")))?;
        let j = alg
            .op_index(join_op)
            .ok_or_else(|| Error::InvalidInput(format!("no operation `{join_op}`")))?;
        let n = alg.size();
        let meet: Vec<Vec<usize>> = (0..n).map(|x| (0..n).map(|y| alg.apply(m, &[x, y])).collect()).collect();
        let join: Vec<Vec<usize>> = (0..n).map(|x| (0..n).map(|y| alg.apply(j, &[x, y])).collect()).collect();
        let leq: Vec<Vec<bool>> = (0..n).map(|x| (0..n).map(|y| meet[x][y] == x).collect()).collect();
        let lattice = FiniteLattice::from_order(leq)?;
        if lattice.meet != meet || lattice.join != join {
            return Err(Error::InvalidInput(format!("`{}` is not a lattice", alg.name())));
        }
        Ok(lattice)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x][y]
    }

    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x][y]
    }

    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x][y]
    }

    pub fn top(&self) -> usize {
        (0..self.size).find(|&t| (0..self.size).all(|x| self.leq[x][t])).expect("finite lattice has a top")
    }

    pub fn bottom(&self) -> usize {
        (0..self.size).find(|&b| (0..self.size).all(|x| self.leq[b][x])).expect("finite lattice has a bottom")
    }

    pub fn upper_covers(&self, x: usize) -> Vec<usize> {
        let above: Vec<usize> = (0..self.size).filter(|&y| y != x && self.leq[x][y]).collect();
        above
            .iter()
            .copied()
            .filter(|&y| !above.iter().any(|&z| z != y && self.leq[z][y]))
            .collect()
    }

    /// No pair `y, z` distinct from `x` with `x = y ∧ z`. The top qualifies.
    pub fn is_meet_irreducible(&self, x: usize) -> bool {
        for y in 0..self.size {
            if y == x {
                continue;
            }
            for z in 0..self.size {
                if z != x && self.meet[y][z] == x {
                    return false;
                }
            }
        }
        true
    }

    /// Finite case: not the top and exactly one upper cover.
    pub fn is_completely_meet_irreducible(&self, x: usize) -> bool {
        self.upper_covers(x).len() == 1
    }

    /// First triple violating `x ∧ (y ∨ z) = (x ∧ y) ∨ (x ∧ z)`.
    pub fn distributivity_violation(&self) -> Option<(usize, usize, usize)> {
        for x in 0..self.size {
            for y in 0..self.size {
                for z in 0..self.size {
                    let lhs = self.meet[x][self.join[y][z]];
                    let rhs = self.join[self.meet[x][y]][self.meet[x][z]];
                    if lhs != rhs {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    pub fn is_distributive(&self) -> bool {
        self.distributivity_violation().is_none()
    }
}

/// `Con(A)`: every congruence once, ordered by number of blocks descending
/// and then by normal form, so index 0 is `Δ` and the last index is the
/// total congruence.
#[derive(Clone, Debug)]
pub struct CongruenceLattice {
    elements: Vec<Congruence>,
    index: HashMap<Congruence, usize>,
    lattice: FiniteLattice,
}

impl CongruenceLattice {
    /// Join-closure of `Δ` and the principal congruences.
    pub fn compute(alg: &FiniteAlgebra, limit: usize) -> Result<Self> {
        let n = alg.size();
        let mut principals: Vec<Congruence> = Vec::new();
        let mut seen_principal = HashSet::new();
        for a in 0..n {
            for b in a + 1..n {
                let p = principal_congruence(alg, a, b);
                if seen_principal.insert(p.clone()) {
                    principals.push(p);
                }
            }
        }
        let bottom = Congruence::identity(n);
        let mut found: HashSet<Congruence> = HashSet::new();
        found.insert(bottom.clone());
        let mut queue = vec![bottom];
        while let Some(theta) = queue.pop() {
            for p in &principals {
                if p.leq(&theta) {
                    continue;
                }
                let j = theta.join(p);
                if !found.contains(&j) {
                    if found.len() >= limit {
                        return Err(Error::resource("congruence lattice size", limit));
                    }
                    found.insert(j.clone());
                    queue.push(j);
                }
            }
        }
        let mut elements: Vec<Congruence> = found.into_iter().collect();
        elements.sort_by(|x, y| y.num_blocks().cmp(&x.num_blocks()).then_with(|| x.cmp(y)));
        Ok(Self::from_elements(elements))
    }

    fn from_elements(elements: Vec<Congruence>) -> Self {
        let index: HashMap<Congruence, usize> = elements.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let m = elements.len();
        let leq: Vec<Vec<bool>> = (0..m)
            .map(|i| (0..m).map(|j| elements[i].leq(&elements[j])).collect())
            .collect();
        let join: Vec<Vec<usize>> = (0..m)
            .map(|i| (0..m).map(|j| index[&elements[i].join(&elements[j])]).collect())
            .collect();
        let meet: Vec<Vec<usize>> = (0..m)
            .map(|i| (0..m).map(|j| index[&elements[i].meet(&elements[j])]).collect())
            .collect();
        CongruenceLattice {
            elements,
            index,
            lattice: FiniteLattice { size: m, leq, join, meet },
        }
    }

    pub fn elements(&self) -> &[Congruence] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, theta: &Congruence) -> Option<usize> {
        self.index.get(theta).copied()
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn bottom(&self) -> &Congruence {
        &self.elements[0]
    }

    pub fn top(&self) -> &Congruence {
        self.elements.last().expect("Con(A) is nonempty")
    }

    pub fn is_meet_irreducible(&self, theta: &Congruence) -> bool {
        self.index_of(theta).is_some_and(|i| self.lattice.is_meet_irreducible(i))
    }

    pub fn is_completely_meet_irreducible(&self, theta: &Congruence) -> bool {
        self.index_of(theta)
            .is_some_and(|i| self.lattice.is_completely_meet_irreducible(i))
    }

    pub fn is_distributive(&self) -> bool {
        self.lattice.is_distributive()
    }

    /// JSON shape `{elements: [[blocks]...], leq: [[bool]...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "elements": self.elements,
            "leq": self.lattice.leq,
        })
    }
}

/// `Δ_A` meet-irreducible in `Con(A)`. The one-element algebra qualifies.
pub fn is_fsi(alg: &FiniteAlgebra, limit: usize) -> Result<bool> {
    let con = CongruenceLattice::compute(alg, limit)?;
    Ok(con.lattice.is_meet_irreducible(0))
}

/// `Δ_A` completely meet-irreducible in `Con(A)`.
pub fn is_si(alg: &FiniteAlgebra, limit: usize) -> Result<bool> {
    let con = CongruenceLattice::compute(alg, limit)?;
    Ok(con.lattice.is_completely_meet_irreducible(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::direct_product;
    use crate::catalog;

    #[test]
    fn two_lattice_has_two_congruences() {
        let con = CongruenceLattice::compute(&catalog::chain_lattice(2), 100).unwrap();
        assert_eq!(con.len(), 2);
        assert!(con.bottom().is_identity() && con.top().is_total());
    }

    #[test]
    fn three_chain_has_four_congruences() {
        let con = CongruenceLattice::compute(&catalog::chain_lattice(3), 100).unwrap();
        assert_eq!(con.len(), 4);
        assert!(con.is_distributive());
        assert!(con.index_of(&Congruence::from_blocks(3, &[vec![0, 2]])).is_none());
    }

    #[test]
    fn s2_is_simple() {
        let con = CongruenceLattice::compute(&catalog::lukasiewicz_chain(2), 100).unwrap();
        assert_eq!(con.len(), 2);
    }

    #[test]
    fn top_is_meet_irreducible_but_not_completely() {
        let con = CongruenceLattice::compute(&catalog::chain_lattice(3), 100).unwrap();
        let top = con.top().clone();
        assert!(con.is_meet_irreducible(&top));
        assert!(!con.is_completely_meet_irreducible(&top));
    }

    #[test]
    fn irreducibility_of_identity() {
        let l2 = catalog::chain_lattice(2);
        let con = CongruenceLattice::compute(&l2, 100).unwrap();
        let delta = con.bottom().clone();
        assert!(con.is_meet_irreducible(&delta) && con.is_completely_meet_irreducible(&delta));

        let (sq, _) = direct_product(&[&l2, &l2]).unwrap();
        let con = CongruenceLattice::compute(&sq, 100).unwrap();
        assert_eq!(con.len(), 4);
        assert!(!con.is_meet_irreducible(con.bottom()));
    }

    #[test]
    fn fsi_and_si() {
        let triv = catalog::chain_lattice(1);
        assert!(is_fsi(&triv, 10).unwrap());
        assert!(!is_si(&triv, 10).unwrap());
        let l2 = catalog::chain_lattice(2);
        assert!(is_fsi(&l2, 10).unwrap() && is_si(&l2, 10).unwrap());
        let (sq, _) = direct_product(&[&l2, &l2]).unwrap();
        assert!(!is_fsi(&sq, 10).unwrap());
    }

    #[test]
    fn m3_is_not_distributive() {
        let m3 = FiniteLattice::from_algebra(&catalog::diamond_m3(), "meet", "join").unwrap();
        let (x, y, z) = m3.distributivity_violation().expect("M3 violates distributivity");
        assert_ne!(m3.meet(x, m3.join(y, z)), m3.join(m3.meet(x, y), m3.meet(x, z)));
    }

    #[test]
    fn chains_are_distributive() {
        let chain = FiniteLattice::from_algebra(&catalog::chain_lattice(5), "meet", "join").unwrap();
        assert!(chain.is_distributive());
    }

    #[test]
    fn congruence_limit() {
        assert!(CongruenceLattice::compute(&catalog::chain_lattice(4), 3)
            .unwrap_err()
            .is_resource_limit());
    }
}
