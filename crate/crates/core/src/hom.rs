use serde::{Deserialize, Serialize};

use crate::algebra::{for_each_tuple, Elem, FiniteAlgebra};

/// A total map between universes, stored as its image array.
///
/// Construction does not check preservation; use [`Homomorphism::is_homomorphism`]
/// or [`Homomorphism::checked`] against concrete algebras.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Homomorphism {
    image: Vec<Elem>,
    codomain_size: usize,
}

impl Homomorphism {
    pub fn new(image: Vec<Elem>, codomain_size: usize) -> Self {
        debug_assert!(image.iter().all(|&v| v < codomain_size));
        Homomorphism {
            image,
            codomain_size,
        }
    }

    pub fn identity(size: usize) -> Self {
        Homomorphism::new((0..size).collect(), size)
    }

    /// Builds the map and verifies it against `dom` and `cod`.
    pub fn checked(image: Vec<Elem>, dom: &FiniteAlgebra, cod: &FiniteAlgebra) -> Option<Self> {
        let h = Homomorphism::new(image, cod.size());
        (h.image.len() == dom.size() && h.is_homomorphism(dom, cod)).then_some(h)
    }

    pub fn image(&self) -> &[Elem] {
        &self.image
    }

    pub fn apply(&self, a: Elem) -> Elem {
        self.image[a]
    }

    pub fn domain_size(&self) -> usize {
        self.image.len()
    }

    pub fn codomain_size(&self) -> usize {
        self.codomain_size
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.codomain_size];
        self.image.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.codomain_size];
        for &v in &self.image {
            seen[v] = true;
        }
        seen.into_iter().all(|s| s)
    }

    /// Sorted, deduplicated image set.
    pub fn range(&self) -> Vec<Elem> {
        let mut r = self.image.clone();
        r.sort_unstable();
        r.dedup();
        r
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Homomorphism) -> Homomorphism {
        Homomorphism::new(first.image.iter().map(|&a| self.image[a]).collect(), self.codomain_size)
    }

    /// Full check that every operation is preserved.
    pub fn is_homomorphism(&self, dom: &FiniteAlgebra, cod: &FiniteAlgebra) -> bool {
        if dom.signature() != cod.signature()
            || self.image.len() != dom.size()
            || self.codomain_size != cod.size()
        {
            return false;
        }
        let mut ok = true;
        let mut mapped = Vec::new();
        for (op, sym) in dom.signature().symbols().iter().enumerate() {
            for_each_tuple(dom.size(), sym.arity, |args| {
                if !ok {
                    return;
                }
                mapped.clear();
                mapped.extend(args.iter().map(|&a| self.image[a]));
                if self.image[dom.apply(op, args)] != cod.apply(op, &mapped) {
                    ok = false;
                }
            });
            if !ok {
                return false;
            }
        }
        true
    }

    /// The kernel as block ids in normal form.
    pub fn kernel(&self) -> crate::congruence::Congruence {
        crate::congruence::Congruence::from_block_ids(self.image.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags() {
        let h = Homomorphism::new(vec![0, 2, 1], 3);
        assert!(h.is_injective() && h.is_surjective());
        let c = Homomorphism::new(vec![1, 1], 3);
        assert!(!c.is_injective() && !c.is_surjective());
        assert_eq!(c.range(), vec![1]);
    }

    #[test]
    fn composition() {
        let f = Homomorphism::new(vec![1, 0], 2);
        let g = Homomorphism::new(vec![2, 0], 3);
        assert_eq!(g.after(&f).image(), &[0, 2]);
    }
}
