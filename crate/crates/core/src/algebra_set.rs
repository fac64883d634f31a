use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::iso::{canonical_form, CanonicalForm};

/// A finite set of pairwise non-isomorphic algebras of one signature,
/// ordered by size and then by canonical form.
#[derive(Clone, Debug, Default)]
pub struct AlgebraSet {
    members: Vec<Arc<FiniteAlgebra>>,
    forms: Vec<CanonicalForm>,
}

impl AlgebraSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Deduplicates by canonical form; the first algebra seen for each
    /// isomorphism type is kept.
    pub fn from_algebras(algs: impl IntoIterator<Item = FiniteAlgebra>) -> Result<Self> {
        let mut set = AlgebraSet::new();
        for a in algs {
            set.insert(a)?;
        }
        Ok(set)
    }

    /// Inserts unless an isomorphic member exists; returns whether it was new.
    pub fn insert(&mut self, alg: FiniteAlgebra) -> Result<bool> {
        let form = canonical_form(&alg);
        self.insert_with_form(alg, form)
    }

    pub(crate) fn insert_with_form(&mut self, alg: FiniteAlgebra, form: CanonicalForm) -> Result<bool> {
        if let Some(first) = self.members.first() {
            if first.signature() != alg.signature() {
                return Err(Error::SignatureMismatch {
                    left: first.name().to_string(),
                    right: alg.name().to_string(),
                });
            }
        }
        let key = (alg.size(), &form);
        let pos = self
            .members
            .iter()
            .zip(&self.forms)
            .position(|(m, f)| (m.size(), f) >= key);
        if let Some(p) = pos {
            if self.forms[p] == form {
                return Ok(false);
            }
            self.members.insert(p, Arc::new(alg));
            self.forms.insert(p, form);
        } else {
            self.members.push(Arc::new(alg));
            self.forms.push(form);
        }
        Ok(true)
    }

    pub fn members(&self) -> &[Arc<FiniteAlgebra>] {
        &self.members
    }

    pub fn forms(&self) -> &[CanonicalForm] {
        &self.forms
    }

    pub fn get(&self, i: usize) -> &FiniteAlgebra {
        &self.members[i]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FiniteAlgebra> {
        self.members.iter().map(|m| m.as_ref())
    }

    /// Index of the member isomorphic to `alg`.
    pub fn position_of(&self, alg: &FiniteAlgebra) -> Option<usize> {
        self.position_of_form(&canonical_form(alg))
    }

    pub fn position_of_form(&self, form: &CanonicalForm) -> Option<usize> {
        self.forms.iter().position(|f| f == form)
    }

    pub fn contains(&self, alg: &FiniteAlgebra) -> bool {
        self.position_of(alg).is_some()
    }

    pub fn has_trivial(&self) -> bool {
        self.members.iter().any(|m| m.is_trivial())
    }

    /// Members keyed by canonical hash.
    pub fn by_hash(&self) -> BTreeMap<String, usize> {
        self.forms.iter().enumerate().map(|(i, f)| (f.hash_hex(), i)).collect()
    }

    pub fn filter(&self, mut keep: impl FnMut(&FiniteAlgebra) -> Result<bool>) -> Result<AlgebraSet> {
        let mut out = AlgebraSet::new();
        for (m, f) in self.members.iter().zip(&self.forms) {
            if keep(m)? {
                out.members.push(m.clone());
                out.forms.push(f.clone());
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn deduplicates_and_orders() {
        let set = AlgebraSet::from_algebras([
            catalog::chain_lattice(3),
            catalog::chain_lattice(1),
            catalog::chain_lattice(2),
            catalog::chain_lattice(3).with_name("again"),
        ])
        .unwrap();
        assert_eq!(set.len(), 3);
        let sizes: Vec<usize> = set.iter().map(|a| a.size()).collect();
        assert_eq!(sizes, vec![1, 2, 3]);
        assert_eq!(set.get(2).name(), "L3");
        assert!(set.has_trivial());
    }

    #[test]
    fn rejects_mixed_signatures() {
        let mut set = AlgebraSet::new();
        set.insert(catalog::chain_lattice(2)).unwrap();
        assert!(set.insert(catalog::c4()).is_err());
    }
}
