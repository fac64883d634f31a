//! Varieties generated by finitely many finite algebras: the class of
//! homomorphic images of subalgebras, its FSI part, and term conditions.

mod free;

pub use free::{free_algebra, has_jonsson_terms, has_malcev_term, Detection, FreeAlgebra, TermCheck, TermClosure};

use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{FiniteAlgebra, SubUniverse};
use crate::algebra_set::AlgebraSet;
use crate::congruence::{is_fsi, CongruenceLattice};
use crate::error::{Error, Result};
use crate::iso::{canonical_form, CanonicalForm};
use crate::limits::Limits;

/// A nonempty family of finite algebras of one signature, with the budgets
/// used for everything computed from it.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    generators: Vec<FiniteAlgebra>,
    limits: Limits,
}

impl GeneratorSet {
    pub fn new(generators: Vec<FiniteAlgebra>, limits: Limits) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::InvalidInput("no generating algebras given".into()))?;
        for g in &generators[1..] {
            first.check_same_signature(g)?;
        }
        for g in &generators {
            if g.size() > limits.max_algebra_size {
                return Err(Error::resource(
                    format!("size of `{}` ({})", g.name(), g.size()),
                    limits.max_algebra_size,
                ));
            }
        }
        Ok(GeneratorSet { generators, limits })
    }

    pub fn generators(&self) -> &[FiniteAlgebra] {
        &self.generators
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    /// The union of two generating families.
    pub fn union(&self, other: &GeneratorSet) -> Result<GeneratorSet> {
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        GeneratorSet::new(gens, self.limits)
    }
}

/// `HS(G)` up to isomorphism: quotients of subalgebras of the generators.
/// Expansion runs in parallel per subalgebra; the merge is sequential in
/// generator, subuniverse and congruence order.
pub fn hs_closure(g: &GeneratorSet) -> Result<AlgebraSet> {
    let limits = g.limits();
    let mut jobs: Vec<(usize, SubUniverse)> = Vec::new();
    for (i, a) in g.generators().iter().enumerate() {
        for sub in a.all_subuniverses(limits.max_subuniverses)? {
            jobs.push((i, sub));
        }
    }
    let expanded: Vec<Vec<(FiniteAlgebra, CanonicalForm)>> = jobs
        .par_iter()
        .map(|(i, sub)| -> Result<Vec<(FiniteAlgebra, CanonicalForm)>> {
            let s = g.generators()[*i].subalgebra(sub)?;
            let con = CongruenceLattice::compute(&s, limits.max_congruences)?;
            let mut out = Vec::with_capacity(con.len());
            for theta in con.elements() {
                let (q, _) = s.quotient(theta)?;
                let form = canonical_form(&q);
                out.push((q, form));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut set = AlgebraSet::new();
    for (q, form) in expanded.into_iter().flatten() {
        if set.position_of_form(&form).is_none() {
            if set.len() >= limits.max_class {
                return Err(Error::resource("class size", limits.max_class));
            }
            set.insert_with_form(q, form)?;
        }
    }
    Ok(set)
}

/// The FSI members of `HS(G)`.
pub fn fsi_star(g: &GeneratorSet) -> Result<AlgebraSet> {
    let hs = hs_closure(g)?;
    fsi_filter(&hs, g.limits())
}

pub(crate) fn fsi_filter(hs: &AlgebraSet, limits: &Limits) -> Result<AlgebraSet> {
    hs.filter(|a| is_fsi(a, limits.max_congruences))
}

#[derive(Clone, Debug)]
pub struct SubClosure {
    pub holds: bool,
    /// A member with a subalgebra that is not FSI.
    pub witness: Option<(Arc<FiniteAlgebra>, SubUniverse)>,
}

impl SubClosure {
    pub fn witness_json(&self) -> Option<serde_json::Value> {
        self.witness.as_ref().map(|(b, sub)| {
            serde_json::json!({
                "B": b.name(),
                "A": sub.members(),
                "A_labels": sub.members().iter().map(|&m| b.label(m)).collect::<Vec<_>>(),
            })
        })
    }
}

/// Whether every subalgebra of every member is FSI.
pub fn fsi_sub_closed(k: &AlgebraSet, limits: &Limits) -> Result<SubClosure> {
    for b in k.members() {
        for sub in b.all_subuniverses(limits.max_subuniverses)? {
            let a = b.subalgebra(&sub)?;
            if !is_fsi(&a, limits.max_congruences)? {
                return Ok(SubClosure {
                    holds: false,
                    witness: Some((b.clone(), sub)),
                });
            }
        }
    }
    Ok(SubClosure {
        holds: true,
        witness: None,
    })
}
