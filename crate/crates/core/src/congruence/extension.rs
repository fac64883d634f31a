use serde::Serialize;

use super::{congruence_generated, Congruence, CongruenceLattice};
use crate::algebra::{Elem, FiniteAlgebra, SubUniverse};
use crate::error::{Error, Result};
use crate::limits::Limits;

/// A congruence of a subalgebra whose generated congruence in the parent
/// restricts to something strictly larger.
#[derive(Clone, Debug, Serialize)]
pub struct CepFailure {
    pub subuniverse: SubUniverse,
    /// Indexed over the subalgebra.
    pub theta: Congruence,
    /// Parent indices of a pair in `Cg_B(theta) ∩ A²` but not in `theta`.
    pub pair: (Elem, Elem),
    /// `Cg_B(theta)` over the parent.
    pub generated: Congruence,
}

#[derive(Clone, Debug)]
pub struct CepCheck {
    pub holds: bool,
    pub failure: Option<CepFailure>,
    pub subuniverses_checked: usize,
    pub congruences_checked: usize,
}

pub fn has_cep(b: &FiniteAlgebra, limits: &Limits) -> Result<CepCheck> {
    has_cep_with(b, limits, false)
}

/// With `only_cmi`, tests only completely meet-irreducible congruences of
/// each subalgebra. The verdict is the same; the witness may differ.
pub fn has_cep_with(b: &FiniteAlgebra, limits: &Limits, only_cmi: bool) -> Result<CepCheck> {
    let subs = b.all_subuniverses(limits.max_subuniverses)?;
    let mut congruences_checked = 0;
    for sub in &subs {
        let a = b.subalgebra(sub)?;
        let con = CongruenceLattice::compute(&a, limits.max_congruences)?;
        for (i, theta) in con.elements().iter().enumerate() {
            if only_cmi && !con.lattice().is_completely_meet_irreducible(i) {
                continue;
            }
            congruences_checked += 1;
            let generated = congruence_generated(b, &theta.lift_pairs(sub));
            let restricted = generated.restrict(sub);
            if restricted != *theta {
                let members = sub.members();
                let pair = first_new_pair(&restricted, theta)
                    .map(|(x, y)| (members[x], members[y]))
                    .ok_or_else(|| Error::InternalContradiction("restriction shrank a congruence".into()))?;
                return Ok(CepCheck {
                    holds: false,
                    failure: Some(CepFailure {
                        subuniverse: sub.clone(),
                        theta: theta.clone(),
                        pair,
                        generated,
                    }),
                    subuniverses_checked: subs.len(),
                    congruences_checked,
                });
            }
        }
    }
    Ok(CepCheck {
        holds: true,
        failure: None,
        subuniverses_checked: subs.len(),
        congruences_checked,
    })
}

fn first_new_pair(larger: &Congruence, smaller: &Congruence) -> Option<(Elem, Elem)> {
    larger.pairs().into_iter().find(|&(x, y)| !smaller.related(x, y))
}

/// A meet-irreducible `Φ ∈ Con(B)` with `Φ ∩ A² = Δ_A`, chosen as the first
/// (in lattice order) congruence maximal among those restricting to `Δ_A`.
pub fn separating_meet_irreducible(b: &FiniteAlgebra, sub: &SubUniverse, limits: &Limits) -> Result<Congruence> {
    let con = CongruenceLattice::compute(b, limits.max_congruences)?;
    let lat = con.lattice();
    let separating: Vec<usize> = (0..con.len())
        .filter(|&i| con.elements()[i].restrict(sub).is_identity())
        .collect();
    let maximal = separating
        .iter()
        .copied()
        .find(|&i| !separating.iter().any(|&j| j != i && lat.leq(i, j)))
        .ok_or_else(|| Error::InternalContradiction("no congruence restricts to the identity".into()))?;
    if !lat.is_meet_irreducible(maximal) {
        return Err(Error::InternalContradiction(format!(
            "maximal separating congruence {} is not meet-irreducible",
            con.elements()[maximal].display(b)
        )));
    }
    Ok(con.elements()[maximal].clone())
}
