//! Decision procedures for varieties generated by finite algebras.
//!
//! Algebras are finite operation tables over `0..n`. The engine computes
//! congruence lattices, homomorphisms, the finitely subdirectly irreducible
//! members of a finitely generated variety, and decides the congruence
//! extension property and the amalgamation family of properties by
//! reducing them to finite searches over those members.

pub mod algebra;
pub mod algebra_set;
pub mod catalog;
pub mod congruence;
pub mod decide;
pub mod error;
pub mod format;
pub mod hom;
pub mod homsearch;
pub mod iso;
pub mod limits;
pub mod variety;

pub use algebra::{direct_product, Elem, FiniteAlgebra, Operation, OpSymbol, Signature, SubUniverse};
pub use algebra_set::AlgebraSet;
pub use congruence::{congruence_generated, principal_congruence, Congruence, CongruenceLattice, FiniteLattice};
pub use decide::{check_join_ap, decide, DecideOptions, DecisionReport, Property, Session, Status, Verdict};
pub use error::{Error, Result};
pub use hom::Homomorphism;
pub use homsearch::{Amalgam, AmalgamMode, ClassCheck, ClassProperty, Span, SpanKind};
pub use iso::{canonical_form, is_isomorphic, CanonicalForm};
pub use limits::Limits;
pub use variety::{fsi_star, hs_closure, GeneratorSet};
