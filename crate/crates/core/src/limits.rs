use serde::{Deserialize, Serialize};

/// Budgets guarding the exhaustive searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest algebra (input, quotient, or constructed product) the engine accepts.
    pub max_algebra_size: usize,
    /// Largest number of isomorphism types in a computed class.
    pub max_class: usize,
    /// Largest number of elements computed in a free algebra.
    pub max_free: usize,
    /// Largest congruence lattice enumerated.
    pub max_congruences: usize,
    /// Largest number of subuniverses enumerated for one algebra.
    pub max_subuniverses: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_algebra_size: 64,
            max_class: 256,
            max_free: 20_000,
            max_congruences: 4096,
            max_subuniverses: 4096,
        }
    }
}
