//! Fixtures shared by the benchmarks.

use amalgam_core::catalog;
use amalgam_core::{direct_product, FiniteAlgebra, GeneratorSet, Limits};

/// Generating sets used across the benchmarks, by short name.
pub fn generator_sets() -> Vec<(&'static str, GeneratorSet)> {
    let sets = vec![
        ("L2", vec![catalog::chain_lattice(2)]),
        ("C4", vec![catalog::c4()]),
        ("S2", vec![catalog::lukasiewicz_chain(2)]),
        ("G3", vec![catalog::godel_chain(3)]),
        ("S2+G4", vec![catalog::lukasiewicz_chain(2), catalog::godel_chain(4)]),
    ];
    sets.into_iter()
        .map(|(name, gens)| (name, GeneratorSet::new(gens, Limits::default()).expect("catalog generators are valid")))
        .collect()
}

/// Algebras with larger congruence lattices: products of small chains.
pub fn products() -> Vec<(&'static str, FiniteAlgebra)> {
    let l3 = catalog::chain_lattice(3);
    let g3 = catalog::godel_chain(3);
    vec![
        ("L3xL3", direct_product(&[&l3, &l3]).expect("same signature").0),
        ("G3xG3", direct_product(&[&g3, &g3]).expect("same signature").0),
        ("C4", catalog::c4()),
    ]
}
