mod common;

use std::collections::HashMap;

use amalgam_core::homsearch::{
    class_check, condition4_probe, enumerate_spans, find_homomorphisms, product_amalgam, search_amalgam,
    separating_witnesses, verify_amalgam, AmalgamMode, ClassProperty, Counterexample, Require, SpanKind,
};
use amalgam_core::{catalog, fsi_star, AlgebraSet, FiniteAlgebra, GeneratorSet, Limits};

fn class_of(a: FiniteAlgebra) -> AlgebraSet {
    fsi_star(&GeneratorSet::new(vec![a], Limits::default()).unwrap()).unwrap()
}

fn small_classes() -> Vec<AlgebraSet> {
    common::small_catalog().into_iter().map(class_of).collect()
}

#[test]
fn homomorphisms_match_brute_force() {
    let algs = common::small_catalog();
    for a in &algs {
        for b in &algs {
            if a.signature() != b.signature() {
                continue;
            }
            for (require, inj) in [(Require::None, false), (Require::Injective, true)] {
                let engine: Vec<Vec<usize>> = find_homomorphisms(a, b, &[], require, None)
                    .unwrap()
                    .iter()
                    .map(|h| h.image().to_vec())
                    .collect();
                let mut sorted = engine.clone();
                sorted.sort();
                assert_eq!(sorted, common::brute_homs(a, b, inj), "{} -> {}", a.name(), b.name());
                assert_eq!(sorted, engine, "search order is lexicographic");
            }
            let onto: Vec<Vec<usize>> = find_homomorphisms(a, b, &[], Require::Surjective, None)
                .unwrap()
                .iter()
                .map(|h| h.image().to_vec())
                .collect();
            let brute_onto: Vec<Vec<usize>> = common::brute_homs(a, b, false)
                .into_iter()
                .filter(|f| (0..b.size()).all(|y| f.contains(&y)))
                .collect();
            assert_eq!(onto, brute_onto);
        }
    }
}

#[test]
fn amalgams_verify_and_strong_implies_plain() {
    for k in small_classes() {
        for span in enumerate_spans(&k, SpanKind::DoublyInjective, &Limits::default()).unwrap() {
            let strong = search_amalgam(&span, &k, AmalgamMode::Strong).unwrap();
            let plain = search_amalgam(&span, &k, AmalgamMode::Plain).unwrap();
            let one = search_amalgam(&span, &k, AmalgamMode::OneSided).unwrap();
            if strong.is_some() {
                assert!(plain.is_some());
            }
            if plain.is_some() {
                assert!(one.is_some());
            }
            for (am, mode) in [(strong, AmalgamMode::Strong), (plain, AmalgamMode::Plain), (one, AmalgamMode::OneSided)] {
                if let Some(am) = am {
                    assert_eq!(verify_amalgam(&span, &am, mode), Ok(()));
                    assert!(common::is_hom(&span.b, &am.target, am.psi_b.image()));
                    assert!(common::is_hom(&span.c, &am.target, am.psi_c.image()));
                }
            }
        }
    }
}

#[test]
fn one_sided_ap_matches_naive_enumerator() {
    for k in small_classes() {
        if k.len() > 3 {
            continue;
        }
        let engine = class_check(&k, ClassProperty::OneAp, &Limits::default()).unwrap().holds;
        let members: Vec<FiniteAlgebra> = k.iter().cloned().collect();
        assert_eq!(engine, common::naive_one_sided_ap(&members));
    }
}

/// Whether some proper subalgebra of a member is epic, by brute force.
fn brute_has_epic_subalgebra(k: &AlgebraSet) -> bool {
    k.iter().any(|b| {
        common::brute_subuniverses(b)
            .into_iter()
            .filter(|s| s.len() < b.size())
            .any(|sub| {
                k.iter().all(|c| {
                    let mut seen: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
                    common::brute_homs(b, c, false).into_iter().all(|h| {
                        let key: Vec<usize> = sub.iter().map(|&x| h[x]).collect();
                        seen.entry(key).or_insert_with(|| h.clone()) == &h
                    })
                })
            })
    })
}

#[test]
fn surjective_epimorphisms_match_brute_force() {
    let mut classes = small_classes();
    classes.push(class_of(catalog::godel_chain(5)));
    for k in classes {
        let check = class_check(&k, ClassProperty::Se, &Limits::default()).unwrap();
        assert_eq!(check.holds, !brute_has_epic_subalgebra(&k));
        if let Some(Counterexample::EpicSubalgebra { algebra, subuniverse }) = &check.counterexample {
            assert!(subuniverse.len() < algebra.size());
        }
    }
}

#[test]
fn product_probe_matches_one_sided_ap() {
    for k in small_classes() {
        let one = class_check(&k, ClassProperty::OneAp, &Limits::default()).unwrap();
        let probe = condition4_probe(&k, &Limits::default()).unwrap();
        assert_eq!(one.holds, probe.holds);
    }
}

#[test]
fn separating_witnesses_give_verified_product_amalgams() {
    for k in small_classes() {
        for span in enumerate_spans(&k, SpanKind::DoublyInjective, &Limits::default()).unwrap() {
            if let Some(ws) = separating_witnesses(&span, &k).unwrap() {
                match product_amalgam(&span, &ws, &Limits::default()) {
                    Ok(am) => {
                        assert_eq!(verify_amalgam(&span, &am, AmalgamMode::Plain), Ok(()));
                        assert!(common::is_hom(&span.b, &am.target, am.psi_b.image()));
                    }
                    Err(e) => assert!(e.is_resource_limit(), "{e}"),
                }
            }
        }
    }
}

#[test]
fn witnesses_are_deterministic_across_thread_counts() {
    let k = fsi_star(
        &GeneratorSet::new(
            vec![catalog::lukasiewicz_chain(2), catalog::godel_chain(4)],
            Limits::default(),
        )
        .unwrap(),
    )
    .unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let c = class_check(&k, ClassProperty::OneAp, &Limits::default()).unwrap();
            c.counterexample.map(|c| c.to_json())
        })
    };
    let one = run(1);
    assert!(one.is_some());
    for t in [2, 4, 8] {
        assert_eq!(run(t), one);
    }
}
