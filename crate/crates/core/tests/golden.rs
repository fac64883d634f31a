//! Golden files: catalog algebras in the file format and a few decision
//! reports. Set `UPDATE_GOLDEN=1` to rewrite them.

use std::fs;
use std::path::PathBuf;

use amalgam_core::format::{algebra_to_string, parse_algebra};
use amalgam_core::{canonical_form, catalog, decide, DecideOptions, FiniteAlgebra, GeneratorSet, Limits, Property};

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn check(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{name} differs from its golden file");
}

fn catalog_files() -> Vec<(&'static str, FiniteAlgebra)> {
    vec![
        ("c4.json", catalog::c4()),
        ("chain_lattice_2.json", catalog::chain_lattice(2)),
        ("chain_lattice_3.json", catalog::chain_lattice(3)),
        ("diamond_m3.json", catalog::diamond_m3()),
        ("godel_chain_3.json", catalog::godel_chain(3)),
        ("godel_chain_4.json", catalog::godel_chain(4)),
        ("lukasiewicz_chain_1.json", catalog::lukasiewicz_chain(1)),
        ("lukasiewicz_chain_2.json", catalog::lukasiewicz_chain(2)),
        ("boolean_algebra.json", catalog::boolean_algebra()),
        ("bare_set_2.json", catalog::bare_set(2)),
    ]
}

#[test]
fn catalog_algebras() {
    for (file, alg) in catalog_files() {
        let text = algebra_to_string(&alg);
        assert!(!text.contains('\r'));
        check(file, &text);
        let back = parse_algebra(&fs::read_to_string(golden_path(file)).unwrap()).unwrap();
        assert_eq!(canonical_form(&back), canonical_form(&alg));
        assert_eq!(back, alg);
    }
}

fn report(property: Property, algs: Vec<FiniteAlgebra>, assume_cd: bool) -> String {
    let g = GeneratorSet::new(algs, Limits::default()).unwrap();
    let options = DecideOptions {
        assume_cd,
        ..DecideOptions::default()
    };
    decide(property, &g, options).unwrap().to_json_string()
}

#[test]
fn decision_reports() {
    check("report_cep_c4.json", &report(Property::Cep, vec![catalog::c4()], false));
    check("report_ap_l2.json", &report(Property::Ap, vec![catalog::chain_lattice(2)], false));
    check(
        "report_ap_s2_g4.json",
        &report(
            Property::Ap,
            vec![catalog::lukasiewicz_chain(2), catalog::godel_chain(4)],
            true,
        ),
    );
}
