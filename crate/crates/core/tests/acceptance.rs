//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails or runs over its time limit.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use amalgam_core::congruence::{join_generated, CongruenceLattice};
use amalgam_core::decide::{Session, Status, Verdict};
use amalgam_core::homsearch::{class_check, condition4_probe, ClassProperty, Counterexample};
use amalgam_core::variety::{free_algebra, has_jonsson_terms, has_malcev_term, Detection};
use amalgam_core::{
    catalog, congruence_generated, fsi_star, is_isomorphic, Congruence, DecideOptions, FiniteAlgebra, GeneratorSet,
    Limits, Property, SubUniverse,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn gens(algs: Vec<FiniteAlgebra>) -> GeneratorSet {
    GeneratorSet::new(algs, Limits::default()).expect("valid generators")
}

fn assume_cd() -> DecideOptions {
    DecideOptions {
        assume_cd: true,
        ..DecideOptions::default()
    }
}

fn verdict(s: &mut Session, p: Property) -> Result<Verdict, String> {
    s.decide(p).map(|r| r.verdict).map_err(|e| e.to_string())
}

fn c3_star() -> FiniteAlgebra {
    let c4 = catalog::c4();
    c4.subalgebra(&SubUniverse::new(&c4, vec![0, 1, 2]).unwrap()).unwrap()
}

fn c4_cep_failure() -> Outcome {
    let c4 = catalog::c4();
    let mut s = Session::new(gens(vec![c4.clone()]), DecideOptions::default());
    let r = s.decide(Property::Cep).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::False, format!("verdict {:?}", r.verdict))?;
    let w = &r.witness.ok_or("no witness")?["cep_failure"];
    ensure(w["B"] == "C4", format!("witness algebra {}", w["B"]))?;
    ensure(w["A_labels"] == serde_json::json!(["-2", "-1", "1"]), format!("subalgebra {}", w["A_labels"]))?;
    ensure(
        w["theta"] == serde_json::json!([["-2", "-1"], ["1"]]),
        format!("theta {}", w["theta"]),
    )?;
    let theta = [(0, 1), (1, 0)];
    let cg = congruence_generated(&c4, &theta);
    ensure(cg.is_total(), format!("Cg(theta) = {}", cg.display(&c4)))?;
    Ok("A = {-2,-1,1}, theta = {-2,-1}{1}, Cg_C4(theta) total".into())
}

fn c4_ep() -> Outcome {
    let g = gens(vec![catalog::c4()]);
    let k = fsi_star(&g).map_err(|e| e.to_string())?;
    ensure(!k.contains(&c3_star()), "C3* is in the FSI class")?;
    let check = class_check(&k, ClassProperty::Ep, g.limits()).map_err(|e| e.to_string())?;
    ensure(check.holds, "class check for EP failed")?;
    Ok(format!("|K| = {}, C3* excluded, EP holds over {} spans", k.len(), check.checked))
}

fn distributive_lattices() -> Outcome {
    let g = gens(vec![catalog::chain_lattice(2)]);
    let mut s = Session::new(g.clone(), DecideOptions::default());
    let cep = s.decide(Property::Cep).map_err(|e| e.to_string())?;
    ensure(cep.verdict == Verdict::True, "CEP not TRUE")?;
    let ap = s.decide(Property::Ap).map_err(|e| e.to_string())?;
    ensure(ap.verdict == Verdict::True, "AP not TRUE")?;
    ensure(ap.audit.cd.status == Status::Yes, "Jonsson terms not found")?;
    let k = fsi_star(&g).map_err(|e| e.to_string())?;
    let check = class_check(&k, ClassProperty::Ap, g.limits()).map_err(|e| e.to_string())?;
    ensure(!check.holds, "K has the AP")?;
    let span = check.counterexample.as_ref().and_then(Counterexample::span).ok_or("no span witness")?;
    let l2 = catalog::chain_lattice(2);
    ensure(span.a.size() == 1, "A is not trivial")?;
    ensure(
        is_isomorphic(&span.b, &l2).unwrap().is_some() && is_isomorphic(&span.c, &l2).unwrap().is_some(),
        "B, C not the 2-element lattice",
    )?;
    ensure(span.phi_b != span.phi_c, "the two embeddings coincide")?;
    Ok(format!(
        "CEP, AP TRUE; K fails AP at T -> L2 via {:?} and {:?}",
        span.phi_b.image(),
        span.phi_c.image()
    ))
}

fn bl_ap_failure() -> Outcome {
    let g = gens(vec![catalog::lukasiewicz_chain(2), catalog::godel_chain(4)]);
    let mut s = Session::new(g.clone(), assume_cd());
    let r = s.decide(Property::Ap).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::False, format!("verdict {:?}", r.verdict))?;
    ensure(r.audit.cd.status == Status::Assumed, "cd not assumed")?;
    let k = s.fsi_class().map_err(|e| e.to_string())?.clone();
    let check = class_check(&k, ClassProperty::OneAp, g.limits()).map_err(|e| e.to_string())?;
    let span = check.counterexample.as_ref().and_then(Counterexample::span).ok_or("no span witness")?;
    ensure(
        is_isomorphic(&span.a, &catalog::lukasiewicz_chain(1)).unwrap().is_some(),
        format!("A = {} is not B2", span.a.name()),
    )?;
    ensure(
        is_isomorphic(&span.b, &catalog::lukasiewicz_chain(2)).unwrap().is_some(),
        format!("B = {} is not S2", span.b.name()),
    )?;
    ensure(
        r.witness.as_ref() == check.counterexample.as_ref().map(|c| c.to_json()).as_ref(),
        "report witness differs",
    )?;
    Ok(format!("AP FALSE; span A = {}, B = {}, C = {}", span.a.name(), span.b.name(), span.c.name()))
}

fn mv_chain_ap() -> Outcome {
    let mut s = Session::new(gens(vec![catalog::lukasiewicz_chain(2)]), assume_cd());
    let r = s.decide(Property::Ap).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::True, format!("verdict {:?}: {}", r.verdict, r.reason))?;
    Ok(format!("AP TRUE; {}", r.reason))
}

fn boolean_algebras() -> Outcome {
    let g = gens(vec![catalog::lukasiewicz_chain(1)]);
    let m = has_malcev_term(&g);
    ensure(m.verdict == Detection::Yes, format!("Mal'cev: {}", m.evidence))?;
    let j = has_jonsson_terms(&g);
    ensure(j.verdict == Detection::Yes, format!("Jonsson: {}", j.evidence))?;
    let f3 = free_algebra(&g, 3).map_err(|e| e.to_string())?.len();
    ensure(f3 == 256, format!("|F(3)| = {f3}"))?;
    let mut s = Session::new(g, DecideOptions::default());
    for p in [Property::Se, Property::Sap, Property::Tip] {
        let v = verdict(&mut s, p)?;
        ensure(v == Verdict::True, format!("{p} is {v:?}"))?;
    }
    Ok("Mal'cev and Jonsson terms found, |F(3)| = 256, SE, SAP, TIP TRUE".into())
}

fn oracle_suite() -> Outcome {
    let algebras = common::small_catalog();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // (a) generated congruences
    for _ in 0..200 {
        let a = &algebras[rng.gen_range(0..algebras.len())];
        let n = a.size();
        let pairs: Vec<(usize, usize)> = (0..rng.gen_range(0..=3))
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect();
        let engine = congruence_generated(a, &pairs);
        let oracle = Congruence::from_block_ids(common::brute_cg(a, &pairs));
        ensure(engine == oracle, format!("Cg mismatch on {} for {pairs:?}", a.name()))?;
    }
    // (b) one-sided amalgamation against the naive enumerator
    let mut classes = 0;
    for a in &algebras {
        let g = gens(vec![a.clone()]);
        let k = fsi_star(&g).map_err(|e| e.to_string())?;
        let engine = class_check(&k, ClassProperty::OneAp, g.limits()).map_err(|e| e.to_string())?.holds;
        let members: Vec<FiniteAlgebra> = k.iter().cloned().collect();
        let naive = common::naive_one_sided_ap(&members);
        ensure(engine == naive, format!("1AP mismatch on V({}): engine {engine}, naive {naive}", a.name()))?;
        classes += 1;
    }
    // (c) preimage of a generated congruence in a quotient
    for _ in 0..200 {
        let a = &algebras[rng.gen_range(0..algebras.len())];
        let n = a.size();
        let con = CongruenceLattice::compute(a, 4096).map_err(|e| e.to_string())?;
        let theta = &con.elements()[rng.gen_range(0..con.len())];
        let (q, phi) = a.quotient(theta).map_err(|e| e.to_string())?;
        let r: Vec<(usize, usize)> = (0..rng.gen_range(0..=3))
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect();
        let image: Vec<(usize, usize)> = r.iter().map(|&(x, y)| (phi.apply(x), phi.apply(y))).collect();
        let down = congruence_generated(&q, &image);
        let preimage = Congruence::from_block_ids((0..n).map(|x| down.block_of(phi.apply(x))));
        let joined = join_generated(a, theta, &r);
        ensure(preimage == joined, format!("preimage identity fails on {} for {r:?}", a.name()))?;
    }
    Ok(format!("200 Cg draws, {classes} classes for 1AP, 200 preimage draws: no discrepancies"))
}

fn consistency_battery() -> Outcome {
    let corpus = vec![
        vec![catalog::chain_lattice(2)],
        vec![catalog::chain_lattice(3)],
        vec![catalog::lukasiewicz_chain(2)],
        vec![catalog::godel_chain(3)],
        vec![catalog::c4()],
    ];
    let mut lines = Vec::new();
    for algs in corpus {
        let name = algs[0].name().to_string();
        let g = gens(algs);
        let mut s = Session::new(g.clone(), DecideOptions::default());
        let mut v = std::collections::HashMap::new();
        for p in Property::ALL {
            v.insert(p, verdict(&mut s, p)?);
        }
        ensure(v[&Property::Cep] == v[&Property::Ep], format!("{name}: CEP != EP"))?;
        ensure(
            v[&Property::Tip] == v[&Property::Cep].and(v[&Property::Ap]),
            format!("{name}: TIP != CEP and AP"),
        )?;
        ensure(
            v[&Property::Sap] == v[&Property::Ap].and(v[&Property::Se]),
            format!("{name}: SAP != AP and SE"),
        )?;
        let report = s.decide(Property::Ap).map_err(|e| e.to_string())?;
        let verified = report.audit.cd.status.verified() && report.audit.fsi_sub_closed.holds;
        if verified {
            let k = s.fsi_class().map_err(|e| e.to_string())?.clone();
            let one = class_check(&k, ClassProperty::OneAp, g.limits()).map_err(|e| e.to_string())?;
            let probe = condition4_probe(&k, g.limits()).map_err(|e| e.to_string())?;
            ensure(one.holds == probe.holds, format!("{name}: 1AP and product-amalgam probe disagree"))?;
            if v[&Property::Tip].is_decided() {
                let tip = class_check(&k, ClassProperty::Tip, g.limits()).map_err(|e| e.to_string())?;
                ensure(
                    Verdict::from_bool(tip.holds) == v[&Property::Tip],
                    format!("{name}: TIP of K disagrees with the variety verdict"),
                )?;
            }
        }
        lines.push(format!(
            "{name}: {}",
            Property::ALL
                .iter()
                .map(|p| format!("{p}={}", v[p].as_str()))
                .collect::<Vec<_>>()
                .join(" ")
        ));
    }
    Ok(lines.join("; "))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("C4 CEP failure witness", 5, c4_cep_failure),
        ("V(C4) FSI class has EP", 30, c4_ep),
        ("distributive lattices: CEP, AP; K lacks AP", 30, distributive_lattices),
        ("S2 with G4: AP fails with a B2 <= S2 span", 120, bl_ap_failure),
        ("S2: AP holds", 120, mv_chain_ap),
        ("Boolean algebras: terms, F(3), SE, SAP, TIP", 120, boolean_algebras),
        ("oracle equivalence suite", 300, oracle_suite),
        ("transfer consistency battery", 600, consistency_battery),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > Duration::from_secs(*limit) => {
                Err(format!("over the {limit} s limit ({detail})"))
            }
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS {} {name} [{:.2}s] {detail}", i + 1, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} [{:.2}s] {why}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
