use qarith::adders::{build_adder, AdderKind};
use qarith::report::{mutate, verify_suite};
use qarith::sim::{self, Domain, IoSpec};

fn io(blk: &qarith::adders::AdderBlock) -> IoSpec {
    IoSpec { inputs: vec![("a".into(), blk.a.clone()), ("b".into(), blk.b.clone())], outputs: vec![("sum".into(), blk.sum.clone())] }
}

#[test]
fn sampled_runs_repeat_under_a_seed() {
    let blk = build_adder(AdderKind::Cuccaro, 24, None).unwrap();
    let d = Domain::Sampled { cases: 2000, seed: 42 };
    let a = blk.verify(&d).unwrap();
    let b = blk.verify(&d).unwrap();
    assert!(a.pass && b.pass);
    assert_eq!((a.seed, a.cases), (Some(42), 2000));
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn empty_domain_is_an_error() {
    let blk = build_adder(AdderKind::Vbe, 3, None).unwrap();
    let r = sim::verify("vbe", &blk.circuit, &io(&blk), "never", &|_| None, &Domain::Exhaustive);
    assert!(matches!(r, Err(qarith::Error::EmptyDomain)));
}

#[test]
fn a_missing_gate_is_caught_with_a_trace() {
    let blk = build_adder(AdderKind::Vbe, 4, None).unwrap();
    let broken = mutate(&blk.circuit);
    assert_eq!(broken.gates.len() + 1, blk.circuit.gates.len());
    // the middle gate touches the carry chain, not the low sum bits, so the
    // check must cover the carry out and the ancillae as well
    let mut spec = io(&blk);
    spec.outputs.push(("cout".into(), vec![blk.cout.unwrap()]));
    spec.outputs.push(("ancillae".into(), blk.ancillae.clone()));
    let oracle = |v: &[u64]| Some(vec![(v[0] + v[1]) % 16, (v[0] + v[1]) / 16, 0]);
    let r = sim::verify("vbe-4-mutated", &broken, &spec, "add", &oracle, &Domain::Exhaustive).unwrap();
    assert!(!r.pass);
    let ce = r.counterexample.unwrap();
    assert_ne!(ce.expected, ce.got);
    assert_eq!(ce.trace.len(), broken.gates.len());
    let a = ce.inputs[0].1;
    let b = ce.inputs[1].1;
    assert_eq!(ce.expected[0].1, (a + b) % 16);
}

#[test]
fn battery_passes_and_mutation_fails() {
    let ok = verify_suite(4, false, 3).unwrap();
    assert!(ok.pass && ok.failed == 0, "{:?}", ok.reports.iter().filter(|r| !r.pass).map(|r| &r.circuit).collect::<Vec<_>>());
    let bad = verify_suite(4, true, 3).unwrap();
    assert!(!bad.pass && bad.failed > 0);
    eprintln!("mutated battery: {} of {} circuits caught", bad.failed, bad.circuits);
    assert!(verify_suite(7, false, 3).is_err());
}
