use proptest::prelude::*;
use qarith::cost::{self, Algo, ArchKind, ModelParams};
use qarith::pipeline::{build_modexp, build_qq_multiply, plan_parallel, simulate, AlgoParams, ModuloChoice};
use qarith::sim::{oracle, run_permutation, BasisState};
use qarith::adders::AdderKind;

fn check_all_exponents(algo: Algo, n: usize, modulus: u64, x: u64) {
    let b = build_modexp(&AlgoParams::preset(algo, n, modulus, x).unwrap()).unwrap();
    assert_eq!(b.exponent.len(), 2 * n + 1);
    let exps: Vec<u64> = (0..1u64 << (2 * n + 1)).collect();
    let out = simulate(&b, &exps).unwrap().unwrap_or_else(|a| panic!("{algo} N={modulus} x={x}: dirty ancillae at a={a}"));
    for (&a, &y) in exps.iter().zip(&out) {
        assert_eq!(y, oracle::modexp(x, a, modulus), "{algo} N={modulus} x={x} a={a}");
    }
    assert_eq!(b.adder_calls, b.predicted_adder_calls, "{algo} N={modulus}");
}

#[test]
fn every_preset_fifteen() {
    for algo in Algo::ALL {
        for x in [2, 4, 7, 8, 11, 13] {
            check_all_exponents(algo, 4, 15, x);
        }
    }
}

#[test]
fn every_preset_twenty_one() {
    for algo in Algo::ALL {
        for x in [2, 5, 11] {
            check_all_exponents(algo, 5, 21, x);
        }
    }
}

#[test]
fn other_moduli_and_overrides() {
    check_all_exponents(Algo::F, 5, 29, 3);
    check_all_exponents(Algo::G, 3, 5, 2);
    let mut p = AlgoParams::preset(Algo::F, 4, 13, 6).unwrap();
    p.s = 3;
    p.w = 3;
    p.modulo = ModuloChoice::Deferred { p: 3 };
    p.adder = AdderKind::Vbe;
    let b = build_modexp(&p).unwrap();
    let exps: Vec<u64> = (0..512).collect();
    let out = simulate(&b, &exps).unwrap().unwrap();
    assert!(exps.iter().zip(&out).all(|(&a, &y)| y == oracle::modexp(6, a, 13)));
}

#[test]
fn adder_calls_match_plan_wider() {
    for (n, modulus, x) in [(8usize, 253u64, 2u64), (16, 65521, 3)] {
        for algo in [Algo::Cvbe, Algo::F, Algo::G, Algo::E] {
            let b = build_modexp(&AlgoParams::preset(algo, n, modulus, x).unwrap()).unwrap();
            assert_eq!(b.adder_calls, b.predicted_adder_calls, "{algo} n={n}");
        }
    }
    let b = build_modexp(&AlgoParams::preset(Algo::D, 8, 253, 2).unwrap()).unwrap();
    assert_eq!(b.adder_calls, b.predicted_adder_calls);
}

#[test]
fn sampled_wider_run() {
    let b = build_modexp(&AlgoParams::preset(Algo::G, 8, 253, 2).unwrap()).unwrap();
    let r = qarith::report::verify_modexp_build(&b, 11).unwrap();
    assert!(r.pass);
    assert_eq!(r.seed, None, "17 exponent bits is still exhaustive");
}

#[test]
fn qq_multiply_exhaustive() {
    let blk = build_qq_multiply(4, 13, AdderKind::Cuccaro).unwrap();
    for a in 0..13 {
        for b in 0..13 {
            let mut st = BasisState::zeros(blk.circuit.num_qubits());
            st.set(&blk.a, a);
            st.set(&blk.b, b);
            let out = run_permutation(&blk.circuit, &st).unwrap();
            assert_eq!(out.get(&blk.out), a * b % 13);
            assert_eq!((out.get(&blk.a), out.get(&blk.b)), (a, b));
        }
    }
}

#[test]
fn sixteen_chains_charge_four_qq_steps() {
    let p = plan_parallel(128, 16, 2).unwrap();
    assert_eq!(p.qq_steps, 4);
    assert_eq!(p.bits_covered(), 257);
}

#[test]
fn over_budget_is_infeasible() {
    let mut p = AlgoParams::preset(Algo::D, 8, 253, 2).unwrap();
    p.space_multiple = Some(10);
    assert!(matches!(build_modexp(&p), Err(qarith::Error::Infeasible(_))));
}

proptest! {
    #[test]
    fn space_grows_and_latency_shrinks_with_s(n in 8usize..200, s in 1usize..40, w in 1usize..=4) {
        prop_assume!(s < n);
        for algo in [Algo::F, Algo::G] {
            let a = ModelParams { n, s, w, p: if algo == Algo::F { 4 } else { 0 }, m: 0 };
            let b = ModelParams { s: s + 1, ..a };
            prop_assert!(cost::algo_space(algo, &b) >= cost::algo_space(algo, &a));
            prop_assert!(cost::r_i(n, s + 1, w) <= cost::r_i(n, s, w));
            let (la, lb) = (cost::algo_eval(algo, ArchKind::Ac, &a).unwrap(), cost::algo_eval(algo, ArchKind::Ac, &b).unwrap());
            prop_assert!(lb.latency.lead(ArchKind::Ac) <= la.latency.lead(ArchKind::Ac));
        }
        let plan = plan_parallel(n, s, w).unwrap();
        prop_assert_eq!(plan.bits_covered(), 2 * n + 1);
        prop_assert_eq!(plan.cc_multiplies + plan.chain_windows.len(), plan.windows);
    }
}
