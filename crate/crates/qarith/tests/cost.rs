use num_rational::Ratio;
use proptest::prelude::*;
use qarith::cost::{self, Algo, ArchKind, ModelParams, Params, SweepSpec, SweepVar, Tuple};
use qarith::report;

fn params(kv: &[(&str, i64)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

proptest! {
    /// Expanded polynomials, independent of the factored code path.
    #[test]
    fn baseline_totals_expand(n in 2usize..5000) {
        let ni = n as i128;
        prop_assert_eq!(cost::t_v(n), Tuple::new(80 * ni.pow(3) - 100 * ni * ni + 20 * ni, 80 * ni.pow(3) - 80 * ni * ni + 15 * ni, 0));
        prop_assert_eq!(cost::t_v_ac(n).ccnot, Ratio::from_integer(60 * ni.pow(3) - 75 * ni * ni + 15 * ni));
        prop_assert_eq!(cost::t_v_ac(n).cnot, Ratio::from_integer(40 * ni.pow(3) - 70 * ni * ni + 15 * ni));
        prop_assert_eq!(cost::t_v_ntc(n).cnot, Ratio::from_integer(400 * ni.pow(3) - 400 * ni * ni + 75 * ni));
    }
}

#[test]
fn adder_and_baseline_cells() {
    assert_eq!(cost::t_add(3), Tuple::new(8, 9, 0));
    assert_eq!(cost::vbe_adder_calls(128), 327_040);
    assert_eq!(cost::t_add_ac(128), Tuple::new(381, 253, 0));
    let v = cost::t_v_ac(128);
    assert_eq!(v, Tuple::new(124_602_240, 82_741_120, 0));
    assert!(cost::same_3sf(v.to_f64()[0], 1.25e8));
    assert!(cost::same_3sf(v.to_f64()[1], 8.27e7));
    assert_eq!(cost::t_v_ntc(128).cnot, Ratio::from_integer(832_316_800));
}

#[test]
fn space_cells() {
    assert_eq!(cost::s_vbe(128), 897);
    assert_eq!(cost::algo_space(Algo::G, &ModelParams::preset(Algo::G)), 660);
    let d = cost::algo_space(Algo::D, &ModelParams::preset(Algo::D));
    assert!((d as f64 - 11969.0).abs() / 11969.0 <= 0.005, "{d}");
}

#[test]
fn latency_table_band_and_order() {
    let rows = report::latency_table(100).unwrap();
    for r in &rows {
        if let Some(d) = r.delta_pct {
            eprintln!("{} {}: {:+.2}%", r.algo, r.arch.name(), d);
            assert!(d.abs() <= 30.0);
        }
        if let (Some(p), Some(rp)) = (r.perf, r.reference_perf) {
            assert!((p - rp).abs() / rp <= 0.30, "{} {} perf {p} vs {rp}", r.algo, r.arch.name());
        }
    }
    let lead = |a: Algo| rows.iter().find(|r| r.algo == a && r.arch == ArchKind::Ac).unwrap().latency.unwrap().ccnot;
    assert!(lead(Algo::E) < lead(Algo::D) && lead(Algo::D) < lead(Algo::F) && lead(Algo::F) < lead(Algo::G));
}

#[test]
fn e_is_not_offered_on_the_line() {
    let e = cost::algo_eval(Algo::E, ArchKind::Ntc, &ModelParams::preset(Algo::E));
    assert!(matches!(e, Err(qarith::Error::Unsupported(_))));
}

#[test]
fn growth_laws_fit() {
    let ns = [16, 32, 64, 128, 256, 512, 1024];
    for algo in [Algo::E, Algo::F] {
        let f = report::growth_fit(algo, &ns, 100).unwrap();
        eprintln!("{algo}: c = {:.3}, R^2 = {:.6}", f.c, f.r2);
        assert!(f.r2 >= 0.99);
    }
}

#[test]
fn optimizer_is_deterministic_and_in_budget() {
    for algo in [Algo::D, Algo::E, Algo::F, Algo::G] {
        let a = cost::optimize(algo, ArchKind::Ac, 64, 100 * 64).unwrap();
        let b = cost::optimize(algo, ArchKind::Ac, 64, 100 * 64).unwrap();
        assert_eq!(a.params, b.params);
        assert!(a.space <= 6400);
    }
    assert!(matches!(cost::optimize(Algo::D, ArchKind::Ac, 64, 100), Err(qarith::Error::Infeasible(_))));
}

#[test]
fn single_point_sweep_matches_optimize() {
    let spec = SweepSpec { algo: Algo::F, arch: ArchKind::Ac, var: SweepVar::N, range: vec![32], fixed: 100 };
    let rows = cost::sweep(&spec).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].eval.params, cost::optimize(Algo::F, ArchKind::Ac, 32, 3200).unwrap().params);
    let empty = SweepSpec { range: vec![], ..spec };
    assert!(cost::sweep(&empty).is_err());
}

#[test]
fn named_formulas() {
    assert_eq!(cost::eval("t_ADD", &params(&[("n", 3)])).unwrap().tuple(), Some(Tuple::new(8, 9, 0)));
    assert_eq!(cost::eval("S_VBE", &params(&[("n", 128)])).unwrap().scalar(), Some(Ratio::from_integer(897)));
    match cost::eval("t_CSUM_AC", &params(&[("n", 64)])) {
        Err(qarith::Error::MissingParam(k)) => assert_eq!(k, "m"),
        other => panic!("{other:?}"),
    }
    assert!(cost::eval("t_nope", &params(&[])).is_err());
    for name in cost::FORMULAS {
        let p = params(&[("n", 128), ("m", 4), ("s", 12), ("w", 2), ("p", 10), ("b", 512)]);
        assert!(cost::eval(name, &p).is_ok(), "{name}");
    }
}
