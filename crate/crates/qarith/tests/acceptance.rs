//! Acceptance run: one PASS/FAIL line per criterion, with the measured
//! figures under it. Criteria listed in `KNOWN_RED` are expected to fail for
//! reasons given in the README; the process fails if any other criterion
//! fails, or if a known-red one starts passing.

use std::process::ExitCode;
use std::time::Instant;

use qarith::adders::{build_adder, build_cuccaro_adder, build_vbe_adder, AdderKind};
use qarith::arch::{decompose_ccnot_ntc, Arch};
use qarith::cost::{self, Algo, ArchKind, ModelParams, Tuple};
use qarith::modarith::{build_deferred_accumulator, build_modadd_3adder, deferred_modulo_plan};
use qarith::pipeline::{build_modexp, simulate, AlgoParams};
use qarith::report;
use qarith::sched::schedule_asap;
use qarith::sim::{oracle, run_unitary, Domain, Lanes};
use qarith::Gate;

const KNOWN_RED: &[u32] = &[1, 2, 7];

const UNITARY_TOL: f64 = 1e-12;
const LATENCY_BAND: f64 = 0.30;
const D8_BAND: f64 = 0.10;
const D8_TARGET: f64 = 1072.0;
const D8_MIN_SPEEDUP: f64 = 25.0;
const FLAT_TOL: f64 = 0.01;
const FLAT_FROM: usize = 240;
const FIT_MIN_R2: f64 = 0.99;
const SD_TARGET: f64 = 11969.0;
const SD_BAND: f64 = 0.005;
const LINE_SLOTS_AT_3: usize = 45;

struct Check {
    ok: bool,
    lines: Vec<String>,
}

impl Check {
    fn new() -> Check {
        Check { ok: true, lines: Vec::new() }
    }

    fn expect(&mut self, ok: bool, what: String) {
        self.lines.push(format!("{} {what}", if ok { "ok  " } else { "MISS" }));
        self.ok &= ok;
    }

    fn note(&mut self, what: String) {
        self.lines.push(format!("     {what}"));
    }
}

fn formulas() -> Check {
    let mut c = Check::new();
    let ac = cost::t_v_ac(128);
    let [cc, cn, _] = ac.to_f64();
    c.expect(ac == Tuple::new(125_829_120, 82_741_120, 0), format!("t_V_AC(128) = {} against (125829120; 82741120; 0)", fmt(ac)));
    c.note(format!("= t_ADD_AC(128) x {} calls = 381 x 327040", cost::vbe_adder_calls(128)));
    c.expect(cost::same_3sf(cc, 1.25e8) && cost::same_3sf(cn, 8.27e7), format!("3 s.f.: {} / {}", cost::sci3(cc), cost::sci3(cn)));
    let ntc = cost::t_v_ntc(128).to_f64()[1];
    c.expect(ntc == 832_316_800.0 && cost::same_3sf(ntc, 8.32e8), format!("t_V_NTC(128) = {ntc}"));
    c.expect(cost::t_add(3) == Tuple::new(8, 9, 0), format!("t_ADD(3) = {}", fmt(cost::t_add(3))));
    c.expect(cost::t_add_ac(128) == Tuple::new(381, 253, 0), format!("concurrent adder at 128 = {}", fmt(cost::t_add_ac(128))));
    c
}

fn depths() -> Check {
    let mut c = Check::new();
    let mut vbe_bad = Vec::new();
    let mut cuc_bad = Vec::new();
    for n in 2..=64usize {
        let d = schedule_asap(&build_vbe_adder(n, true).unwrap().circuit, &Arch::Ac).unwrap().depth();
        let want = (3 * n as u64 - 3, 2 * n as u64 - 3, 0);
        if (d.ccnot, d.cnot, d.not) != want {
            vbe_bad.push(format!("n={n}: {d}"));
        }
        let d = schedule_asap(&build_cuccaro_adder(n).unwrap().circuit, &Arch::Ac).unwrap().depth();
        if d.ccnot != 2 * n as u64 - 1 {
            cuc_bad.push(n);
        }
    }
    c.expect(vbe_bad.is_empty(), format!("VBE depth (3n-3; 2n-3; 0) for n in 2..64: {} widths differ", vbe_bad.len()));
    for b in vbe_bad.iter().take(3) {
        c.note(b.clone());
    }
    c.expect(cuc_bad.is_empty(), format!("Cuccaro CCNOT depth 2n-1 for n in 2..64: {} widths differ", cuc_bad.len()));
    let rows = report::line_adder_table(&(3..=16).collect::<Vec<_>>()).unwrap();
    let r3 = &rows[0];
    c.expect(
        r3.slots <= LINE_SLOTS_AT_3 && r3.violations == 0 && r3.verified == Some(true),
        format!("line-routed 3-bit VBE: {} slots (limit {LINE_SLOTS_AT_3}), verified", r3.slots),
    );
    let gaps: Vec<String> = rows.iter().map(|r| format!("{}:{:+}", r.n, r.gap)).collect();
    c.note(format!("gap to 20n-15 by n: {}", gaps.join(" ")));
    c
}

fn functional() -> Check {
    let mut c = Check::new();
    let mut bad = Vec::new();
    let mut blocks = 0;
    for kind in AdderKind::ALL {
        for n in 2..=6usize {
            let ms: Vec<Option<usize>> = match kind {
                AdderKind::Qcla if !n.is_power_of_two() => continue,
                AdderKind::Csla | AdderKind::Csum if n < 3 => continue,
                AdderKind::Csla | AdderKind::Csum => (2..n).map(Some).collect(),
                _ => vec![None],
            };
            for m in ms {
                blocks += 1;
                let r = build_adder(kind, n, m).unwrap().verify(&Domain::Exhaustive).unwrap();
                if !r.pass {
                    bad.push(format!("{kind} n={n} m={m:?}"));
                }
            }
        }
    }
    c.expect(bad.is_empty(), format!("{blocks} adder blocks exhaustive to 6 bits: {bad:?}"));
    let moduli = [(2usize, 3u64), (3, 5), (3, 7), (4, 11), (4, 13), (5, 21), (5, 29), (5, 31)];
    let mut bad = 0;
    for (n, m) in moduli {
        for x in 0..m {
            let blk = build_modadd_3adder(n, m, x).unwrap();
            let mut st = Lanes::new(blk.circuit.num_qubits(), m as usize);
            for u in 0..m {
                st.set(u as usize, &blk.input, u);
            }
            st.apply(&blk.circuit).unwrap();
            bad += (0..m).filter(|&u| st.get(u as usize, &blk.acc) != oracle::add_mod(m, u, x)).count();
        }
    }
    c.expect(bad == 0, format!("three-adder modulo over {} moduli, every x and u: {bad} counterexamples", moduli.len()));
    let mut bad = Vec::new();
    let mut runs = 0;
    for (n, m, xs) in [(4usize, 15u64, &[2u64, 4, 7, 8, 11, 13][..]), (5, 21, &[2, 5, 11][..])] {
        for algo in Algo::ALL {
            for &x in xs {
                runs += 1;
                let b = build_modexp(&AlgoParams::preset(algo, n, m, x).unwrap()).unwrap();
                let exps: Vec<u64> = (0..1u64 << (2 * n + 1)).collect();
                match simulate(&b, &exps).unwrap() {
                    Ok(out) if exps.iter().zip(&out).all(|(&a, &y)| y == oracle::modexp(x, a, m)) => {}
                    _ => bad.push(format!("{algo} N={m} x={x}")),
                }
            }
        }
    }
    c.expect(bad.is_empty(), format!("{runs} exponentiation circuits over every exponent: {bad:?}"));
    c
}

fn identity() -> Check {
    let mut c = Check::new();
    let g = Gate::ccnot(0, 1, 2);
    let five = decompose_ccnot_ntc(&g).unwrap();
    let d = run_unitary(&five, 3).unwrap().distance_up_to_phase(&run_unitary(&[g], 3).unwrap());
    c.expect(five.len() == 5 && d < UNITARY_TOL, format!("{}-gate sequence vs CCNOT: {d:.1e} (tol {UNITARY_TOL:.0e})", five.len()));
    c
}

fn deferred() -> Check {
    let mut c = Check::new();
    let plan = deferred_modulo_plan(128, 4, 3).unwrap();
    c.expect(plan.b == 4 && plan.chain_calls == 9 && plan.vbe_calls == 20, format!("p=3 b={} plan, 4 additions: {} calls vs {}", plan.b, plan.chain_calls, plan.vbe_calls));
    let blk = build_deferred_accumulator(5, 29, 3, &[28, 17, 9, 23], AdderKind::Cuccaro, Some(4)).unwrap();
    // constant addends need one call each; the plan charges two
    c.note(format!("built chain with classical addends: {} calls", blk.adder_calls));
    c.note(format!("final correction: {} calls charged, {} realized", plan.correction_calls, plan.realized_correction_calls));
    c
}

fn latency_band() -> Check {
    let mut c = Check::new();
    for r in report::latency_table(100).unwrap() {
        if r.algo == Algo::Cvbe {
            continue;
        }
        let (Some(d), Some(b)) = (r.delta_pct, r.breakdown) else { continue };
        c.expect(d.abs() <= 100.0 * LATENCY_BAND, format!("{} {}: {:+.2}% (ccnot {:+.1}%, cnot {:+.1}%, not {:+.1}%)", r.algo, r.arch.name(), d, b[0], b[1], b[2]));
    }
    let lead = |a: Algo| cost::algo_eval(a, ArchKind::Ac, &ModelParams::preset(a)).unwrap().latency.ccnot;
    let (e, d, f, g) = (lead(Algo::E), lead(Algo::D), lead(Algo::F), lead(Algo::G));
    c.expect(e < d && d < f && f < g, "AC ordering E < D < F < G".into());
    c
}

fn sweeps() -> Check {
    let mut c = Check::new();
    let rows = report::sizes_table(&[8, 16, 32, 64, 128], 100).unwrap();
    for (n, want) in [(8, Algo::D), (16, Algo::D), (32, Algo::E), (64, Algo::E), (128, Algo::E)] {
        let best = rows.iter().find(|r| r.n == n && r.fastest).unwrap();
        c.expect(best.algo == want, format!("n={n}: fastest {} (want {want})", best.algo));
    }
    let d8 = rows.iter().find(|r| r.n == 8 && r.algo == Algo::D).unwrap();
    let lat = d8.ccnot.unwrap();
    c.expect((lat - D8_TARGET).abs() / D8_TARGET <= D8_BAND, format!("D at n=8: {lat} (target {D8_TARGET} +-{:.0}%)", D8_BAND * 100.0));
    let (cv, v) = (d8.vs_cvbe.unwrap(), d8.vs_vbe.unwrap());
    c.expect(cv >= D8_MIN_SPEEDUP, format!("D at n=8 vs concurrent VBE: {cv:.2}x (need {D8_MIN_SPEEDUP}x)"));
    c.note(format!("vs VBE without concurrency: {v:.2}x"));
    let multiples: Vec<usize> = (20..=400).step_by(20).collect();
    let space = report::space_table(128, &multiples).unwrap();
    for (algo, worst) in report::flatness(&space, FLAT_FROM) {
        c.expect(worst <= FLAT_TOL, format!("{algo} beyond {FLAT_FROM}n: moves {:.2}% (tol {:.0}%)", worst * 100.0, FLAT_TOL * 100.0));
    }
    c
}

fn fits() -> Check {
    let mut c = Check::new();
    let ns = [16, 32, 64, 128, 256, 512, 1024];
    for (algo, law) in [(Algo::E, "n log n (n/s + log s)"), (Algo::F, "n^2 (n/s + log s)")] {
        let f = report::growth_fit(algo, &ns, 100).unwrap();
        c.expect(f.r2 >= FIT_MIN_R2, format!("{algo} ~ {:.3} {law}: R^2 = {:.5}", f.c, f.r2));
    }
    c
}

fn space() -> Check {
    let mut c = Check::new();
    c.expect(cost::s_vbe(128) == 897, format!("VBE at 128: {}", cost::s_vbe(128)));
    let g = cost::algo_space(Algo::G, &ModelParams::preset(Algo::G));
    c.expect(g == 660, format!("G: {g}"));
    let d = cost::algo_space(Algo::D, &ModelParams::preset(Algo::D));
    c.expect((d as f64 - SD_TARGET).abs() / SD_TARGET <= SD_BAND, format!("D: {d} (target {SD_TARGET} +-{:.1}%)", SD_BAND * 100.0));
    // the expanded line of the same closed form, term by term
    let p = ModelParams::preset(Algo::D);
    let (n, m, g) = (p.n as f64, p.m as f64, (p.n / p.m) as f64);
    let per = 7.0 * n - 3.0 * m - g + (1 << p.w) as f64 + p.p as f64 + (1.5 * (g - 1.0) - 2.0 + (n - m) / 2.0).ceil();
    let expanded = p.s as f64 * per + 2.0 * n + 1.0;
    c.note(format!("expanded form gives {expanded}: {:+} qubits against the factored form", d as f64 - expanded));
    c
}

fn fmt(t: Tuple) -> String {
    let [a, b, c] = t.to_f64();
    format!("({a}; {b}; {c})")
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Check); 9] = [
        (1, "closed-form baseline figures", formulas),
        (2, "built adder depths and line routing", depths),
        (3, "functional correctness", functional),
        (4, "five-gate Toffoli identity", identity),
        (5, "deferred modulo call count", deferred),
        (6, "128-bit latency band and ordering", latency_band),
        (7, "sweep properties", sweeps),
        (8, "growth-law fits", fits),
        (9, "space accounting", space),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let t = Instant::now();
        let c = run();
        println!("{} {id}: {name} ({:.2?})", if c.ok { "PASS" } else { "FAIL" }, t.elapsed());
        for l in &c.lines {
            println!("    {l}");
        }
        if c.ok == KNOWN_RED.contains(&id) {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("all outcomes as recorded (known red: {KNOWN_RED:?})");
        ExitCode::SUCCESS
    } else {
        println!("criteria {unexpected:?} changed outcome against the recorded list {KNOWN_RED:?}");
        ExitCode::FAILURE
    }
}
