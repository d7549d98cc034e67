//! Tables and the verification battery behind the command-line tool.
//!
//! Every table is a `Vec` of serializable rows; [`write_rows`] renders it as
//! CSV or JSON. Nothing here reads the clock or an unseeded RNG, so output is
//! byte-identical between runs.

use std::collections::HashMap;
use std::io::Write;

use serde::Serialize;

use crate::adders::{build_adder, route_vbe_ntc, AdderKind};
use crate::arch::Arch;
use crate::cost::{self, Algo, AlgoEval, ArchKind, ModelParams, Tuple};
use crate::ir::Circuit;
use crate::modarith::{build_deferred_accumulator, build_modadd_const, ModAddBlock, ModMode};
use crate::pipeline::{build_modexp, AlgoParams, ModExpBuild};
use crate::sched::schedule_asap;
use crate::sim::{self, oracle, Domain, IoSpec, VerifyReport};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Format> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format `{s}` (csv, json)"))),
        }
    }
}

/// Writes rows as CSV (header from the field names) or a JSON array.
/// Nested fields are not allowed in CSV rows.
pub fn write_rows<T: Serialize, W: Write>(rows: &[T], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows).map_err(|e| Error::Parse(e.to_string()))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn rows_to_string<T: Serialize>(rows: &[T], format: Format) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(rows, format, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv and json are utf-8"))
}

fn na(x: Option<f64>) -> String {
    x.map_or_else(|| "N/A".to_string(), |v| format!("{v}"))
}

/// The common cost row: `name, n, arch, ccnot, cnot, not, space,
/// concurrency, params` with `params` a JSON object.
#[derive(Clone, Debug, Serialize)]
pub struct CostRow {
    pub name: String,
    pub n: usize,
    pub arch: String,
    pub ccnot: f64,
    pub cnot: f64,
    pub not: f64,
    pub space: usize,
    pub concurrency: Option<usize>,
    pub params: String,
}

impl CostRow {
    pub fn new(name: &str, n: usize, arch: ArchKind, t: Tuple, space: usize, concurrency: Option<usize>, params: String) -> CostRow {
        let [ccnot, cnot, not] = t.to_f64();
        CostRow { name: name.to_string(), n, arch: arch.name().to_string(), ccnot, cnot, not, space, concurrency, params }
    }

    pub fn from_eval(e: &AlgoEval, custom: bool) -> CostRow {
        let name = if custom { format!("{}-custom", e.algo) } else { e.algo.to_string() };
        CostRow::new(
            &name,
            e.params.n,
            e.arch,
            e.latency,
            e.space,
            None,
            serde_json::to_string(&e.params).expect("params serialize"),
        )
    }
}

/// Leading figures printed for the 128-bit parameter sets, `(ccnot, cnot,
/// not)` and the performance ratio. Line-architecture cells have no CCNOTs.
pub const REFERENCE: &[(Algo, ArchKind, [f64; 3], f64)] = &[
    (Algo::Cvbe, ArchKind::Ac, [1.25e8, 8.27e7, 0.0], 1.0),
    (Algo::Cvbe, ArchKind::Ntc, [0.0, 8.32e8, 0.0], 1.0),
    (Algo::D, ArchKind::Ac, [2.19e5, 2.57e4, 1.67e5], 569.8),
    (Algo::E, ArchKind::Ac, [1.71e5, 1.96e4, 2.93e4], 727.2),
    (Algo::F, ArchKind::Ac, [7.84e5, 1.30e4, 4.10e4], 158.9),
    (Algo::F, ArchKind::Ntc, [0.0, 4.11e6, 4.10e4], 202.5),
    (Algo::G, ArchKind::Ac, [1.50e7, 2.48e5, 7.93e5], 8.3),
    (Algo::G, ArchKind::Ntc, [0.0, 7.87e7, 7.93e5], 10.6),
];

pub fn reference(algo: Algo, arch: ArchKind) -> Option<([f64; 3], f64)> {
    REFERENCE.iter().find(|r| r.0 == algo && r.1 == arch).map(|r| (r.2, r.3))
}

/// One cell of the 128-bit latency table. `None` marks combinations the
/// architecture does not offer.
#[derive(Clone, Debug, Serialize)]
pub struct LatencyRow {
    pub algo: Algo,
    pub arch: ArchKind,
    pub latency: Option<Tuple>,
    pub space: Option<usize>,
    /// Baseline leading count over this row's, same architecture.
    pub perf: Option<f64>,
    pub reference: Option<[f64; 3]>,
    pub reference_perf: Option<f64>,
    /// Relative difference of the leading component from the reference, %.
    pub delta_pct: Option<f64>,
    /// Per-component relative differences, %.
    pub breakdown: Option<[f64; 3]>,
    pub eval: Option<AlgoEval>,
}

#[derive(Serialize)]
struct LatencyCsv {
    algo: String,
    arch: String,
    ccnot: String,
    cnot: String,
    not: String,
    space: String,
    perf: String,
    reference_lead: String,
    reference_perf: String,
    delta_pct: String,
}

impl LatencyRow {
    fn csv(&self) -> LatencyCsv {
        let t = self.latency.map(|t| t.to_f64());
        let lead = self.reference.map(|r| if self.arch == ArchKind::Ac { r[0] } else { r[1] });
        LatencyCsv {
            algo: self.algo.to_string(),
            arch: self.arch.name().to_string(),
            ccnot: na(t.map(|t| t[0])),
            cnot: na(t.map(|t| t[1])),
            not: na(t.map(|t| t[2])),
            space: na(self.space.map(|s| s as f64)),
            perf: na(self.perf.map(|p| (p * 10.0).round() / 10.0)),
            reference_lead: na(lead),
            reference_perf: na(self.reference_perf),
            delta_pct: na(self.delta_pct.map(|d| (d * 100.0).round() / 100.0)),
        }
    }
}

fn pct(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        if got == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        100.0 * (got - want) / want
    }
}

/// Every algorithm on both architectures at its 128-bit parameter set.
/// Ratios are computed from the cells themselves: CCNOTs on AC, CNOTs on
/// the line. `space_multiple` is checked against each set's space.
pub fn latency_table(space_multiple: usize) -> Result<Vec<LatencyRow>> {
    let mut rows = Vec::new();
    for arch in [ArchKind::Ac, ArchKind::Ntc] {
        let base = cost::algo_eval(Algo::Cvbe, arch, &ModelParams::preset(Algo::Cvbe))?.latency.lead(arch);
        for algo in Algo::ALL {
            let p = ModelParams::preset(algo);
            let eval = match cost::algo_eval(algo, arch, &p) {
                Ok(e) => Some(e),
                Err(Error::Unsupported(_)) => None,
                Err(e) => return Err(e),
            };
            if let Some(e) = &eval {
                if e.space > space_multiple * p.n {
                    return Err(Error::Infeasible(format!(
                        "{algo} needs {} qubits, over {space_multiple}n = {}",
                        e.space,
                        space_multiple * p.n
                    )));
                }
            }
            let refv = reference(algo, arch);
            let latency = eval.as_ref().map(|e| e.latency);
            let perf = latency.map(|t| {
                let lead = t.lead(arch);
                cost::ToPrimitive::to_f64(&(base / lead)).unwrap_or(f64::NAN)
            });
            let (delta_pct, breakdown) = match (latency, refv) {
                (Some(t), Some((r, _))) => {
                    let got = t.to_f64();
                    let i = if arch == ArchKind::Ac { 0 } else { 1 };
                    (Some(pct(got[i], r[i])), Some([pct(got[0], r[0]), pct(got[1], r[1]), pct(got[2], r[2])]))
                }
                _ => (None, None),
            };
            rows.push(LatencyRow {
                algo,
                arch,
                latency,
                space: eval.as_ref().map(|e| e.space),
                perf,
                reference: refv.map(|r| r.0),
                reference_perf: refv.map(|r| r.1),
                delta_pct,
                breakdown,
                eval,
            });
        }
    }
    Ok(rows)
}

pub fn latency_rows_to_string(rows: &[LatencyRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => rows_to_string(&rows.iter().map(LatencyRow::csv).collect::<Vec<_>>(), Format::Csv),
        Format::Json => rows_to_string(rows, Format::Json),
    }
}

/// A sweep point: the optimizer's best parameters for one algorithm.
#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub algo: Algo,
    pub n: usize,
    /// Space budget as a multiple of `n`.
    pub multiple: usize,
    pub ccnot: Option<f64>,
    pub cnot: Option<f64>,
    pub not: Option<f64>,
    pub space: Option<usize>,
    pub s: Option<usize>,
    pub w: Option<usize>,
    pub p: Option<usize>,
    pub m: Option<usize>,
    /// Concurrent-VBE CCNOT latency over this point's.
    pub vs_cvbe: Option<f64>,
    /// The same against VBE run without concurrency (every gate serial).
    pub vs_vbe: Option<f64>,
    pub fastest: bool,
}

fn point(algo: Algo, n: usize, multiple: usize, r: Result<AlgoEval>) -> Result<SweepPoint> {
    let e = match r {
        Ok(e) => Some(e),
        Err(Error::Infeasible(_)) => None,
        Err(e) => return Err(e),
    };
    let lead = e.as_ref().map(|e| e.latency.to_f64()[0]);
    let cvbe = cost::t_v_ac(n).to_f64()[0];
    let vbe = cost::t_v(n).to_f64()[0];
    Ok(SweepPoint {
        algo,
        n,
        multiple,
        ccnot: lead,
        cnot: e.as_ref().map(|e| e.latency.to_f64()[1]),
        not: e.as_ref().map(|e| e.latency.to_f64()[2]),
        space: e.as_ref().map(|e| e.space),
        s: e.as_ref().map(|e| e.params.s),
        w: e.as_ref().map(|e| e.params.w),
        p: e.as_ref().map(|e| e.params.p),
        m: e.as_ref().filter(|e| e.algo == Algo::D).map(|e| e.params.m),
        vs_cvbe: lead.map(|l| cvbe / l),
        vs_vbe: lead.map(|l| vbe / l),
        fastest: false,
    })
}

fn mark_fastest(rows: &mut [SweepPoint], key: impl Fn(&SweepPoint) -> usize) {
    let mut best: HashMap<usize, f64> = HashMap::new();
    for r in rows.iter() {
        if let Some(c) = r.ccnot {
            let e = best.entry(key(r)).or_insert(f64::INFINITY);
            *e = e.min(c);
        }
    }
    for r in rows.iter_mut() {
        r.fastest = r.ccnot.is_some() && r.ccnot == best.get(&key(r)).copied();
    }
}

pub const SWEEP_ALGOS: [Algo; 3] = [Algo::D, Algo::E, Algo::F];

/// Optimized AC latency against problem size at a fixed space multiple.
pub fn sizes_table(ns: &[usize], multiple: usize) -> Result<Vec<SweepPoint>> {
    let mut rows = Vec::new();
    for &n in ns {
        for algo in SWEEP_ALGOS {
            rows.push(point(algo, n, multiple, cost::optimize(algo, ArchKind::Ac, n, multiple * n))?);
        }
    }
    mark_fastest(&mut rows, |r| r.n);
    Ok(rows)
}

/// Optimized AC latency against the space budget at fixed `n`.
pub fn space_table(n: usize, multiples: &[usize]) -> Result<Vec<SweepPoint>> {
    let mut rows = Vec::new();
    for &k in multiples {
        for algo in SWEEP_ALGOS {
            rows.push(point(algo, n, k, cost::optimize(algo, ArchKind::Ac, n, k * n))?);
        }
    }
    mark_fastest(&mut rows, |r| r.multiple);
    Ok(rows)
}

/// Per algorithm, the largest relative drop in latency beyond `from`
/// (a multiple of `n`), as a fraction of the latency at `from`.
pub fn flatness(rows: &[SweepPoint], from: usize) -> Vec<(Algo, f64)> {
    SWEEP_ALGOS
        .iter()
        .filter_map(|&algo| {
            let at = rows.iter().find(|r| r.algo == algo && r.multiple == from)?.ccnot?;
            let worst = rows
                .iter()
                .filter(|r| r.algo == algo && r.multiple > from)
                .filter_map(|r| r.ccnot)
                .map(|c| (at - c).abs() / at)
                .fold(0.0, f64::max);
            Some((algo, worst))
        })
        .collect()
}

/// Growth-law fit of optimized AC latency: `c n log n (n/s + log s)` for E,
/// `c n^2 (n/s + log s)` for F and G, with `s` as chosen at each point.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthFit {
    pub algo: Algo,
    pub c: f64,
    pub r2: f64,
    pub points: Vec<SweepPoint>,
}

pub fn growth_fit(algo: Algo, ns: &[usize], multiple: usize) -> Result<GrowthFit> {
    let (mut xs, mut ys, mut points) = (Vec::new(), Vec::new(), Vec::new());
    for &n in ns {
        let e = cost::optimize(algo, ArchKind::Ac, n, multiple * n)?;
        let (nf, s) = (n as f64, e.params.s as f64);
        let shape = nf / s + s.log2();
        xs.push(match algo {
            Algo::E => nf * nf.log2() * shape,
            Algo::F | Algo::G => nf * nf * shape,
            _ => return Err(Error::Unsupported(format!("no growth law for {algo}"))),
        });
        ys.push(e.latency.to_f64()[0]);
        points.push(point(algo, n, multiple, Ok(e))?);
    }
    let (c, r2) = cost::fit_through_origin(&xs, &ys);
    Ok(GrowthFit { algo, c, r2, points })
}

/// Measured peak concurrency of one adder at `n` bits.
pub fn adder_concurrency(kind: AdderKind, n: usize, m: Option<usize>) -> Result<usize> {
    let blk = build_adder(kind, n, m)?;
    Ok(schedule_asap(&blk.circuit, &Arch::Ac)?.max_concurrency())
}

/// The parameter sets with their space and concurrency.
#[derive(Clone, Debug, Serialize)]
pub struct ParamsRow {
    pub algo: Algo,
    pub adder: String,
    pub modulo: String,
    pub w: usize,
    pub s: usize,
    pub space: usize,
    /// Peak adder concurrency times `s`, measured on the built adder.
    pub concurrency: usize,
}

pub fn params_table() -> Result<Vec<ParamsRow>> {
    Algo::ALL
        .iter()
        .map(|&algo| {
            let p = ModelParams::preset(algo);
            let (kind, m) = match algo {
                Algo::Cvbe => (AdderKind::Vbe, None),
                Algo::D => (AdderKind::Csum, Some(p.m)),
                Algo::E => (AdderKind::Qcla, None),
                Algo::F | Algo::G => (AdderKind::Cuccaro, None),
            };
            let adder = match m {
                Some(m) => format!("{kind}(m={m})"),
                None => kind.to_string(),
            };
            let modulo = match (algo, p.p) {
                (Algo::Cvbe, _) => "vbe".to_string(),
                (_, 0) => "three-adder".to_string(),
                (_, pp) => format!("p={pp}, b={}", p.b()),
            };
            Ok(ParamsRow {
                algo,
                adder,
                modulo,
                w: p.w,
                s: p.s,
                space: cost::algo_space(algo, &p),
                concurrency: adder_concurrency(kind, p.n, m)? * p.s,
            })
        })
        .collect()
}

/// Measured AC depth of each adder family next to its closed form.
#[derive(Clone, Debug, Serialize)]
pub struct AdderRow {
    pub adder: AdderKind,
    pub n: usize,
    pub m: Option<usize>,
    pub gates_ccnot: u64,
    pub gates_cnot: u64,
    pub gates_not: u64,
    pub depth_ccnot: u64,
    pub depth_cnot: u64,
    pub depth_not: u64,
    pub model_ccnot: Option<f64>,
    pub model_cnot: Option<f64>,
    pub model_not: Option<f64>,
    pub space: usize,
    pub concurrency: usize,
}

fn adder_model(kind: AdderKind, n: usize, m: usize) -> Option<Tuple> {
    match kind {
        AdderKind::Vbe => Some(cost::t_add_ac(n)),
        AdderKind::Cuccaro => Some(cost::t_cuca_ac(n)),
        AdderKind::Qcla => n.is_power_of_two().then(|| cost::t_la_ac(n)),
        AdderKind::Csla => Some(cost::t_sem_ac(n, m)),
        AdderKind::Csum => (cost::partition(n, m).0 >= 2).then(|| cost::t_csum_ac(n, m)),
    }
}

pub fn adders_table(ns: &[usize]) -> Result<Vec<AdderRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        for kind in AdderKind::ALL {
            let m = matches!(kind, AdderKind::Csla | AdderKind::Csum).then(|| kind.default_m(n));
            let blk = match build_adder(kind, n, m) {
                Ok(b) => b,
                Err(Error::Param(_)) => continue,
                Err(e) => return Err(e),
            };
            let s = schedule_asap(&blk.circuit, &Arch::Ac)?;
            let (t, d) = (blk.circuit.totals(), s.depth());
            let model = adder_model(kind, n, m.unwrap_or(0)).map(|t| t.to_f64());
            rows.push(AdderRow {
                adder: kind,
                n,
                m,
                gates_ccnot: t.ccnot,
                gates_cnot: t.cnot,
                gates_not: t.not,
                depth_ccnot: d.ccnot,
                depth_cnot: d.cnot,
                depth_not: d.not,
                model_ccnot: model.map(|t| t[0]),
                model_cnot: model.map(|t| t[1]),
                model_not: model.map(|t| t[2]),
                space: blk.circuit.space(),
                concurrency: s.max_concurrency(),
            });
        }
    }
    Ok(rows)
}

/// The concurrent VBE adder routed onto a line.
#[derive(Clone, Debug, Serialize)]
pub struct LineAdderRow {
    pub n: usize,
    pub slots: usize,
    /// The hand-routed figure `20n - 15`.
    pub target: usize,
    pub gap: i64,
    pub swaps: usize,
    pub violations: usize,
    /// Exhaustive check of the routed circuit; `None` above 6 bits.
    pub verified: Option<bool>,
}

pub fn line_adder_table(ns: &[usize]) -> Result<Vec<LineAdderRow>> {
    ns.iter()
        .map(|&n| {
            let (blk, r) = route_vbe_ntc(n)?;
            let line = Arch::ntc_identity(r.circuit.num_qubits());
            let slots = schedule_asap(&r.circuit, &line)?.num_slots();
            let target = 20 * n - 15;
            Ok(LineAdderRow {
                n,
                slots,
                target,
                gap: slots as i64 - target as i64,
                swaps: r.swaps,
                violations: line.violations(&r.circuit).len(),
                verified: if n <= 6 { Some(blk.verify_routed(&r)?) } else { None },
            })
        })
        .collect()
}

/// Removes the middle gate. A stand-in for a builder bug.
pub fn mutate(c: &Circuit) -> Circuit {
    let mut out = c.clone();
    if !out.gates.is_empty() {
        out.gates.remove(out.gates.len() / 2);
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub pass: bool,
    pub circuits: usize,
    /// Circuits that failed; with `mutated` set, the mutants caught.
    pub failed: usize,
    pub max_n: usize,
    pub mutated: bool,
    pub seed: u64,
    pub note: Option<String>,
    pub reports: Vec<VerifyReport>,
}

fn zero_outputs(io: &mut IoSpec, c: &Circuit, keep: &[usize]) -> usize {
    let rest: Vec<usize> = (0..c.num_qubits()).filter(|q| !keep.contains(q)).collect();
    let chunks: Vec<Vec<usize>> = rest.chunks(64).map(<[usize]>::to_vec).collect();
    let k = chunks.len();
    for (i, ch) in chunks.into_iter().enumerate() {
        io.outputs.push((format!("ancillae{i}"), ch));
    }
    k
}

fn verify_modadd(name: &str, blk: &ModAddBlock, c: &Circuit, modulus: u64, total: u64) -> Result<VerifyReport> {
    let mut io = IoSpec { inputs: vec![("u".into(), blk.input.clone())], outputs: vec![("acc".into(), blk.acc.clone())] };
    let mut keep = blk.acc.clone();
    keep.extend(&blk.input);
    keep.extend(&blk.flags);
    let k = zero_outputs(&mut io, c, &keep);
    let oracle = move |inp: &[u64]| {
        (inp[0] < modulus).then(|| {
            let mut out = vec![oracle::add_mod(modulus, inp[0], total % modulus)];
            out.extend(std::iter::repeat_n(0, k));
            out
        })
    };
    sim::verify(name, c, &io, "add_mod", &oracle, &Domain::Exhaustive)
}

/// Checks a built exponentiation circuit: exhaustive over the exponent up
/// to 20 bits, otherwise 4096 seeded samples.
pub fn verify_modexp_build(b: &ModExpBuild, seed: u64) -> Result<VerifyReport> {
    let p = &b.params;
    let name = format!("modexp-{}-{}-N{}-x{}", p.algo, p.n, p.modulus, p.x);
    let domain = if b.exponent.len() <= sim::EXHAUSTIVE_LIMIT_BITS {
        Domain::Exhaustive
    } else {
        Domain::Sampled { cases: 4096, seed }
    };
    verify_modexp(&name, b, &b.circuit, &domain)
}

fn verify_modexp(name: &str, b: &ModExpBuild, c: &Circuit, domain: &Domain) -> Result<VerifyReport> {
    let mut io = IoSpec { inputs: vec![("a".into(), b.exponent.clone())], outputs: vec![("out".into(), b.output.clone())] };
    let mut keep = b.output.clone();
    keep.extend(&b.exponent);
    let k = zero_outputs(&mut io, c, &keep);
    let (x, modulus) = (b.params.x, b.params.modulus);
    let oracle = move |inp: &[u64]| {
        let mut out = vec![oracle::modexp(x, inp[0], modulus)];
        out.extend(std::iter::repeat_n(0, k));
        Some(out)
    };
    sim::verify(name, c, &io, "modexp", &oracle, domain)
}

const SUITE_MODULI: [(usize, u64); 8] = [(3, 5), (3, 7), (4, 9), (4, 11), (4, 13), (5, 17), (5, 21), (5, 29)];

/// The full battery: every adder family at `2..=max_n` bits, constant
/// modular adders, deferred accumulators and one exponentiation per
/// algorithm at four bits. Exhaustive everywhere; the seed only drives the
/// choice of addends.
pub fn verify_suite(max_n: usize, mutate_gates: bool, seed: u64) -> Result<SuiteReport> {
    use rand::{Rng, SeedableRng};
    if max_n > 6 {
        return Err(Error::Param(format!("max n = {max_n}: the exhaustive suite stops at 6 bits")));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let prep = |c: &Circuit| if mutate_gates { mutate(c) } else { c.clone() };
    let mut reports = Vec::new();
    for n in 2..=max_n {
        for kind in AdderKind::ALL {
            let m = matches!(kind, AdderKind::Csla | AdderKind::Csum).then(|| kind.default_m(n));
            let Ok(mut blk) = build_adder(kind, n, m) else { continue };
            blk.circuit = prep(&blk.circuit);
            let mut r = blk.verify(&Domain::Exhaustive)?;
            r.circuit = format!("{}-{n}", kind);
            reports.push(r);
        }
    }
    for &(n, modulus) in SUITE_MODULI.iter().filter(|(n, _)| *n <= max_n) {
        let addend = rng.gen_range(1..modulus);
        for (mode, tag) in [(ModMode::ThreeAdder, "three-adder"), (ModMode::Vbe, "vbe")] {
            let blk = build_modadd_const(n, modulus, addend, mode, AdderKind::Cuccaro)?;
            reports.push(verify_modadd(&format!("modadd-{tag}-{n}-N{modulus}-x{addend}"), &blk, &prep(&blk.circuit), modulus, addend)?);
        }
        let adds: Vec<u64> = (0..5).map(|_| rng.gen_range(0..modulus)).collect();
        let blk = build_deferred_accumulator(n, modulus, 2, &adds, AdderKind::Cuccaro, None)?;
        let total: u64 = adds.iter().sum();
        reports.push(verify_modadd(&format!("deferred-{n}-N{modulus}"), &blk, &prep(&blk.circuit), modulus, total)?);
    }
    let note = if max_n >= 4 {
        for algo in Algo::ALL {
            let b = build_modexp(&AlgoParams::preset(algo, 4, 15, 7)?)?;
            reports.push(verify_modexp(&format!("modexp-{algo}-4-N15-x7"), &b, &prep(&b.circuit), &Domain::Exhaustive)?);
        }
        None
    } else {
        Some(format!("max n = {max_n}: adders only up to {max_n} bits, no exponentiation circuits"))
    };
    Ok(SuiteReport {
        pass: reports.iter().all(|r| r.pass),
        circuits: reports.len(),
        failed: reports.iter().filter(|r| !r.pass).count(),
        max_n,
        mutated: mutate_gates,
        seed,
        note,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn latency_cells() {
        let rows = latency_table(100).unwrap();
        let cell = |a, k| rows.iter().find(|r| r.algo == a && r.arch == k).unwrap();
        assert_eq!(cell(Algo::Cvbe, ArchKind::Ac).perf, Some(1.0));
        assert!(cell(Algo::D, ArchKind::Ntc).latency.is_none());
        let csv = latency_rows_to_string(&rows, Format::Csv).unwrap();
        assert!(csv.lines().any(|l| l.starts_with("D,ntc,N/A")));
        let ed = cell(Algo::E, ArchKind::Ac).perf.unwrap() / cell(Algo::D, ArchKind::Ac).perf.unwrap();
        assert!((ed - 1.28).abs() < 0.03, "{ed}");
    }

    #[test]
    fn tight_budget_is_infeasible() {
        assert!(matches!(latency_table(50), Err(Error::Infeasible(_))));
    }

    #[test]
    fn line_adder_small() {
        let rows = line_adder_table(&[3]).unwrap();
        assert!(rows[0].slots <= 45);
        assert_eq!(rows[0].violations, 0);
        assert_eq!(rows[0].verified, Some(true));
    }

    #[test]
    fn suite_small_and_mutated() {
        let r = verify_suite(3, false, 1).unwrap();
        assert!(r.pass, "{:?}", r.reports.iter().find(|r| !r.pass));
        assert!(r.note.is_some());
        assert!(!verify_suite(3, true, 1).unwrap().pass);
    }
}
