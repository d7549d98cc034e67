//! Full modular exponentiation `|a⟩|0⟩ → |a⟩|x^a mod N⟩`.
//!
//! The `2n+1` exponent bits are cut into windows of `w` bits. Window `k`
//! selects `x^(v 2^(kw))` from a classical table through a one-hot decode
//! of its bits. Windows are dealt to `s` chains; the first window of a
//! chain sets the chain's product register (QSET) and every later one
//! multiplies it in place. Chain products are combined pairwise by
//! quantum-quantum multipliers; with more than one chain the whole
//! computation is reversed after the root is copied out.
//!
//! An in-place multiply by `M` is two passes. With a clean modular adder:
//! `F += P*M`, then `P += F*(N - M^-1)`, which zeroes `P`, and the two
//! registers swap roles. With deferred reduction the flags are garbage, so
//! each pass computes into a work register, XORs the low `n` bits out and
//! uncomputes.

use serde::Serialize;

use crate::adders::AdderKind;
use crate::cost::{self, Algo, AlgoEval, ArchKind, ModelParams};
use crate::ir::{Builder, Circuit, WireRole};
use crate::modarith::{self, check_modulus, emit_decode, emit_terms, IndirectionParams, ModAdder, ModMode, ModRegs, ModuloParams, Term};
use crate::sim::oracle;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuloChoice {
    Vbe,
    ThreeAdder,
    Deferred { p: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgoParams {
    pub algo: Algo,
    pub n: usize,
    pub modulus: u64,
    pub x: u64,
    pub adder: AdderKind,
    /// CSUM/CSLA group size, `None` for the adder's default.
    pub m: Option<usize>,
    pub modulo: ModuloChoice,
    pub w: usize,
    pub s: usize,
    /// Space budget as a multiple of `n`, checked against the model.
    pub space_multiple: Option<usize>,
    /// Set when any field differs from the preset.
    pub custom: bool,
}

impl AlgoParams {
    /// The named parameter set, scaled to `n` bits. At `n = 128` these are
    /// the tabulated choices; for small `n` the chain count is cut so every
    /// chain holds at least two windows and `p` is kept small.
    pub fn preset(algo: Algo, n: usize, modulus: u64, x: u64) -> Result<AlgoParams> {
        let mp = ModelParams::preset(algo);
        let (adder, modulo) = match algo {
            Algo::Cvbe => (AdderKind::Vbe, ModuloChoice::Vbe),
            Algo::D => (AdderKind::Csum, ModuloChoice::Deferred { p: mp.p }),
            Algo::E => (AdderKind::Qcla, ModuloChoice::Deferred { p: mp.p }),
            Algo::F => (AdderKind::Cuccaro, ModuloChoice::Deferred { p: mp.p }),
            Algo::G => (AdderKind::Cuccaro, ModuloChoice::ThreeAdder),
        };
        let mut ap = AlgoParams {
            algo,
            n,
            modulus,
            x,
            adder,
            m: (algo == Algo::D).then_some(mp.m),
            modulo,
            w: mp.w,
            s: mp.s,
            space_multiple: None,
            custom: false,
        };
        if n != 128 {
            let k = cost::windows(n, ap.w);
            ap.s = ap.s.min((k / 2).max(1)).min(n);
            if let ModuloChoice::Deferred { p } = ap.modulo {
                let p = if algo == Algo::E { (n + 1).next_power_of_two() - n } else { p.min(2) };
                ap.modulo = ModuloChoice::Deferred { p };
            }
            if algo == Algo::D {
                ap.m = Some(4.min(n - 1).max(2));
            }
        }
        Ok(ap)
    }

    pub fn mode(&self) -> Result<ModMode> {
        Ok(match self.modulo {
            ModuloChoice::Vbe => ModMode::Vbe,
            ModuloChoice::ThreeAdder => ModMode::ThreeAdder,
            ModuloChoice::Deferred { p } => ModMode::Deferred(ModuloParams::new(p)?),
        })
    }

    /// Cost-model view of these parameters.
    pub fn model(&self) -> ModelParams {
        let p = match self.modulo {
            ModuloChoice::Deferred { p } => p,
            _ => 0,
        };
        let m = self.m.unwrap_or(0).min(self.n.saturating_sub(1));
        ModelParams { n: self.n, s: self.s, w: self.w, p, m }
    }

    /// The model evaluation, when the model covers these parameters.
    pub fn predicted(&self, arch: ArchKind) -> Result<AlgoEval> {
        cost::algo_eval(self.algo, arch, &self.model())
    }

    pub fn validate(&self) -> Result<()> {
        check_modulus(self.n, self.modulus)?;
        if self.x == 0 || self.x >= self.modulus || oracle::mod_inverse(self.x, self.modulus).is_none() {
            return Err(Error::Param(format!("x = {} must be a unit modulo {}", self.x, self.modulus)));
        }
        if !(1..=4).contains(&self.w) {
            return Err(Error::Param(format!("w = {} outside 1..=4", self.w)));
        }
        if self.s == 0 || self.s > self.n {
            return Err(Error::Param(format!("s = {} outside 1..={}", self.s, self.n)));
        }
        if let Some(k) = self.space_multiple {
            let need = cost::algo_space(self.algo, &self.model());
            if need > k * self.n {
                return Err(Error::Infeasible(format!(
                    "space {need} exceeds the budget {k}n = {}; binding terms: s = {}, adder = {}, 2^w = {}",
                    k * self.n,
                    self.s,
                    cost::adder_space(self.algo, &self.model()),
                    1 << self.w
                )));
            }
        }
        Ok(())
    }

    /// Rejects combinations the architecture does not offer.
    pub fn check_arch(&self, arch: ArchKind) -> Result<()> {
        if arch == ArchKind::Ntc && matches!(self.adder, AdderKind::Qcla | AdderKind::Csum | AdderKind::Csla) {
            return Err(Error::Unsupported(format!(
                "{} adder on the line architecture: its long-distance operands make it unattractive there",
                self.adder
            )));
        }
        Ok(())
    }
}

/// How exponent windows are dealt to chains.
#[derive(Clone, Debug, Serialize)]
pub struct PipelinePlan {
    pub n: usize,
    pub s: usize,
    pub w: usize,
    /// `ceil((2n+1)/w)` multiplicands.
    pub windows: usize,
    /// Window count per chain; the first window of each is a QSET.
    pub chain_windows: Vec<usize>,
    pub r: usize,
    /// Multiplier latencies on the critical path.
    pub multiplier_latency: i128,
    /// The printed chain expression, kept for comparison.
    pub multiplier_latency_printed: i128,
    /// `ceil(log2 s)`.
    pub qq_steps: usize,
    pub cc_multiplies: usize,
    pub qq_multiplies: usize,
}

impl PipelinePlan {
    /// Exponent bits covered, which must be `2n+1`.
    pub fn bits_covered(&self) -> usize {
        (0..self.windows).map(|k| self.w.min(2 * self.n + 1 - k * self.w)).sum()
    }
}

pub fn plan_parallel(n: usize, s: usize, w: usize) -> Result<PipelinePlan> {
    if n < 2 {
        return Err(Error::Param(format!("n = {n} too small")));
    }
    if s == 0 || s > n {
        return Err(Error::Param(format!("s = {s} outside 1..={n}")));
    }
    if !(1..=4).contains(&w) {
        return Err(Error::Param(format!("w = {w} outside 1..=4")));
    }
    let k = cost::windows(n, w);
    let chains = s.min(k);
    let r = k / chains;
    let long = k - r * chains;
    let chain_windows: Vec<usize> = (0..chains).map(|c| r + usize::from(c < long)).collect();
    let qq_steps = cost::clog2(chains as i128) as usize;
    Ok(PipelinePlan {
        n,
        s,
        w,
        windows: k,
        cc_multiplies: chain_windows.iter().map(|c| c - 1).sum(),
        qq_multiplies: chains - 1,
        chain_windows,
        r: k / s,
        multiplier_latency: cost::r_i(n, s, w),
        multiplier_latency_printed: cost::r_i_printed(n, s, w),
        qq_steps,
    })
}

/// A built exponentiation circuit with the registers to drive it.
#[derive(Clone, Debug)]
pub struct ModExpBuild {
    pub circuit: Circuit,
    pub exponent: Vec<usize>,
    pub output: Vec<usize>,
    pub plan: PipelinePlan,
    pub params: AlgoParams,
    /// Modular-level adder invocations emitted.
    pub adder_calls: usize,
    /// The same count predicted from the plan.
    pub predicted_adder_calls: usize,
    /// Adder family used by the quantum-quantum multipliers.
    pub qq_adder: Option<AdderKind>,
}

impl ModExpBuild {
    /// Every qubit that must return to zero.
    pub fn ancillae(&self) -> Vec<usize> {
        (0..self.circuit.num_qubits()).filter(|q| !self.exponent.contains(q) && !self.output.contains(q)).collect()
    }
}

/// Adder calls of one in-place multiply by a classical constant.
fn cc_multiply_calls(ma: &ModAdder) -> usize {
    let n = ma.n;
    match ma.mode {
        ModMode::Vbe => 2 * n * 5,
        ModMode::ThreeAdder => 2 * n * 3,
        // two passes, each computed and uncomputed
        ModMode::Deferred(mp) => 2 * 2 * (n + n.div_ceil(mp.b) + 2 * mp.p),
    }
}

/// Adder calls of one quantum-quantum multiply: `n` five-call additions and
/// `n-1` doublings, each done and undone.
fn qq_multiply_calls(n: usize) -> usize {
    5 * n + 2 * 2 * (n - 1)
}

struct Chain {
    prod: Vec<usize>,
    /// The zero register that swaps with `prod` (clean modes) or the XOR
    /// target (deferred).
    other: Vec<usize>,
    regs: ModRegs,
    dec: Vec<usize>,
    dec_anc: Vec<usize>,
}

fn table(params: &AlgoParams, k: usize, width: usize) -> Result<Vec<u64>> {
    let ip = IndirectionParams::powers(params.x, params.modulus, width, k * params.w)?;
    Ok(ip.table)
}

fn terms_for(src: &[usize], dec: &[usize], consts: &[u64], i: usize, modulus: u64) -> Vec<Term> {
    consts
        .iter()
        .enumerate()
        .map(|(v, &c)| {
            let val = oracle::mul_mod(modulus, c, oracle::modexp(2, i as u64, modulus));
            Term::new(vec![src[i], dec[v]], val)
        })
        .collect()
}

/// Multiplies `chain.prod` in place by `table[window]`.
fn emit_cc_multiply(bld: &mut Builder, ma: &ModAdder, ch: &mut Chain, dec: &[usize], tab: &[u64]) {
    let n = ma.n;
    let nn = ma.modulus;
    let inv: Vec<u64> = tab.iter().map(|&t| oracle::mod_inverse(t, nn).expect("table entries are units")).collect();
    match ma.mode {
        ModMode::Vbe | ModMode::ThreeAdder => {
            let neg_inv: Vec<u64> = inv.iter().map(|&t| nn - t).collect();
            let src = ch.prod.clone();
            for i in 0..n {
                let terms = terms_for(&src, dec, tab, i, nn);
                ma.emit_add_const(bld, &mut ch.regs, &terms, Some(src[i]));
            }
            // product now in regs.acc; clear the old register
            let product = std::mem::replace(&mut ch.regs.acc, src);
            for i in 0..n {
                let terms = terms_for(&product, dec, &neg_inv, i, nn);
                ma.emit_add_const(bld, &mut ch.regs, &terms, Some(product[i]));
            }
            ch.prod = product;
        }
        ModMode::Deferred(_) => {
            let src = ch.prod.clone();
            let dst = ch.other.clone();
            emit_xor_product(bld, ma, &mut ch.regs, &src, &dst, dec, tab);
            emit_xor_product(bld, ma, &mut ch.regs, &dst, &src, dec, &inv);
            ch.prod = dst;
            ch.other = src;
        }
    }
}

/// `dst ^= src * table[window] mod N`, leaving the work registers clean.
fn emit_xor_product(bld: &mut Builder, ma: &ModAdder, r: &mut ModRegs, src: &[usize], dst: &[usize], dec: &[usize], tab: &[u64]) {
    let n = ma.n;
    let saved = r.clone();
    let start = bld.mark();
    let adds: Vec<Vec<Term>> = (0..n).map(|i| terms_for(src, dec, tab, i, ma.modulus)).collect();
    ma.emit_deferred(bld, r, &adds);
    let end = bld.mark();
    for j in 0..n {
        bld.cnot(r.acc[j], dst[j]);
    }
    bld.undo_range(start, end);
    let calls = r.calls - saved.calls;
    *r = ModRegs { calls: r.calls + calls, ..saved };
}

/// `out = a * b mod N` into the zero register `rr.acc`, `a` and `b` kept.
pub fn emit_qq_multiply(bld: &mut Builder, ma: &ModAdder, rr: &mut ModRegs, dr: &mut ModRegs, a: &[usize], b: &[usize]) {
    let n = ma.n;
    for j in 0..n {
        bld.cnot(a[j], dr.acc[j]);
    }
    let saved = dr.clone();
    let mut doublings = Vec::new();
    for i in 0..n {
        let t = rr.t.clone();
        for j in 0..n {
            bld.ccnot(b[i], dr.acc[j], t[j]);
        }
        ma.emit_add_quantum(bld, rr, &t);
        for j in 0..n {
            bld.ccnot(b[i], dr.acc[j], t[j]);
        }
        if i + 1 < n {
            let m0 = bld.mark();
            ma.emit_double(bld, dr);
            doublings.push((m0, bld.mark()));
        }
    }
    for &(s, e) in doublings.iter().rev() {
        bld.undo_range(s, e);
    }
    let calls = dr.calls - saved.calls;
    *dr = ModRegs { calls: dr.calls + calls, ..saved };
    for j in 0..n {
        bld.cnot(a[j], dr.acc[j]);
    }
}

/// The chain's adder family at width `n`, or Cuccaro when that width is
/// not available (the lookahead adder needs a power of two).
fn qq_adder(params: &AlgoParams) -> Result<(ModAdder, AdderKind)> {
    match ModAdder::new(params.n, params.modulus, ModMode::Vbe, params.adder, params.m) {
        Ok(ma) => Ok((ma, params.adder)),
        Err(_) => Ok((ModAdder::new(params.n, params.modulus, ModMode::Vbe, AdderKind::Cuccaro, None)?, AdderKind::Cuccaro)),
    }
}

/// A standalone quantum-quantum multiplier: `|a,b,0⟩ → |a,b,ab mod N⟩`.
#[derive(Clone, Debug)]
pub struct QqBlock {
    pub circuit: Circuit,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub out: Vec<usize>,
}

pub fn build_qq_multiply(n: usize, modulus: u64, kind: AdderKind) -> Result<QqBlock> {
    let ma = ModAdder::new(n, modulus, ModMode::Vbe, kind, None)?;
    let mut bld = Builder::new();
    let a = bld.alloc("a", n, WireRole::Product);
    let b = bld.alloc("b", n, WireRole::Product);
    let mut rr = ma.alloc(&mut bld, "r_", 0);
    let mut dr = ma.alloc(&mut bld, "d_", 0);
    emit_qq_multiply(&mut bld, &ma, &mut rr, &mut dr, &a, &b);
    Ok(QqBlock { circuit: bld.finish(), a, b, out: rr.acc })
}

pub fn build_modexp(params: &AlgoParams) -> Result<ModExpBuild> {
    params.validate()?;
    let n = params.n;
    let nn = params.modulus;
    let plan = plan_parallel(n, params.s, params.w)?;
    let ma = ModAdder::new(n, nn, params.mode()?, params.adder, params.m)?;
    let bits = 2 * n + 1;
    let mut bld = Builder::new();
    let exponent = bld.alloc("a", bits, WireRole::Exponent);
    let flags = ma.deferred_flags(n);
    let w = params.w;
    let mut chains: Vec<Chain> = Vec::new();
    for c in 0..plan.chain_windows.len() {
        let prod = bld.alloc(&format!("p{c}"), n, WireRole::Product);
        let regs = ma.alloc(&mut bld, &format!("c{c}_"), flags);
        let other = if matches!(ma.mode, ModMode::Deferred(_)) {
            bld.alloc(&format!("f{c}"), n, WireRole::Product)
        } else {
            vec![]
        };
        let dec = bld.alloc(&format!("d{c}"), 1 << w, WireRole::MuxEnable);
        let dec_anc = bld.alloc(&format!("d{c}_tree"), w.saturating_sub(2), WireRole::MuxEnable);
        chains.push(Chain { prod, other, regs, dec, dec_anc });
    }
    let start = bld.mark();
    let mut k = 0;
    let mut cc = 0;
    for (c, &len) in plan.chain_windows.iter().enumerate() {
        for j in 0..len {
            let lo = k * w;
            let width = w.min(bits - lo);
            let window = &exponent[lo..lo + width];
            let tab = table(params, k, width)?;
            let ch = &mut chains[c];
            let dec = ch.dec[..1 << width].to_vec();
            emit_decode(&mut bld, window, &dec, &ch.dec_anc);
            if j == 0 {
                let terms: Vec<Term> = tab.iter().enumerate().map(|(v, &t)| Term::new(vec![dec[v]], t)).collect();
                emit_terms(&mut bld, &terms, None, &ch.prod, usize::MAX);
            } else {
                emit_cc_multiply(&mut bld, &ma, ch, &dec, &tab);
                cc += 1;
            }
            emit_decode(&mut bld, window, &dec, &ch.dec_anc);
            k += 1;
        }
    }
    debug_assert_eq!(cc, plan.cc_multiplies);
    let mut adder_calls: usize = chains.iter().map(|c| c.regs.calls).sum();
    let mut predicted = plan.cc_multiplies * cc_multiply_calls(&ma);
    let mut qq_kind = None;
    let output = if chains.len() == 1 {
        chains.pop().map(|c| c.prod).unwrap_or_default()
    } else {
        let (qa, kind) = qq_adder(params)?;
        qq_kind = Some(kind);
        let mut rr = qa.alloc(&mut bld, "qq_r_", 0);
        let mut dr = qa.alloc(&mut bld, "qq_d_", 0);
        let mut level: Vec<Vec<usize>> = chains.iter().map(|c| c.prod.clone()).collect();
        let mut t = 0;
        while level.len() > 1 {
            let mut next = Vec::new();
            for pair in level.chunks(2) {
                if let [a, b] = pair {
                    emit_qq_multiply(&mut bld, &qa, &mut rr, &mut dr, a, b);
                    next.push(std::mem::replace(&mut rr.acc, bld.alloc(&format!("qq{t}"), n, WireRole::Product)));
                    t += 1;
                } else {
                    next.push(pair[0].clone());
                }
            }
            level = next;
        }
        predicted += plan.qq_multiplies * qq_multiply_calls(n);
        adder_calls += rr.calls + dr.calls;
        let root = level.pop().unwrap_or_default();
        let body_end = bld.mark();
        let out = bld.alloc("out", n, WireRole::Product);
        for j in 0..n {
            bld.cnot(root[j], out[j]);
        }
        bld.undo_range(start, body_end);
        adder_calls *= 2;
        predicted *= 2;
        out
    };
    Ok(ModExpBuild {
        circuit: bld.finish(),
        exponent,
        output,
        plan,
        params: params.clone(),
        adder_calls,
        predicted_adder_calls: predicted,
        qq_adder: qq_kind,
    })
}

/// Runs the circuit on every exponent in `exps` and returns the output
/// values, or the first exponent whose ancillae were left dirty.
pub fn simulate(b: &ModExpBuild, exps: &[u64]) -> Result<std::result::Result<Vec<u64>, u64>> {
    use crate::sim::Lanes;
    let anc = b.ancillae();
    let mut out = Vec::with_capacity(exps.len());
    for chunk in exps.chunks(1024) {
        let mut st = Lanes::new(b.circuit.num_qubits(), chunk.len());
        for (l, &a) in chunk.iter().enumerate() {
            st.set(l, &b.exponent, a);
        }
        st.apply(&b.circuit)?;
        for (l, &a) in chunk.iter().enumerate() {
            if anc.chunks(64).any(|ch| st.get(l, ch) != 0) {
                return Ok(Err(a));
            }
            out.push(st.get(l, &b.output));
        }
    }
    Ok(Ok(out))
}

pub use modarith::build_qset;
