//! Modular addition blocks: the VBE five-adder form, the three-adder form,
//! deferred reduction with `p` extra accumulator bits, controlled constant
//! loads (QSET) and the indirection argument setter.
//!
//! Constants enter the circuit through a zeroed addend register that is
//! loaded, used and unloaded. A load is a list of [`Term`]s; a term XORs a
//! constant into the register when all its controls are set.

use num_rational::Ratio;
use serde::Serialize;

use crate::adders::{AdderKind, InPlaceAdder};
use crate::ir::{Builder, Circuit, WireRole};
use crate::{Error, Result};

/// `value` is XORed into the target when every qubit in `ctl` is one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub ctl: Vec<usize>,
    pub value: u64,
}

impl Term {
    pub fn new(ctl: Vec<usize>, value: u64) -> Term {
        Term { ctl, value }
    }
}

/// XORs the terms into `target`. Up to two controls use NOT/CNOT/CCNOT
/// directly; a third control goes through the enable qubit `e`.
pub fn emit_terms(bld: &mut Builder, terms: &[Term], extra: Option<usize>, target: &[usize], e: usize) {
    for t in terms {
        if t.value == 0 {
            continue;
        }
        assert!(t.value >> target.len() == 0, "constant {} wider than {} bits", t.value, target.len());
        let mut ctl = t.ctl.clone();
        ctl.extend(extra);
        let bits: Vec<usize> = (0..target.len()).filter(|j| (t.value >> j) & 1 == 1).map(|j| target[j]).collect();
        match ctl.len() {
            0 => bld.nots(&bits),
            1 => bits.iter().for_each(|&q| bld.cnot(ctl[0], q)),
            2 => bits.iter().for_each(|&q| bld.ccnot(ctl[0], ctl[1], q)),
            3 => {
                bld.ccnot(ctl[0], ctl[1], e);
                bits.iter().for_each(|&q| bld.ccnot(e, ctl[2], q));
                bld.ccnot(ctl[0], ctl[1], e);
            }
            k => panic!("{k} controls on a constant load"),
        }
    }
}

/// Controlled (one CNOT per set bit) or plain (NOTs) register set.
pub fn build_qset(n: usize, value: u64, controlled: bool) -> Result<Circuit> {
    if n == 0 || n > 64 || value >> n != 0 {
        return Err(Error::Param(format!("value {value} does not fit {n} bits")));
    }
    let mut bld = Builder::new();
    let ctl = controlled.then(|| bld.alloc1("ctl", WireRole::MuxEnable));
    let t = bld.alloc("t", n, WireRole::Sum);
    let terms = [Term::new(ctl.into_iter().collect(), value)];
    emit_terms(&mut bld, &terms, None, &t, usize::MAX);
    Ok(bld.finish())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ModuloParams {
    pub p: usize,
    pub b: usize,
}

impl ModuloParams {
    /// The largest allowed `b`, `2^(p-1)`.
    pub fn new(p: usize) -> Result<ModuloParams> {
        if p == 0 || p > 32 {
            return Err(Error::Param(format!("p = {p} out of range 1..=32")));
        }
        Ok(ModuloParams { p, b: 1 << (p - 1) })
    }

    pub fn with_b(p: usize, b: usize) -> Result<ModuloParams> {
        let mp = ModuloParams::new(p)?;
        if b == 0 || b > mp.b {
            return Err(Error::Param(format!("b = {b} exceeds 2^(p-1) = {}", mp.b)));
        }
        Ok(ModuloParams { p, b })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModMode {
    /// Five adder calls per modular addition.
    Vbe,
    /// Three adder calls per modular addition.
    ThreeAdder,
    /// Plain additions into `n+p` bits with a reduction every `b` of them.
    Deferred(ModuloParams),
}

/// Reduction schedule for a chain of additions.
#[derive(Clone, Debug, Serialize)]
pub struct DeferredPlan {
    pub n: usize,
    pub additions: usize,
    pub p: usize,
    pub b: usize,
    /// Addition counts after which a reduction runs.
    pub reductions_after: Vec<usize>,
    /// `ceil(L(2b+1)/b)`: two calls per addition and one per reduction.
    pub chain_calls: usize,
    /// `3p` calls charged for the final correction.
    pub correction_calls: usize,
    /// Calls the correction in this crate actually makes.
    pub realized_correction_calls: usize,
    /// Five calls per addition.
    pub vbe_calls: usize,
}

pub fn deferred_modulo_plan(n: usize, additions: usize, p: usize) -> Result<DeferredPlan> {
    let mp = ModuloParams::new(p)?;
    let b = mp.b;
    let reductions_after: Vec<usize> = (1..=additions.div_ceil(b)).map(|k| (k * b).min(additions)).collect();
    let chain = Ratio::new(additions * (2 * b + 1), b).ceil().to_integer();
    Ok(DeferredPlan {
        n,
        additions,
        p,
        b,
        reductions_after,
        chain_calls: chain,
        correction_calls: 3 * p,
        realized_correction_calls: 2 * p,
        vbe_calls: 5 * additions,
    })
}

/// `n(2b+1)/b`, exact, and the whole number of calls scheduled for it.
pub fn r_m(n: usize, b: usize) -> (Ratio<u64>, u64) {
    let r = Ratio::new((n * (2 * b + 1)) as u64, b as u64);
    (r, r.ceil().to_integer())
}

/// Physical registers for one modular accumulator. Labels move when an
/// out-of-place adder relabels its result.
#[derive(Clone, Debug)]
pub struct ModRegs {
    pub acc: Vec<usize>,
    /// Addend register, width of the adder.
    pub t: Vec<usize>,
    /// Second constant register (VBE form) or unused.
    pub nreg: Vec<usize>,
    /// Overflow / high bit of the accumulator.
    pub o: usize,
    /// Second flag.
    pub z: usize,
    /// Enable qubit for three-control loads.
    pub e: usize,
    pub scratch: Vec<usize>,
    /// Garbage flags for deferred reduction (restored only by reversal).
    pub flags: Vec<usize>,
    pub calls: usize,
}

/// Modular arithmetic over one adder family for a fixed modulus.
#[derive(Clone, Debug)]
pub struct ModAdder {
    pub n: usize,
    pub modulus: u64,
    pub mode: ModMode,
    pub adder: InPlaceAdder,
}

pub(crate) fn check_modulus(n: usize, modulus: u64) -> Result<()> {
    if !(2..=62).contains(&n) {
        return Err(Error::Param(format!("n = {n} out of range 2..=62")));
    }
    if modulus.is_multiple_of(2) || modulus <= 1 << (n - 1) || modulus >= 1 << n {
        return Err(Error::Param(format!("modulus {modulus} must be odd with 2^{} < N < 2^{n}", n - 1)));
    }
    Ok(())
}

impl ModAdder {
    pub fn new(n: usize, modulus: u64, mode: ModMode, kind: AdderKind, m: Option<usize>) -> Result<ModAdder> {
        check_modulus(n, modulus)?;
        let width = match mode {
            ModMode::Deferred(mp) => n + mp.p,
            _ => n,
        };
        if width > 63 {
            return Err(Error::Param(format!("accumulator width {width} exceeds 63 bits")));
        }
        let adder = InPlaceAdder::of(kind, width, m)?;
        Ok(ModAdder { n, modulus, mode, adder })
    }

    pub fn width(&self) -> usize {
        self.adder.n()
    }

    /// Allocates the working registers; `flags` is the number of garbage
    /// flags the caller will need (deferred mode only).
    pub fn alloc(&self, bld: &mut Builder, tag: &str, flags: usize) -> ModRegs {
        let w = self.width();
        let acc = bld.alloc(&format!("{tag}acc"), w, WireRole::Product);
        let t = bld.alloc(&format!("{tag}addend"), w, WireRole::AddendA);
        let nreg = if self.mode == ModMode::Vbe { bld.alloc(&format!("{tag}nreg"), w, WireRole::AddendA) } else { vec![] };
        let o = bld.alloc1(&format!("{tag}o"), WireRole::CarryInternal);
        let z = bld.alloc1(&format!("{tag}z"), WireRole::CarryInternal);
        let e = bld.alloc1(&format!("{tag}e"), WireRole::MuxEnable);
        let scratch = bld.alloc(&format!("{tag}scratch"), self.adder.scratch_width(), WireRole::Ancilla);
        let flags = bld.alloc(&format!("{tag}flags"), flags, WireRole::Scratch);
        ModRegs { acc, t, nreg, o, z, e, scratch, flags, calls: 0 }
    }

    fn add(&self, bld: &mut Builder, r: &mut ModRegs, cout: usize) {
        let t = r.t.clone();
        self.adder.emit_add(bld, &t, &mut r.acc, cout, &mut r.scratch);
        r.calls += 1;
    }

    fn sub(&self, bld: &mut Builder, r: &mut ModRegs, cout: usize) {
        let t = r.t.clone();
        self.adder.emit_sub(bld, &t, &mut r.acc, cout, &mut r.scratch);
        r.calls += 1;
    }

    fn add_from(&self, bld: &mut Builder, r: &mut ModRegs, src: &[usize], cout: usize, sub: bool) {
        if sub {
            self.adder.emit_sub(bld, src, &mut r.acc, cout, &mut r.scratch);
        } else {
            self.adder.emit_add(bld, src, &mut r.acc, cout, &mut r.scratch);
        }
        r.calls += 1;
    }

    /// `acc = (acc + X) mod N` where `X` is the value of the one active term
    /// (or zero when none is active). `active` must be one exactly when some
    /// term fires; `None` means a term with no controls is present.
    pub fn emit_add_const(&self, bld: &mut Builder, r: &mut ModRegs, terms: &[Term], active: Option<usize>) {
        let n = self.n;
        let nn = self.modulus;
        let full = 1u64 << n;
        match self.mode {
            ModMode::ThreeAdder => {
                let t = r.t.clone();
                let (o, z, e) = (r.o, r.z, r.e);
                let step1: Vec<Term> = terms.iter().map(|x| Term::new(x.ctl.clone(), x.value + full - nn)).collect();
                emit_terms(bld, &step1, None, &t, e);
                self.add(bld, r, o);
                emit_terms(bld, &step1, None, &t, e);
                let base: Vec<Term> = terms.iter().map(|x| Term::new(x.ctl.clone(), nn - x.value)).collect();
                let flip: Vec<Term> =
                    terms.iter().map(|x| Term::new(x.ctl.clone(), ((full - x.value) % full) ^ (nn - x.value))).collect();
                emit_terms(bld, &base, None, &t, e);
                emit_terms(bld, &flip, Some(o), &t, e);
                self.add(bld, r, z);
                emit_terms(bld, &flip, Some(o), &t, e);
                emit_terms(bld, &base, None, &t, e);
                // the second carry is set exactly when active and not o
                bld.not(o);
                match active {
                    Some(a) => bld.ccnot(a, o, z),
                    None => bld.cnot(o, z),
                }
                bld.not(o);
                let last: Vec<Term> = terms.to_vec();
                emit_terms(bld, &last, None, &t, e);
                self.add(bld, r, o);
                emit_terms(bld, &last, None, &t, e);
            }
            ModMode::Vbe => {
                let t = r.t.clone();
                emit_terms(bld, terms, None, &t, r.e);
                self.emit_add_quantum(bld, r, &t);
                emit_terms(bld, terms, None, &t, r.e);
            }
            ModMode::Deferred(_) => panic!("deferred accumulation goes through emit_deferred"),
        }
    }

    /// Five-call modular addition of a quantum addend `x < N` (VBE form).
    /// Uses `nreg` for the modulus, `o` as the high bit and `z` as the
    /// underflow copy.
    pub fn emit_add_quantum(&self, bld: &mut Builder, r: &mut ModRegs, x: &[usize]) {
        assert!(!r.nreg.is_empty(), "VBE form needs the modulus register");
        let nn = self.modulus;
        let nreg = r.nreg.clone();
        let (h, flag, e) = (r.o, r.z, r.e);
        let load_n = [Term::new(vec![], nn)];
        self.add_from(bld, r, x, h, false);
        emit_terms(bld, &load_n, None, &nreg, e);
        self.add_from(bld, r, &nreg, h, true);
        bld.not(h);
        bld.cnot(h, flag);
        bld.not(h);
        let reset = [Term::new(vec![flag], nn)];
        emit_terms(bld, &reset, None, &nreg, e);
        self.add_from(bld, r, &nreg, h, false);
        emit_terms(bld, &reset, None, &nreg, e);
        emit_terms(bld, &load_n, None, &nreg, e);
        self.add_from(bld, r, x, h, true);
        bld.cnot(h, flag);
        self.add_from(bld, r, x, h, false);
    }

    /// Modular doubling of `acc` (VBE form registers). `o` must be zero and
    /// is used as the new low bit; on return the freed top qubit is in `o`.
    pub fn emit_double(&self, bld: &mut Builder, r: &mut ModRegs) {
        let n = self.n;
        let nn = self.modulus;
        let top = r.acc[n - 1];
        let mut low = vec![r.o];
        low.extend_from_slice(&r.acc[..n - 1]);
        r.acc = low;
        r.o = top;
        let nreg = r.nreg.clone();
        let (flag, e) = (r.z, r.e);
        let load_n = [Term::new(vec![], nn)];
        emit_terms(bld, &load_n, None, &nreg, e);
        self.add_from(bld, r, &nreg, top, true);
        emit_terms(bld, &load_n, None, &nreg, e);
        bld.cnot(top, flag);
        let cond = [Term::new(vec![flag], nn)];
        emit_terms(bld, &cond, None, &nreg, e);
        self.add_from(bld, r, &nreg, top, false);
        emit_terms(bld, &cond, None, &nreg, e);
        // the add-back happened exactly when the result is even
        bld.cnot(r.acc[0], flag);
        bld.not(flag);
    }

    /// Garbage flags used by [`ModAdder::emit_deferred`] for `additions`.
    pub fn deferred_flags(&self, additions: usize) -> usize {
        match self.mode {
            ModMode::Deferred(mp) => additions.div_ceil(mp.b) + mp.p,
            _ => 0,
        }
    }

    /// `acc` (n+p bits, starting below `2^(n+p-1)`) accumulates one value per
    /// entry of `additions`, reducing after every `b` of them, then corrects
    /// to the least residue. Flags are left as garbage.
    pub fn emit_deferred(&self, bld: &mut Builder, r: &mut ModRegs, additions: &[Vec<Term>]) {
        let ModMode::Deferred(mp) = self.mode else { panic!("not in deferred mode") };
        let w = self.width();
        let nn = self.modulus;
        let t = r.t.clone();
        let (zero, e) = (r.o, r.e);
        let k = (1u64 << (w - 1)) / nn;
        let mut flag = 0;
        for (i, terms) in additions.iter().enumerate() {
            emit_terms(bld, terms, None, &t, e);
            self.add(bld, r, zero);
            emit_terms(bld, terms, None, &t, e);
            if (i + 1) % mp.b == 0 || i + 1 == additions.len() {
                let f = r.flags[flag];
                flag += 1;
                bld.cnot(r.acc[w - 1], f);
                let red = [Term::new(vec![f], k * nn)];
                emit_terms(bld, &red, None, &t, e);
                self.sub(bld, r, zero);
                emit_terms(bld, &red, None, &t, e);
            }
        }
        let borrow = r.z;
        for j in (0..mp.p).rev() {
            let c = nn << j;
            let g = r.flags[flag];
            flag += 1;
            let plain = [Term::new(vec![], c)];
            emit_terms(bld, &plain, None, &t, e);
            self.sub(bld, r, borrow);
            emit_terms(bld, &plain, None, &t, e);
            bld.cnot(borrow, g);
            let back = [Term::new(vec![g], c)];
            emit_terms(bld, &back, None, &t, e);
            self.add(bld, r, borrow);
            emit_terms(bld, &back, None, &t, e);
        }
    }
}

/// A modular-addition circuit with its final register labels.
#[derive(Clone, Debug)]
pub struct ModAddBlock {
    pub circuit: Circuit,
    /// Where the result is after the block.
    pub acc: Vec<usize>,
    /// Where the input is loaded.
    pub input: Vec<usize>,
    pub adder_calls: usize,
    pub flags: Vec<usize>,
}

/// `|u⟩ → |(u + addend) mod N⟩` with three adder calls.
pub fn build_modadd_3adder(n: usize, modulus: u64, addend: u64) -> Result<ModAddBlock> {
    build_modadd_const(n, modulus, addend, ModMode::ThreeAdder, AdderKind::Cuccaro)
}

/// Constant modular addition in the three-adder or VBE form over any adder.
pub fn build_modadd_const(n: usize, modulus: u64, addend: u64, mode: ModMode, kind: AdderKind) -> Result<ModAddBlock> {
    if addend >= modulus {
        return Err(Error::Param(format!("addend {addend} must be below N = {modulus}")));
    }
    if matches!(mode, ModMode::Deferred(_)) {
        return Err(Error::Param("use build_deferred_accumulator for deferred reduction".into()));
    }
    let ma = ModAdder::new(n, modulus, mode, kind, None)?;
    let mut bld = Builder::new();
    let mut r = ma.alloc(&mut bld, "", 0);
    let input = r.acc.clone();
    if addend != 0 {
        ma.emit_add_const(&mut bld, &mut r, &[Term::new(vec![], addend)], None);
    }
    let all: Vec<usize> = (0..bld.num_qubits()).filter(|q| !r.acc.contains(q) && !input.contains(q)).collect();
    bld.set_clean(&all);
    Ok(ModAddBlock { circuit: bld.finish(), acc: r.acc, input, adder_calls: r.calls, flags: vec![] })
}

/// A deferred accumulator: `acc = (sum of addends) mod N` from zero.
/// `stop_after` truncates after that many additions (and the reduction
/// that follows, if any) and skips the final correction.
pub fn build_deferred_accumulator(
    n: usize,
    modulus: u64,
    p: usize,
    addends: &[u64],
    kind: AdderKind,
    stop_after: Option<usize>,
) -> Result<ModAddBlock> {
    if let Some(x) = addends.iter().find(|&&x| x >= modulus) {
        return Err(Error::Param(format!("addend {x} must be below N = {modulus}")));
    }
    let mp = ModuloParams::new(p)?;
    let ma = ModAdder::new(n, modulus, ModMode::Deferred(mp), kind, None)?;
    let mut bld = Builder::new();
    let mut r = ma.alloc(&mut bld, "", ma.deferred_flags(addends.len()));
    let input = r.acc.clone();
    let adds: Vec<Vec<Term>> = addends.iter().map(|&x| vec![Term::new(vec![], x)]).collect();
    match stop_after {
        None => ma.emit_deferred(&mut bld, &mut r, &adds),
        Some(k) => {
            // the same additions and reductions, no final correction
            let partial = ModAdder { mode: ModMode::Deferred(ModuloParams { p: 0, b: mp.b }), ..ma.clone() };
            partial.emit_deferred(&mut bld, &mut r, &adds[..k.min(adds.len())]);
        }
    }
    let flags = r.flags.clone();
    Ok(ModAddBlock { circuit: bld.finish(), acc: r.acc, input, adder_calls: r.calls, flags })
}

/// Loads `table[window]` into the addend register.
#[derive(Clone, Debug)]
pub struct ArgSetter {
    pub circuit: Circuit,
    pub window: Vec<usize>,
    pub addend: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgMode {
    /// Multi-controlled NOTs straight onto the addend bits.
    #[default]
    Direct,
    /// One computed enable per table entry, then CNOTs.
    Enable,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndirectionParams {
    pub w: usize,
    pub table: Vec<u64>,
}

impl IndirectionParams {
    /// `table[v] = x^(v * 2^shift) mod N` for `v < 2^w`.
    pub fn powers(x: u64, modulus: u64, w: usize, shift: usize) -> Result<IndirectionParams> {
        if !(1..=4).contains(&w) {
            return Err(Error::Param(format!("window width {w} outside 1..=4")));
        }
        let base = crate::sim::oracle::modexp(x, 1u64 << shift.min(63), modulus);
        let base = if shift >= 63 {
            (0..shift - 63).fold(base, |b, _| crate::sim::oracle::mul_mod(modulus, b, b))
        } else {
            base
        };
        let mut table = vec![1 % modulus];
        for v in 1..1usize << w {
            table.push(crate::sim::oracle::mul_mod(modulus, table[v - 1], base));
        }
        Ok(IndirectionParams { w, table })
    }
}

/// Computes `AND(literals)` into `target` using the `anc` chain, where a
/// literal is a qubit and the value it must have.
fn emit_and(bld: &mut Builder, lits: &[usize], target: usize, anc: &[usize]) {
    match lits.len() {
        0 => bld.not(target),
        1 => bld.cnot(lits[0], target),
        2 => bld.ccnot(lits[0], lits[1], target),
        k => {
            bld.ccnot(lits[0], lits[1], anc[0]);
            for i in 2..k - 1 {
                bld.ccnot(anc[i - 2], lits[i], anc[i - 1]);
            }
            bld.ccnot(anc[k - 3], lits[k - 1], target);
            for i in (2..k - 1).rev() {
                bld.ccnot(anc[i - 2], lits[i], anc[i - 1]);
            }
            bld.ccnot(lits[0], lits[1], anc[0]);
        }
    }
}

/// One-hot decode of `window` into `dec` (`dec[v]` is one iff the window
/// holds `v`).
pub fn emit_decode(bld: &mut Builder, window: &[usize], dec: &[usize], anc: &[usize]) {
    let w = window.len();
    for v in 0..1usize << w {
        let zeros: Vec<usize> = (0..w).filter(|i| (v >> i) & 1 == 0).map(|i| window[i]).collect();
        bld.nots(&zeros);
        emit_and(bld, window, dec[v], anc);
        bld.nots(&zeros);
    }
}

/// Sets the `n`-bit addend register to `table[window]`.
pub fn build_arg_setter(w: usize, table: &[u64], n: usize) -> Result<ArgSetter> {
    build_arg_setter_with(w, table, n, ArgMode::Direct)
}

pub fn build_arg_setter_with(w: usize, table: &[u64], n: usize, mode: ArgMode) -> Result<ArgSetter> {
    if !(2..=4).contains(&w) {
        return Err(Error::Param(format!("window width {w} outside 2..=4")));
    }
    if table.len() != 1 << w {
        return Err(Error::Param(format!("table has {} entries, expected {}", table.len(), 1 << w)));
    }
    if let Some(v) = table.iter().find(|&&v| n < 64 && v >> n != 0) {
        return Err(Error::Param(format!("table entry {v} wider than {n} bits")));
    }
    let mut bld = Builder::new();
    let window = bld.alloc("window", w, WireRole::Exponent);
    let addend = bld.alloc("addend", n, WireRole::AddendA);
    let anc = bld.alloc("enable_tree", w.saturating_sub(1), WireRole::MuxEnable);
    // Gray order from the all-ones window: one NOT layer between entries
    let all = (1usize << w) - 1;
    let mut flipped = 0usize;
    for i in 0..1usize << w {
        let v = all ^ (i ^ (i >> 1));
        let val = table[v];
        if val == 0 {
            continue;
        }
        let want = all & !v;
        let diff: Vec<usize> = (0..w).filter(|b| ((want ^ flipped) >> b) & 1 == 1).map(|b| window[b]).collect();
        bld.nots(&diff);
        flipped = want;
        let bits: Vec<usize> = (0..n).filter(|j| (val >> j) & 1 == 1).map(|j| addend[j]).collect();
        match mode {
            ArgMode::Enable => {
                let e = anc[w - 2];
                emit_and(&mut bld, &window, e, &anc[..w - 2]);
                bits.iter().for_each(|&q| bld.cnot(e, q));
                emit_and(&mut bld, &window, e, &anc[..w - 2]);
            }
            ArgMode::Direct => {
                if w == 2 {
                    bits.iter().for_each(|&q| bld.ccnot(window[0], window[1], q));
                } else {
                    let e = anc[w - 3];
                    emit_and(&mut bld, &window[..w - 1], e, &anc[..w - 3]);
                    bits.iter().for_each(|&q| bld.ccnot(e, window[w - 1], q));
                    emit_and(&mut bld, &window[..w - 1], e, &anc[..w - 3]);
                }
            }
        }
    }
    let restore: Vec<usize> = (0..w).filter(|b| (flipped >> b) & 1 == 1).map(|b| window[b]).collect();
    bld.nots(&restore);
    bld.set_clean(&anc);
    Ok(ArgSetter { circuit: bld.finish(), window, addend })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{oracle, BasisState, Lanes};

    fn run_mod(blk: &ModAddBlock, n: usize, modulus: u64) -> Vec<u64> {
        let c = &blk.circuit;
        let mut st = Lanes::new(c.num_qubits(), modulus as usize);
        for u in 0..modulus {
            st.set(u as usize, &blk.input, u);
        }
        st.apply(c).unwrap();
        let others: Vec<usize> = (0..c.num_qubits()).filter(|q| !blk.acc.contains(q) && !blk.flags.contains(q)).collect();
        (0..modulus as usize)
            .map(|l| {
                for ch in others.chunks(64) {
                    assert_eq!(st.get(l, ch), 0, "ancilla dirty n={n}");
                }
                st.get(l, &blk.acc)
            })
            .collect()
    }

    #[test]
    fn three_adder_example() {
        let blk = build_modadd_3adder(4, 11, 7).unwrap();
        assert_eq!(blk.adder_calls, 3);
        let out = run_mod(&blk, 4, 11);
        assert_eq!(out[9], 5);
        for u in 0..11 {
            assert_eq!(out[u as usize], oracle::add_mod(11, u, 7));
        }
    }

    #[test]
    fn modadd_forms_every_family() {
        for kind in [AdderKind::Vbe, AdderKind::Cuccaro, AdderKind::Csla, AdderKind::Csum, AdderKind::Qcla] {
            for mode in [ModMode::ThreeAdder, ModMode::Vbe] {
                let (n, modulus) = if kind == AdderKind::Qcla { (4, 13) } else { (5, 27) };
                for x in [1, 6, modulus - 1] {
                    let blk = build_modadd_const(n, modulus, x, mode, kind).unwrap();
                    let out = run_mod(&blk, n, modulus);
                    for u in 0..modulus {
                        assert_eq!(out[u as usize], oracle::add_mod(modulus, u, x), "{kind} {mode:?} x={x} u={u}");
                    }
                }
            }
        }
    }

    #[test]
    fn zero_addend_is_empty() {
        let blk = build_modadd_3adder(4, 11, 0).unwrap();
        assert!(blk.circuit.gates.is_empty());
        assert!(build_modadd_3adder(4, 11, 11).is_err());
    }

    #[test]
    fn deferred_plan_counts() {
        let plan = deferred_modulo_plan(128, 4, 3).unwrap();
        assert_eq!(plan.chain_calls, 9);
        assert_eq!(plan.vbe_calls, 20);
        assert_eq!(plan.reductions_after, vec![4]);
        let (r, c) = r_m(128, 1024);
        assert_eq!(r, Ratio::new(262_272, 1024));
        assert_eq!(c, 257);
    }

    #[test]
    fn deferred_chain_reaches_residue() {
        let addends = [12, 7, 9, 3, 11, 5];
        let blk = build_deferred_accumulator(4, 13, 2, &addends, AdderKind::Cuccaro, None).unwrap();
        let st = crate::sim::run_permutation(&blk.circuit, &BasisState::zeros(blk.circuit.num_qubits())).unwrap();
        assert_eq!(st.get(&blk.acc), addends.iter().sum::<u64>() % 13);
    }

    #[test]
    fn qset_bits() {
        let c = build_qset(4, 5, false).unwrap();
        assert_eq!(c.gates.len(), 2);
        assert!(build_qset(4, 0, true).unwrap().gates.is_empty());
    }

    #[test]
    fn arg_setter_lookup() {
        let ip = IndirectionParams::powers(2, 13, 2, 0).unwrap();
        assert_eq!(ip.table, vec![1, 2, 4, 8]);
        for mode in [ArgMode::Direct, ArgMode::Enable] {
            let s = build_arg_setter_with(2, &ip.table, 4, mode).unwrap();
            for v in 0..4u64 {
                let mut st = BasisState::zeros(s.circuit.num_qubits());
                st.set(&s.window, v);
                let out = crate::sim::run_permutation(&s.circuit, &st).unwrap();
                assert_eq!(out.get(&s.addend), ip.table[v as usize]);
            }
        }
        assert!(build_arg_setter(1, &[1, 2], 4).is_err());
    }
}
