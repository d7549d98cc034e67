//! Adder builders and the uniform in-place interface the modular blocks
//! use.
//!
//! Two block styles exist. In-place blocks (VBE, Cuccaro) map
//! `|a, b, c⟩ → |a, a+b mod 2^n, c ⊕ carry⟩`. Out-of-place blocks
//! (carry-select, conditional-sum, carry-lookahead) map
//! `|a, b, 0, 0⟩ → |a, b, a+b mod 2^n, carry⟩`. [`InPlaceAdder`] turns the
//! second kind into the first with two block calls and a register relabel.

mod cuccaro;
mod qcla;
mod select;
mod vbe;

use serde::Serialize;

pub use cuccaro::build_cuccaro_adder;
pub use qcla::build_qcla;
pub use select::{build_csla, build_cslamu, build_csum, CslaParams};
pub use vbe::{build_vbe_adder, route_vbe_ntc, vbe_line_order};

use crate::ir::{Builder, Circuit};
use crate::sim::{self, Domain, IoSpec, VerifyReport};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Style {
    InPlace,
    OutOfPlace,
    /// Carry-select front end only: dual sums per group, nothing selected.
    Raw,
}

#[derive(Clone, Debug)]
pub struct AdderBlock {
    pub name: String,
    pub n: usize,
    pub circuit: Circuit,
    pub style: Style,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// Equal to `b` for in-place blocks.
    pub sum: Vec<usize>,
    pub cout: Option<usize>,
    pub ancillae: Vec<usize>,
    pub clean: bool,
}

impl AdderBlock {
    /// Exhaustive or sampled check of the block's contract. Ancillae must
    /// come back to zero; for out-of-place blocks `b` must be unchanged.
    pub fn verify(&self, domain: &Domain) -> Result<VerifyReport> {
        if self.style == Style::Raw {
            return Err(Error::Unsupported("raw carry-select blocks have no single-sum contract".into()));
        }
        let n = self.n;
        let mask = (1u64 << n) - 1;
        let mut io = IoSpec {
            inputs: vec![("a".into(), self.a.clone()), ("b".into(), self.b.clone())],
            outputs: vec![("a".into(), self.a.clone()), ("sum".into(), self.sum.clone())],
        };
        if self.style == Style::OutOfPlace {
            io.outputs.push(("b".into(), self.b.clone()));
        }
        if let Some(c) = self.cout {
            io.outputs.push(("cout".into(), vec![c]));
        }
        let chunks: Vec<Vec<usize>> = self.ancillae.chunks(64).map(<[usize]>::to_vec).collect();
        for (i, ch) in chunks.iter().enumerate() {
            io.outputs.push((format!("ancillae{i}"), ch.clone()));
        }
        let style = self.style;
        let has_cout = self.cout.is_some();
        let nchunks = chunks.len();
        let oracle = move |inp: &[u64]| {
            let (a, b) = (inp[0], inp[1]);
            let s = sim::oracle::add(a, b);
            let mut out = vec![a, s & mask];
            if style == Style::OutOfPlace {
                out.push(b);
            }
            if has_cout {
                out.push(s >> n);
            }
            out.extend(std::iter::repeat_n(0, nchunks));
            Some(out)
        };
        sim::verify(&self.name, &self.circuit, &io, "add", &oracle, domain)
    }

    /// Exhaustive check of a routed copy of this block with the sparse
    /// engine, reading each wire at its line position.
    pub fn verify_routed(&self, routed: &crate::arch::Routed) -> Result<bool> {
        if self.style == Style::Raw || self.n > 8 {
            return Err(Error::Unsupported(format!("routed check of {}", self.name)));
        }
        let n = self.n;
        let at_in = |q: usize| routed.initial.position(q);
        let at_out = |q: usize| routed.final_order.position(q);
        for a in 0..1u64 << n {
            for b in 0..1u64 << n {
                let mut k: u128 = 0;
                for i in 0..n {
                    k |= u128::from((a >> i) & 1) << at_in(self.a[i]);
                    k |= u128::from((b >> i) & 1) << at_in(self.b[i]);
                }
                let st = sim::run_sparse(&routed.circuit, k)?;
                let Some(out) = sim::sparse_as_basis(&st) else { return Ok(false) };
                let read = |qs: &[usize]| qs.iter().enumerate().fold(0u64, |v, (i, &q)| v | (((out >> at_out(q)) & 1) as u64) << i);
                let s = a + b;
                let ok = read(&self.sum) == s & ((1 << n) - 1)
                    && read(&self.a) == a
                    && self.cout.is_none_or(|c| read(&[c]) == s >> n)
                    && read(&self.ancillae) == 0
                    && (self.style == Style::InPlace || read(&self.b) == b);
                if !ok {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Registry names accepted by the CLI and pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AdderKind {
    Vbe,
    Cuccaro,
    /// Carry-select with the MUX and cleanup, i.e. the clean form.
    Csla,
    Csum,
    Qcla,
}

impl AdderKind {
    pub const ALL: [AdderKind; 5] = [AdderKind::Vbe, AdderKind::Cuccaro, AdderKind::Csla, AdderKind::Csum, AdderKind::Qcla];

    pub fn name(self) -> &'static str {
        match self {
            AdderKind::Vbe => "vbe",
            AdderKind::Cuccaro => "cuccaro",
            AdderKind::Csla => "csla",
            AdderKind::Csum => "csum",
            AdderKind::Qcla => "qcla",
        }
    }

    /// Group size used when the caller gives none.
    pub fn default_m(self, n: usize) -> usize {
        match self {
            AdderKind::Csla => (((8 * n) as f64 / 5.0).sqrt().round() as usize).clamp(2, n.saturating_sub(1).max(2)),
            AdderKind::Csum => 4.min(n.saturating_sub(1)).max(2),
            _ => 0,
        }
    }
}

impl std::str::FromStr for AdderKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<AdderKind> {
        AdderKind::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown adder `{s}` (expected vbe, cuccaro, csla, csum or qcla)")))
    }
}

impl std::fmt::Display for AdderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Builds the clean adder of the given family. `m` is the group size for
/// the carry-select families.
pub fn build_adder(kind: AdderKind, n: usize, m: Option<usize>) -> Result<AdderBlock> {
    match kind {
        AdderKind::Vbe => build_vbe_adder(n, true),
        AdderKind::Cuccaro => build_cuccaro_adder(n),
        AdderKind::Csla => build_cslamu(&CslaParams::new(n, m.unwrap_or_else(|| kind.default_m(n)))?),
        AdderKind::Csum => build_csum(n, m.unwrap_or_else(|| kind.default_m(n))),
        AdderKind::Qcla => build_qcla(n),
    }
}

/// A clean adder used as `b += a` inside larger circuits.
#[derive(Clone, Debug)]
pub struct InPlaceAdder {
    pub block: AdderBlock,
}

impl InPlaceAdder {
    pub fn new(block: AdderBlock) -> Result<InPlaceAdder> {
        if !block.clean || block.style == Style::Raw || block.cout.is_none() {
            return Err(Error::Param(format!("{} cannot serve as an in-place adder", block.name)));
        }
        Ok(InPlaceAdder { block })
    }

    pub fn of(kind: AdderKind, n: usize, m: Option<usize>) -> Result<InPlaceAdder> {
        InPlaceAdder::new(build_adder(kind, n, m)?)
    }

    pub fn n(&self) -> usize {
        self.block.n
    }

    /// Block calls per addition.
    pub fn calls(&self) -> usize {
        match self.block.style {
            Style::InPlace => 1,
            _ => 2,
        }
    }

    /// Zeroed qubits the caller provides: the block ancillae, plus a spare
    /// n-bit register and a top-bit qubit for out-of-place blocks.
    pub fn scratch_width(&self) -> usize {
        match self.block.style {
            Style::InPlace => self.block.ancillae.len(),
            _ => self.block.ancillae.len() + self.n() + 1,
        }
    }

    fn map(&self, a: &[usize], b: &[usize], t: &[usize], top: usize, cout_or_top: usize, anc: &[usize]) -> Vec<usize> {
        let blk = &self.block;
        let mut map = vec![usize::MAX; blk.circuit.num_qubits()];
        for (i, &q) in blk.a.iter().enumerate() {
            map[q] = a[i];
        }
        for (i, &q) in blk.b.iter().enumerate() {
            map[q] = b[i];
        }
        if blk.style == Style::OutOfPlace {
            for (i, &q) in blk.sum.iter().enumerate() {
                map[q] = t[i];
            }
            map[blk.cout.expect("checked")] = top;
        } else {
            map[blk.cout.expect("checked")] = cout_or_top;
        }
        for (i, &q) in blk.ancillae.iter().enumerate() {
            map[q] = anc[i];
        }
        debug_assert!(map.iter().all(|&q| q != usize::MAX));
        map
    }

    /// Emits `b += a (mod 2^n)`, `cout ^= carry`. For out-of-place blocks
    /// the result lands in the spare register and the vectors `b` and the
    /// first `n` entries of `scratch` trade places; no gates move data.
    pub fn emit_add(&self, bld: &mut Builder, a: &[usize], b: &mut Vec<usize>, cout: usize, scratch: &mut [usize]) {
        let n = self.n();
        assert_eq!(a.len(), n, "addend width");
        assert_eq!(b.len(), n, "accumulator width");
        assert!(scratch.len() >= self.scratch_width(), "scratch too small");
        match self.block.style {
            Style::InPlace => {
                let map = self.map(a, b, &[], 0, cout, scratch);
                bld.splice(&self.block.circuit, &map);
            }
            _ => {
                let (t, rest) = scratch.split_at_mut(n);
                let top = rest[0];
                let anc = &rest[1..];
                let map = self.map(a, b, t, top, 0, anc);
                bld.splice(&self.block.circuit, &map);
                bld.cnot(top, cout);
                // b = s - a, found as the sum a + ~s whose low bits are ~b
                // and whose carry equals the first carry.
                bld.nots(t);
                bld.nots(b);
                let map2 = self.map(a, t, b, top, 0, anc);
                bld.splice_inverse(&self.block.circuit, &map2);
                bld.nots(t);
                t.swap_with_slice(b);
            }
        }
    }

    /// `b -= a (mod 2^n)`, `cout ^= borrow` where borrow is `[a > b]`.
    pub fn emit_sub(&self, bld: &mut Builder, a: &[usize], b: &mut Vec<usize>, cout: usize, scratch: &mut [usize]) {
        bld.nots(b);
        self.emit_add(bld, a, b, cout, scratch);
        bld.nots(b);
    }
}

fn check_width(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min {
        return Err(Error::Param(format!("{what} needs n >= {min}, got {n}")));
    }
    if n > 4096 {
        return Err(Error::Param(format!("{what}: n = {n} is beyond the supported range")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::WireRole;
    use crate::sim::Lanes;

    fn check_in_place(kind: AdderKind, n: usize, sub: bool) {
        let add = InPlaceAdder::of(kind, n, None).unwrap();
        let mut bld = Builder::new();
        let a = bld.alloc("a", n, WireRole::AddendA);
        let mut b = bld.alloc("b", n, WireRole::AddendB);
        let c = bld.alloc1("c", WireRole::CarryInternal);
        let mut sc = bld.alloc("sc", add.scratch_width(), WireRole::Ancilla);
        let b0 = b.clone();
        if sub {
            add.emit_sub(&mut bld, &a, &mut b, c, &mut sc);
        } else {
            add.emit_add(&mut bld, &a, &mut b, c, &mut sc);
        }
        let circ = bld.finish();
        let total = 1usize << (2 * n + 1);
        let mut st = Lanes::new(circ.num_qubits(), total);
        for k in 0..total {
            st.set(k, &a, (k & ((1 << n) - 1)) as u64);
            st.set(k, &b0, ((k >> n) & ((1 << n) - 1)) as u64);
            st.set(k, &[c], (k >> (2 * n)) as u64);
        }
        st.apply(&circ).unwrap();
        let mask = (1u64 << n) - 1;
        for k in 0..total {
            let (x, y, z) = ((k as u64) & mask, ((k >> n) as u64) & mask, (k >> (2 * n)) as u64);
            let (want, flag) = if sub { (y.wrapping_sub(x) & mask, (x > y) as u64) } else { ((x + y) & mask, (x + y) >> n) };
            assert_eq!(st.get(k, &b), want, "{kind} n={n} a={x} b={y}");
            assert_eq!(st.get(k, &[c]), z ^ flag);
            assert_eq!(st.get(k, &a), x);
            assert_eq!(st.get(k, &sc), 0);
        }
    }

    #[test]
    fn in_place_interface_every_family() {
        for kind in AdderKind::ALL {
            let n = if kind == AdderKind::Qcla { 4 } else { 5 };
            check_in_place(kind, n, false);
            check_in_place(kind, n, true);
        }
    }

    #[test]
    fn registry_names_round_trip() {
        for kind in AdderKind::ALL {
            assert_eq!(kind.name().parse::<AdderKind>().unwrap(), kind);
        }
        assert!("ripple".parse::<AdderKind>().is_err());
    }
}
