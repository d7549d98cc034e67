//! Carry-select (CSLA), carry-select with MUX (CSLAMU) and conditional-sum
//! (CSUM) adders.
//!
//! Bits are split into a ripple first group of `f` bits and `g-1` groups of
//! `m` bits. Each later group computes its sum twice, once per carry-in,
//! with two interleaved ripple chains. The clean forms then select with
//! CSWAPs, copy the selected sum out with CNOTs and reverse everything else.

use serde::Serialize;

use super::{AdderBlock, Style};
use crate::ir::{Builder, WireRole};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CslaParams {
    pub n: usize,
    pub m: usize,
    pub g: usize,
    pub f: usize,
    pub fanout: usize,
}

impl CslaParams {
    /// Full groups of `m`; the first group takes the remainder (1..=m bits).
    pub fn new(n: usize, m: usize) -> Result<CslaParams> {
        if m < 2 || n <= m {
            return Err(Error::Param(format!("need 2 <= m < n, got n={n} m={m}")));
        }
        let g = (n - 1) / m + 1;
        CslaParams::with(n, m, g, n - m * (g - 1), 4)
    }

    pub fn with(n: usize, m: usize, g: usize, f: usize, fanout: usize) -> Result<CslaParams> {
        let p = CslaParams { n, m, g, f, fanout };
        if m < 2 || g < 2 || f < 1 || fanout < 1 || f + m * (g - 1) != n {
            return Err(Error::Param(format!("invalid partition n={n} m={m} g={g} f={f} fanout={fanout}")));
        }
        Ok(p)
    }

    pub fn with_fanout(mut self, fanout: usize) -> Result<CslaParams> {
        self.fanout = fanout;
        CslaParams::with(self.n, self.m, self.g, self.f, fanout)
    }
}

/// One dual group: `k0`/`k1` hold the carries out of each bit for carry-in
/// 0 and 1, `s1` the carry-in-1 sum bits 1..m (bit 0 of that sum is the
/// complement of `b[lo]`).
#[derive(Clone, Debug)]
pub(crate) struct DualGroup {
    pub lo: usize,
    pub k0: Vec<usize>,
    pub k1: Vec<usize>,
    pub s1: Vec<usize>,
}

pub(crate) struct Front {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub first: Vec<usize>,
    pub groups: Vec<DualGroup>,
}

fn emit_front(bld: &mut Builder, p: &CslaParams) -> Front {
    let a = bld.alloc("a", p.n, WireRole::AddendA);
    let b = bld.alloc("b", p.n, WireRole::AddendB);
    let first = bld.alloc("k", p.f, WireRole::CarryInternal);
    let groups: Vec<DualGroup> = (1..p.g)
        .map(|j| DualGroup {
            lo: p.f + (j - 1) * p.m,
            k0: bld.alloc(&format!("k0_{j}"), p.m, WireRole::CarryInternal),
            k1: bld.alloc(&format!("k1_{j}"), p.m, WireRole::CarryInternal),
            s1: bld.alloc(&format!("s1_{j}"), p.m - 1, WireRole::Sum),
        })
        .collect();

    for i in 0..p.f {
        bld.ccnot(a[i], b[i], first[i]);
    }
    for i in 0..p.f {
        bld.cnot(a[i], b[i]);
    }
    for i in 1..p.f {
        bld.ccnot(first[i - 1], b[i], first[i]);
        bld.cnot(first[i - 1], b[i]);
    }

    for grp in &groups {
        let (aa, bb) = (&a[grp.lo..grp.lo + p.m], &b[grp.lo..grp.lo + p.m]);
        for i in 0..p.m {
            bld.ccnot(aa[i], bb[i], grp.k0[i]);
        }
        for i in 0..p.m {
            bld.cnot(aa[i], bb[i]);
            bld.cnot(grp.k0[i], grp.k1[i]);
        }
        bld.cnot(bb[0], grp.k1[0]);
        for i in 1..p.m {
            bld.cnot(bb[i], grp.s1[i - 1]);
        }
        for i in 1..p.m {
            bld.ccnot(grp.k0[i - 1], bb[i], grp.k0[i]);
            bld.ccnot(grp.k1[i - 1], grp.s1[i - 1], grp.k1[i]);
            bld.cnot(grp.k0[i - 1], bb[i]);
            bld.cnot(grp.k1[i - 1], grp.s1[i - 1]);
        }
    }
    Front { a, b, first, groups }
}

/// Dual sums only. After the block, `b` holds the carry-in-0 sums of every
/// group (the true sum for the first group) and each group's registers
/// hold the carry-in-1 variant.
pub fn build_csla(p: &CslaParams) -> Result<AdderBlock> {
    let p = CslaParams::with(p.n, p.m, p.g, p.f, p.fanout)?;
    let mut bld = Builder::new();
    let fr = emit_front(&mut bld, &p);
    let mut ancillae = fr.first.clone();
    for g in &fr.groups {
        ancillae.extend(&g.k0);
        ancillae.extend(&g.k1);
        ancillae.extend(&g.s1);
    }
    Ok(AdderBlock {
        name: format!("csla(n={},m={})", p.n, p.m),
        n: p.n,
        circuit: bld.finish(),
        style: Style::Raw,
        a: fr.a,
        sum: fr.b.clone(),
        b: fr.b,
        cout: None,
        ancillae,
        clean: false,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CarryNet {
    /// One CCNOT per group in sequence.
    Serial,
    /// Kogge-Stone prefix over group (generate, propagate) pairs.
    Prefix,
}

/// Carry into each dual group (index 0 is group 1) and the final carry.
fn emit_serial(bld: &mut Builder, fr: &Front) -> (Vec<usize>, usize) {
    let mut cin = vec![*fr.first.last().expect("f >= 1")];
    for grp in &fr.groups {
        let m = grp.k0.len();
        bld.ccnot(grp.k1[m - 1], *cin.last().expect("seeded"), grp.k0[m - 1]);
        cin.push(grp.k0[m - 1]);
    }
    let out = cin.pop().expect("seeded");
    (cin, out)
}

fn emit_prefix(bld: &mut Builder, fr: &Front) -> (Vec<usize>, usize) {
    let g = fr.groups.len() + 1;
    let mut gen: Vec<usize> = Vec::with_capacity(g);
    let mut prop: Vec<Option<usize>> = Vec::with_capacity(g);
    gen.push(*fr.first.last().expect("f >= 1"));
    prop.push(None);
    for grp in &fr.groups {
        let m = grp.k0.len();
        gen.push(grp.k0[m - 1]);
        prop.push(Some(grp.k1[m - 1]));
    }
    let mut d = 1;
    let mut level = 0;
    while d < g {
        let more = 2 * d < g;
        // On the last level the carries that are already final are copied
        // too, so no MUX starts while the prefix still runs and the copy
        // slots stay CNOT-only.
        let lo = if more { d } else { 0 };
        let new_g = bld.alloc(&format!("pg_{level}"), g - lo, WireRole::CarrySelect);
        // a missing propagate is identically zero
        let want_p: Vec<usize> =
            (d..g).filter(|&j| more && j > d && prop[j].is_some() && prop[j - d].is_some()).collect();
        let new_p = bld.alloc(&format!("pp_{level}"), want_p.len(), WireRole::CarrySelect);
        let copy_of: Vec<usize> = want_p.iter().map(|&j| j - d).collect();
        let tilde = bld.alloc(&format!("pt_{level}"), copy_of.len(), WireRole::CarrySelect);

        for j in lo..g {
            bld.cnot(gen[j], new_g[j - lo]);
        }
        for j in d..g {
            if let Some(pj) = prop[j] {
                bld.ccnot(pj, gen[j - d], new_g[j - lo]);
            }
        }
        for (t, &k) in tilde.iter().zip(&copy_of) {
            bld.cnot(prop[k].expect("filtered"), *t);
        }
        for ((&j, &np), &t) in want_p.iter().zip(&new_p).zip(&tilde) {
            bld.ccnot(prop[j].expect("filtered"), t, np);
        }
        let mut next_p = prop.clone();
        for j in lo..g {
            gen[j] = new_g[j - lo];
        }
        for p in next_p.iter_mut().skip(d) {
            *p = None;
        }
        for (&j, &np) in want_p.iter().zip(&new_p) {
            next_p[j] = Some(np);
        }
        prop = next_p;
        d *= 2;
        level += 1;
    }
    let out = gen[g - 1];
    gen.truncate(g - 1);
    (gen, out)
}

fn build_clean(p: &CslaParams, net: CarryNet, name: String) -> Result<AdderBlock> {
    let p = CslaParams::with(p.n, p.m, p.g, p.f, p.fanout)?;
    let mut bld = Builder::new();
    let start = bld.mark();
    let fr = emit_front(&mut bld, &p);
    for grp in &fr.groups {
        bld.cnot(grp.k0[p.m - 1], grp.k1[p.m - 1]);
    }
    let (cin, cout) = match net {
        CarryNet::Serial => emit_serial(&mut bld, &fr),
        CarryNet::Prefix => emit_prefix(&mut bld, &fr),
    };
    for (j, grp) in fr.groups.iter().enumerate() {
        let fan = bld.alloc(&format!("fan_{}", j + 1), p.fanout.min(p.m) - 1, WireRole::MuxEnable);
        let mut sel = vec![cin[j]];
        while sel.len() < fan.len() + 1 {
            let have = sel.len();
            for h in 0..have.min(fan.len() + 1 - have) {
                let q = fan[have + h - 1];
                bld.cnot(sel[h], q);
                sel.push(q);
            }
        }
        let bb = &fr.b[grp.lo..grp.lo + p.m];
        for i in 0..p.m {
            let s = sel[i % sel.len()];
            if i == 0 {
                bld.cnot(s, bb[0]);
            } else {
                bld.cswap(s, bb[i], grp.s1[i - 1]);
            }
        }
    }
    let body = bld.mark();
    let out = bld.alloc("s", p.n, WireRole::Sum);
    let top = bld.alloc1("top", WireRole::Sum);
    for i in 0..p.n {
        bld.cnot(fr.b[i], out[i]);
    }
    bld.cnot(cout, top);
    bld.undo_range(start, body);

    let circuit_nq = bld.num_qubits();
    let keep: Vec<usize> = fr.a.iter().chain(&fr.b).chain(&out).chain([&top]).copied().collect();
    let ancillae: Vec<usize> = (0..circuit_nq).filter(|q| !keep.contains(q)).collect();
    bld.set_clean(&ancillae);
    Ok(AdderBlock {
        name,
        n: p.n,
        circuit: bld.finish(),
        style: Style::OutOfPlace,
        a: fr.a,
        b: fr.b,
        sum: out,
        cout: Some(top),
        ancillae,
        clean: true,
    })
}

/// Carry-select with a serial carry MUX chain, copy-out and reversal.
pub fn build_cslamu(p: &CslaParams) -> Result<AdderBlock> {
    build_clean(p, CarryNet::Serial, format!("cslamu(n={},m={})", p.n, p.m))
}

/// Conditional-sum adder. With fewer than three groups the single-level
/// MUX is already optimal and the carry-select form is returned.
pub fn build_csum(n: usize, m: usize) -> Result<AdderBlock> {
    let p = CslaParams::new(n, m)?;
    if p.g < 3 {
        return build_cslamu(&p);
    }
    build_clean(&p, CarryNet::Prefix, format!("csum(n={n},m={m})"))
}
