//! Out-of-place carry-lookahead adder (Draper, Kutin, Rains, Svore):
//! generate into the sum register, then P, G, C and inverse-P rounds over a
//! binary propagate tree.

use super::{check_width, AdderBlock, Style};
use crate::ir::{Builder, WireRole};
use crate::{Error, Result};

fn floor_log2(x: usize) -> usize {
    (usize::BITS - 1 - x.leading_zeros()) as usize
}

/// Registers: `a` (n), `b` (n, restored), `s` (n+1, the top bit is the
/// carry-out) and the propagate tree.
pub fn build_qcla(n: usize) -> Result<AdderBlock> {
    check_width(n, 2, "carry-lookahead adder")?;
    if !n.is_power_of_two() {
        return Err(Error::Param(format!("carry-lookahead adder needs a power-of-two width, got {n}")));
    }
    let lg = floor_log2(n);
    let mut bld = Builder::new();
    let a = bld.alloc("a", n, WireRole::AddendA);
    let b = bld.alloc("b", n, WireRole::AddendB);
    let s = bld.alloc("s", n + 1, WireRole::Sum);
    // tree[t][m] for 1 <= t < lg and 1 <= m < n / 2^t; tree[0] is b itself
    let mut tree: Vec<Vec<usize>> = vec![b.clone()];
    let mut ancillae = Vec::new();
    for t in 1..lg {
        let width = (n >> t) - 1;
        let reg = bld.alloc(&format!("p{t}"), width, WireRole::CarryInternal);
        ancillae.extend(&reg);
        let mut row = vec![usize::MAX];
        row.extend(reg);
        tree.push(row);
    }
    let pq = |t: usize, m: usize| tree[t][m];

    for i in 0..n {
        bld.ccnot(a[i], b[i], s[i + 1]);
    }
    for i in 0..n {
        bld.cnot(a[i], b[i]);
    }
    let p_start = bld.mark();
    for t in 1..lg {
        for m in 1..(n >> t) {
            bld.ccnot(pq(t - 1, 2 * m), pq(t - 1, 2 * m + 1), pq(t, m));
        }
    }
    let p_end = bld.mark();
    for t in 1..=lg {
        for m in 0..(n >> t) {
            bld.ccnot(s[(m << t) + (1 << (t - 1))], pq(t - 1, 2 * m + 1), s[(m << t) + (1 << t)]);
        }
    }
    let top = (1..=lg).rev().find(|&t| 3 * (1usize << t) <= 2 * n).unwrap_or(0);
    for t in (1..=top).rev() {
        for m in 1..=((n - (1 << (t - 1))) >> t) {
            bld.ccnot(s[m << t], pq(t - 1, 2 * m), s[(m << t) + (1 << (t - 1))]);
        }
    }
    bld.undo_range(p_start, p_end);
    for i in 0..n {
        bld.cnot(b[i], s[i]);
    }
    for i in 0..n {
        bld.cnot(a[i], b[i]);
    }
    bld.set_clean(&ancillae);
    Ok(AdderBlock {
        name: format!("qcla({n})"),
        n,
        circuit: bld.finish(),
        style: Style::OutOfPlace,
        a,
        b,
        sum: s[..n].to_vec(),
        cout: Some(s[n]),
        ancillae,
        clean: true,
    })
}
