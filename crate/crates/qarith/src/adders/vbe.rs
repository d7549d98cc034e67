//! Carry-ripple adder of Vedral, Barenco and Ekert with the carry-in known
//! to be zero.

use super::{check_width, AdderBlock, Style};
use crate::arch::{route_ntc_greedy, LineOrder, Routed};
use crate::ir::{Builder, WireRole};
use crate::Result;

/// Registers: `a` (n), `b` (n+1, the top bit is the carry-out) and `c`
/// (n carries; `c[0]` is the zero carry-in and stays idle).
///
/// The plain order is the textbook CARRY/SUM sequence. The concurrent order
/// issues every first-stage CCNOT and CNOT up front so the ripple starts at
/// once.
pub fn build_vbe_adder(n: usize, concurrent: bool) -> Result<AdderBlock> {
    check_width(n, 2, "VBE adder")?;
    let mut bld = Builder::new();
    let a = bld.alloc("a", n, WireRole::AddendA);
    let b = bld.alloc("b", n + 1, WireRole::Sum);
    let c = bld.alloc("c", n, WireRole::CarryInternal);
    let cc = |i: usize| if i == n { b[n] } else { c[i] };

    if concurrent {
        for i in 0..n {
            bld.ccnot(a[i], b[i], cc(i + 1));
        }
        for i in 0..n {
            bld.cnot(a[i], b[i]);
        }
        for i in 1..n {
            bld.ccnot(c[i], b[i], cc(i + 1));
        }
        bld.cnot(c[n - 1], b[n - 1]);
        for i in (0..n - 1).rev() {
            if i > 0 {
                bld.ccnot(c[i], b[i], cc(i + 1));
            }
            bld.cnot(a[i], b[i]);
            bld.ccnot(a[i], b[i], cc(i + 1));
            if i > 0 {
                bld.cnot(c[i], b[i]);
            }
            bld.cnot(a[i], b[i]);
        }
    } else {
        for i in 0..n {
            bld.ccnot(a[i], b[i], cc(i + 1));
            bld.cnot(a[i], b[i]);
            if i > 0 {
                bld.ccnot(c[i], b[i], cc(i + 1));
            }
        }
        bld.cnot(c[n - 1], b[n - 1]);
        for i in (0..n - 1).rev() {
            if i > 0 {
                bld.ccnot(c[i], b[i], cc(i + 1));
            }
            bld.cnot(a[i], b[i]);
            bld.ccnot(a[i], b[i], cc(i + 1));
            bld.cnot(a[i], b[i]);
            if i > 0 {
                bld.cnot(c[i], b[i]);
            }
        }
    }
    bld.set_clean(&c);
    let name = if concurrent { "vbe-concurrent" } else { "vbe" };
    Ok(AdderBlock {
        name: format!("{name}({n})"),
        n,
        circuit: bld.finish(),
        style: Style::InPlace,
        a,
        sum: b[..n].to_vec(),
        b: b[..n].to_vec(),
        cout: Some(b[n]),
        ancillae: c,
        clean: true,
    })
}

/// Line layout for the line architecture: per bit the carry, then `a_i,
/// b_i` on even bits and `b_i, a_i` on odd bits, then the carry-out.
pub fn vbe_line_order(blk: &AdderBlock) -> Result<LineOrder> {
    let mut order = Vec::with_capacity(blk.circuit.num_qubits());
    for i in 0..blk.n {
        order.push(blk.ancillae[i]);
        if i % 2 == 0 {
            order.extend([blk.a[i], blk.b[i]]);
        } else {
            order.extend([blk.b[i], blk.a[i]]);
        }
    }
    order.extend(blk.cout);
    LineOrder::new(order)
}

/// The concurrent adder lowered to neighbour-only two-qubit gates.
pub fn route_vbe_ntc(n: usize) -> Result<(AdderBlock, Routed)> {
    let blk = build_vbe_adder(n, true)?;
    let routed = route_ntc_greedy(&blk.circuit, &vbe_line_order(&blk)?)?;
    Ok((blk, routed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::Arch;
    use crate::ir::CostVector;
    use crate::sched::{longest_path, schedule_asap};
    use crate::sim::Domain;

    #[test]
    fn totals_match_closed_form() {
        for n in 2..20u64 {
            for conc in [false, true] {
                let blk = build_vbe_adder(n as usize, conc).unwrap();
                assert_eq!(blk.circuit.totals(), CostVector::new(4 * n - 4, 4 * n - 3, 0));
                assert_eq!(blk.circuit.space(), 3 * n as usize + 1);
            }
        }
    }

    #[test]
    fn three_bit_example() {
        let blk = build_vbe_adder(3, true).unwrap();
        let r = blk.verify(&Domain::Exhaustive).unwrap();
        assert!(r.pass);
        assert_eq!(r.cases, 64);
    }

    #[test]
    fn concurrent_depth_and_longest_path_agree() {
        for n in 2..12 {
            let blk = build_vbe_adder(n, true).unwrap();
            let s = schedule_asap(&blk.circuit, &Arch::Ac).unwrap();
            assert_eq!(s.num_slots(), longest_path(&blk.circuit));
        }
    }

    #[test]
    fn rejects_width_one() {
        assert!(build_vbe_adder(1, false).is_err());
    }

    #[test]
    fn routed_three_bits() {
        let (blk, r) = route_vbe_ntc(3).unwrap();
        assert!(Arch::ntc_identity(r.circuit.num_qubits()).violations(&r.circuit).is_empty());
        assert!(schedule_asap(&r.circuit, &Arch::ntc_identity(10)).unwrap().num_slots() <= 45);
        assert!(blk.verify_routed(&r).unwrap());
    }
}
