//! Cuccaro-Draper-Kutin-Moulton ripple adder with one ancilla, in the
//! parallel form whose CCNOT depth is 2n-1.

use super::{check_width, AdderBlock, Style};
use crate::ir::{Builder, WireRole};
use crate::Result;

/// Registers: `c` (the single ancilla), `a` (n), `b` (n, becomes the sum)
/// and `z` (carry-out, XORed).
pub fn build_cuccaro_adder(n: usize) -> Result<AdderBlock> {
    check_width(n, 2, "Cuccaro adder")?;
    let mut bld = Builder::new();
    let c = bld.alloc1("c", WireRole::Ancilla);
    let a = bld.alloc("a", n, WireRole::AddendA);
    let b = bld.alloc("b", n, WireRole::Sum);
    let z = bld.alloc1("z", WireRole::CarryInternal);
    // carry chain runs through c, a[1], ..., a[n-2]
    let x = |i: usize| if i == 1 { c } else { a[i - 1] };

    for i in 1..n {
        bld.cnot(a[i], b[i]);
    }
    bld.cnot(a[1], c);
    for i in 2..n {
        bld.cnot(a[i], a[i - 1]);
    }
    bld.ccnot(a[0], b[0], c);
    for i in 1..n - 1 {
        bld.ccnot(x(i), b[i], a[i]);
    }
    bld.cnot(a[n - 1], z);
    bld.ccnot(x(n - 1), b[n - 1], z);
    for i in 1..n {
        bld.cnot(x(i), b[i]);
        if i < n - 1 {
            bld.not(b[i]);
        }
    }
    for i in (1..n - 1).rev() {
        bld.ccnot(x(i), b[i], a[i]);
        bld.not(b[i]);
    }
    bld.ccnot(a[0], b[0], c);
    for i in (1..n - 1).rev() {
        bld.cnot(a[i + 1], a[i]);
    }
    bld.cnot(a[1], c);
    for i in 1..n {
        bld.cnot(a[i], b[i]);
    }
    bld.cnot(a[0], b[0]);
    bld.set_clean(&[c]);
    Ok(AdderBlock {
        name: format!("cuccaro({n})"),
        n,
        circuit: bld.finish(),
        style: Style::InPlace,
        a,
        sum: b.clone(),
        b,
        cout: Some(z),
        ancillae: vec![c],
        clean: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::Arch;
    use crate::ir::CostVector;
    use crate::sched::schedule_asap;
    use crate::sim::Domain;

    #[test]
    fn totals() {
        for n in 2..16u64 {
            let blk = build_cuccaro_adder(n as usize).unwrap();
            assert_eq!(blk.circuit.totals(), CostVector::new(2 * n - 1, 5 * n - 3, 2 * n - 4));
            assert_eq!(blk.circuit.space(), 2 * n as usize + 2);
        }
    }

    #[test]
    fn ac_depth_tuple() {
        for n in 2..20u64 {
            let blk = build_cuccaro_adder(n as usize).unwrap();
            let d = schedule_asap(&blk.circuit, &Arch::Ac).unwrap().depth();
            assert_eq!(d.ccnot, 2 * n - 1);
            if n >= 3 {
                assert_eq!(d, CostVector::new(2 * n - 1, 5, 0), "n={n}");
            }
        }
    }

    #[test]
    fn exhaustive_four_bits() {
        let r = build_cuccaro_adder(4).unwrap().verify(&Domain::Exhaustive).unwrap();
        assert!(r.pass);
        assert_eq!(r.cases, 256);
    }
}
