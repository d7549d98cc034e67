//! Adds a constant modulo N with three adder calls and with five, on a few
//! adder families.

use qarith::adders::AdderKind;
use qarith::modarith::{build_modadd_const, ModMode};
use qarith::sim::{oracle, run_permutation, BasisState};

fn main() -> qarith::Result<()> {
    let (n, modulus, addend) = (5, 27, 19);
    for kind in [AdderKind::Cuccaro, AdderKind::Vbe, AdderKind::Csum] {
        for mode in [ModMode::ThreeAdder, ModMode::Vbe] {
            let blk = build_modadd_const(n, modulus, addend, mode, kind)?;
            for u in 0..modulus {
                let mut st = BasisState::zeros(blk.circuit.num_qubits());
                st.set(&blk.input, u);
                let out = run_permutation(&blk.circuit, &st)?;
                assert_eq!(out.get(&blk.acc), oracle::add_mod(modulus, u, addend));
            }
            println!("{kind:<8} {mode:?}: {} adder calls, {} gates", blk.adder_calls, blk.circuit.totals());
        }
    }
    Ok(())
}
