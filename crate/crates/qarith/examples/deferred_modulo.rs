//! Deferred reduction: extra accumulator bits let several additions run
//! before a modular correction.

use qarith::adders::AdderKind;
use qarith::modarith::{build_deferred_accumulator, deferred_modulo_plan};
use qarith::sim::{run_permutation, BasisState};

fn main() -> qarith::Result<()> {
    let plan = deferred_modulo_plan(128, 4, 3)?;
    println!(
        "4 additions, p = {}, b = {}: {} adder calls against {} for VBE modular adds",
        plan.p, plan.b, plan.chain_calls, plan.vbe_calls
    );

    let addends = [12, 7, 9, 3, 11, 5, 8];
    let blk = build_deferred_accumulator(4, 13, 2, &addends, AdderKind::Cuccaro, None)?;
    let out = run_permutation(&blk.circuit, &BasisState::zeros(blk.circuit.num_qubits()))?;
    println!("sum mod 13 = {} ({} adder calls)", out.get(&blk.acc), blk.adder_calls);
    assert_eq!(out.get(&blk.acc), addends.iter().sum::<u64>() % 13);
    Ok(())
}
