//! Checks that five controlled-root gates make a Toffoli, with dense 8x8
//! matrices.

use qarith::arch::decompose_ccnot_ntc;
use qarith::sim::run_unitary;
use qarith::Gate;

fn main() -> qarith::Result<()> {
    let ccnot = Gate::ccnot(0, 1, 2);
    let five = decompose_ccnot_ntc(&ccnot)?;
    for g in &five {
        println!("  {g}");
    }
    let d = run_unitary(&five, 3)?.distance_up_to_phase(&run_unitary(&[ccnot], 3)?);
    println!("max entry difference up to phase: {d:.2e}");
    assert!(d < 1e-12);
    Ok(())
}
