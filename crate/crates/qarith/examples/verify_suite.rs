//! Runs the exhaustive battery, then again with one gate deleted from
//! every circuit.

use qarith::report::verify_suite;

fn main() -> qarith::Result<()> {
    let seed = qarith::resolve_seed(None);
    let r = verify_suite(5, false, seed)?;
    println!("{} circuits, pass = {}", r.circuits, r.pass);
    let m = verify_suite(5, true, seed)?;
    println!("mutated: {} of {} circuits caught", m.failed, m.circuits);
    Ok(())
}
