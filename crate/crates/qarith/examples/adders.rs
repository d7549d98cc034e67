//! Builds every adder family, checks it exhaustively and prints its cost.

use qarith::adders::{build_adder, AdderKind};
use qarith::arch::Arch;
use qarith::sched::schedule_asap;
use qarith::sim::Domain;

fn main() -> qarith::Result<()> {
    let n = 8;
    println!("{:<8} {:>14} {:>12} {:>6}", "adder", "gates", "depth", "space");
    for kind in AdderKind::ALL {
        let blk = build_adder(kind, n, None)?;
        let report = blk.verify(&Domain::Exhaustive)?;
        assert!(report.pass, "{kind} failed");
        let depth = schedule_asap(&blk.circuit, &Arch::Ac)?.depth();
        println!("{:<8} {:>14} {:>12} {:>6}", kind.name(), blk.circuit.totals().to_string(), depth.to_string(), blk.circuit.space());
    }
    Ok(())
}
