//! ASAP schedule of the Cuccaro adder: depth by gate class and how many
//! gates run in each slot.

use qarith::adders::build_cuccaro_adder;
use qarith::arch::Arch;
use qarith::sched::{longest_path, schedule_asap};

fn main() -> qarith::Result<()> {
    let blk = build_cuccaro_adder(6)?;
    let s = schedule_asap(&blk.circuit, &Arch::Ac)?;
    s.check()?;
    println!("depth {} over {} slots (longest path {})", s.depth(), s.num_slots(), longest_path(&blk.circuit));
    println!("gates per slot: {:?}", s.concurrency_profile());
    println!("{}", s.to_json());
    Ok(())
}
