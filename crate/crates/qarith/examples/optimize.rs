//! Searches parameters under a space budget and sweeps the problem size.

use qarith::cost::{optimize, sweep, Algo, ArchKind, SweepSpec, SweepVar};

fn main() -> qarith::Result<()> {
    let best = optimize(Algo::D, ArchKind::Ac, 32, 100 * 32)?;
    println!("D at 32 bits, 100n qubits: {} with {:?}, {} qubits", best.latency, best.params, best.space);

    let spec = SweepSpec { algo: Algo::E, arch: ArchKind::Ac, var: SweepVar::N, range: vec![8, 16, 32, 64], fixed: 100 };
    for row in sweep(&spec)? {
        println!("E n={:<3} {} s={} w={} p={}", row.x, row.eval.latency, row.eval.params.s, row.eval.params.w, row.eval.params.p);
    }
    Ok(())
}
