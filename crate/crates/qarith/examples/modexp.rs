//! Builds x^a mod N for every algorithm and runs it on all exponents.

use qarith::cost::Algo;
use qarith::pipeline::{build_modexp, simulate, AlgoParams};
use qarith::sim::oracle;

fn main() -> qarith::Result<()> {
    let (n, modulus, x) = (5, 21, 5);
    for algo in Algo::ALL {
        let b = build_modexp(&AlgoParams::preset(algo, n, modulus, x)?)?;
        let exps: Vec<u64> = (0..1u64 << b.exponent.len()).collect();
        let got = simulate(&b, &exps)?.map_err(|a| qarith::Error::Param(format!("dirty ancillae at a = {a}")))?;
        assert!(exps.iter().zip(&got).all(|(&a, &y)| y == oracle::modexp(x, a, modulus)));
        println!(
            "{algo:<4} s={:<2} w={} {:>4} qubits {:>7} gates, {} adder calls (plan {})",
            b.params.s,
            b.params.w,
            b.circuit.num_qubits(),
            b.circuit.gates.len(),
            b.adder_calls,
            b.predicted_adder_calls
        );
    }
    Ok(())
}
