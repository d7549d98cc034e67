//! The concurrent VBE adder on a line of qubits: Toffolis become five
//! two-qubit gates and SWAPs bring operands together.

use qarith::report::line_adder_table;

fn main() -> qarith::Result<()> {
    println!("{:>3} {:>6} {:>7} {:>5} {:>6} {:>9}", "n", "slots", "20n-15", "gap", "swaps", "verified");
    for r in line_adder_table(&(3..=10).collect::<Vec<_>>())? {
        let v = r.verified.map_or("-".to_string(), |b| b.to_string());
        println!("{:>3} {:>6} {:>7} {:>5} {:>6} {:>9}", r.n, r.slots, r.target, r.gap, r.swaps, v);
    }
    Ok(())
}
