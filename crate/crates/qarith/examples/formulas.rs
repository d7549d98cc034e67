//! Evaluates closed-form latency and space expressions by name.

use qarith::cost::{eval, Params};

fn main() -> qarith::Result<()> {
    let p: Params = [("n", 128), ("m", 4), ("s", 12), ("w", 2), ("p", 11), ("b", 1024)].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    for name in ["t_ADD", "t_V_AC", "t_V_NTC", "t_CSUM_AC", "t_LA_AC", "R_I", "R_M", "t_D", "S_D", "S_VBE"] {
        println!("{name:<10} {}", serde_json::to_string(&eval(name, &p)?).unwrap());
    }
    Ok(())
}
