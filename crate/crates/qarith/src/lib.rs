//! Reversible arithmetic for quantum modular exponentiation.
//!
//! The crate builds adders, modular adders, multipliers and complete
//! exponentiation circuits; schedules them on two architecture models
//! (`Arch::Ac`, native Toffoli with free operand distance, and `Arch::Ntc`,
//! a line of qubits with two-qubit nearest-neighbour gates only); checks
//! them against classical oracles; and evaluates closed-form latency and
//! space models for whole algorithms.
//!
//! ```
//! use qarith::adders::{build_vbe_adder, AdderBlock};
//! use qarith::sched::schedule_asap;
//! use qarith::arch::Arch;
//!
//! let adder = build_vbe_adder(8, true).unwrap();
//! let depth = schedule_asap(&adder.circuit, &Arch::Ac).unwrap().depth();
//! assert_eq!(depth.ccnot, 21);
//! ```

pub mod adders;
pub mod arch;
pub mod cost;
pub mod ir;
pub mod modarith;
pub mod pipeline;
pub mod report;
pub mod sched;
pub mod sim;

pub use ir::{Builder, Circuit, CostVector, Gate, GateKind, WireRole};

/// Environment variable that overrides any seed given on the command line.
pub const SEED_ENV: &str = "QARITH_SEED";
pub const DEFAULT_SEED: u64 = 0x5eed_2005;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid gate: {0}")]
    Gate(String),
    #[error("parameter error: {0}")]
    Param(String),
    #[error("control overflow: {0} already has two controls")]
    ControlOverflow(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("missing parameter `{0}`")]
    MissingParam(String),
    #[error("empty domain")]
    EmptyDomain,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Seed resolution: the environment wins over the explicit value.
pub fn resolve_seed(explicit: Option<u64>) -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .or(explicit)
        .unwrap_or(DEFAULT_SEED)
}
