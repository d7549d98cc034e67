//! Circuit representation: gates over global qubit indices, register
//! declarations with wire roles, and raw gate-class accounting.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum GateKind {
    #[serde(rename = "NOT")]
    Not,
    #[serde(rename = "CNOT")]
    Cnot,
    #[serde(rename = "CCNOT")]
    Ccnot,
    #[serde(rename = "CSWAP")]
    Cswap,
    #[serde(rename = "SWAP")]
    Swap,
    #[serde(rename = "SQRT_X")]
    SqrtX,
    #[serde(rename = "SQRT_X_DAG")]
    SqrtXDag,
}

impl GateKind {
    /// Allowed (controls, targets) arity. The square-root gates take zero or
    /// one control; the controlled form is what the NTC Toffoli uses.
    fn arity_ok(self, controls: usize, targets: usize) -> bool {
        match self {
            GateKind::Not => controls == 0 && targets == 1,
            GateKind::Cnot => controls == 1 && targets == 1,
            GateKind::Ccnot => controls == 2 && targets == 1,
            GateKind::Cswap => controls == 1 && targets == 2,
            GateKind::Swap => controls == 0 && targets == 2,
            GateKind::SqrtX | GateKind::SqrtXDag => controls <= 1 && targets == 1,
        }
    }

    pub fn adjoint(self) -> GateKind {
        match self {
            GateKind::SqrtX => GateKind::SqrtXDag,
            GateKind::SqrtXDag => GateKind::SqrtX,
            k => k,
        }
    }

    pub fn is_permutation(self) -> bool {
        !matches!(self, GateKind::SqrtX | GateKind::SqrtXDag)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub controls: Vec<usize>,
    pub targets: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, controls: Vec<usize>, targets: Vec<usize>) -> Result<Gate, Error> {
        let g = Gate { kind, controls, targets };
        g.validate()?;
        Ok(g)
    }

    pub fn not(t: usize) -> Gate {
        Gate { kind: GateKind::Not, controls: vec![], targets: vec![t] }
    }
    pub fn cnot(c: usize, t: usize) -> Gate {
        Gate { kind: GateKind::Cnot, controls: vec![c], targets: vec![t] }
    }
    pub fn ccnot(c1: usize, c2: usize, t: usize) -> Gate {
        Gate { kind: GateKind::Ccnot, controls: vec![c1, c2], targets: vec![t] }
    }
    pub fn cswap(c: usize, t1: usize, t2: usize) -> Gate {
        Gate { kind: GateKind::Cswap, controls: vec![c], targets: vec![t1, t2] }
    }
    pub fn swap(t1: usize, t2: usize) -> Gate {
        Gate { kind: GateKind::Swap, controls: vec![], targets: vec![t1, t2] }
    }
    /// Controlled square root of X (`c` may be absent).
    pub fn sqrt_x(c: Option<usize>, t: usize) -> Gate {
        Gate { kind: GateKind::SqrtX, controls: c.into_iter().collect(), targets: vec![t] }
    }
    pub fn sqrt_x_dag(c: Option<usize>, t: usize) -> Gate {
        Gate { kind: GateKind::SqrtXDag, controls: c.into_iter().collect(), targets: vec![t] }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !self.kind.arity_ok(self.controls.len(), self.targets.len()) {
            return Err(Error::Gate(format!(
                "{:?} with {} controls and {} targets",
                self.kind,
                self.controls.len(),
                self.targets.len()
            )));
        }
        let qs = self.qubits();
        for i in 0..qs.len() {
            if qs[i + 1..].contains(&qs[i]) {
                return Err(Error::Gate(format!("repeated operand {} in {:?}", qs[i], self.kind)));
            }
        }
        Ok(())
    }

    pub fn qubits(&self) -> Vec<usize> {
        let mut v = self.controls.clone();
        v.extend_from_slice(&self.targets);
        v
    }

    pub fn touches(&self, q: usize) -> bool {
        self.controls.contains(&q) || self.targets.contains(&q)
    }

    pub fn adjoint(&self) -> Gate {
        Gate { kind: self.kind.adjoint(), controls: self.controls.clone(), targets: self.targets.clone() }
    }

    pub fn remap(&self, map: &[usize]) -> Gate {
        Gate {
            kind: self.kind,
            controls: self.controls.iter().map(|&q| map[q]).collect(),
            targets: self.targets.iter().map(|&q| map[q]).collect(),
        }
    }

    /// Three-class cost of one gate, with SWAP and CSWAP expanded.
    pub fn cost(&self) -> CostVector {
        match self.kind {
            GateKind::Not => CostVector::new(0, 0, 1),
            GateKind::Ccnot => CostVector::new(1, 0, 0),
            GateKind::Cswap => CostVector::new(1, 2, 0),
            GateKind::Swap => CostVector::new(0, 3, 0),
            // controlled or not, the square-root gates take a CNOT time
            GateKind::Cnot | GateKind::SqrtX | GateKind::SqrtXDag => CostVector::new(0, 1, 0),
        }
    }

    /// Class of a gate for slot classification: 2 = CCNOT, 1 = CNOT, 0 = NOT.
    pub fn class(&self) -> u8 {
        match self.kind {
            GateKind::Ccnot | GateKind::Cswap => 2,
            GateKind::Not => 0,
            GateKind::SqrtX | GateKind::SqrtXDag if self.controls.is_empty() => 0,
            _ => 1,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}(", self.kind)?;
        for (i, q) in self.qubits().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, ")")
    }
}

/// `(CCNOTs; CNOTs; NOTs)`, as counts or as depth.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CostVector {
    pub ccnot: u64,
    pub cnot: u64,
    pub not: u64,
}

impl CostVector {
    pub const ZERO: CostVector = CostVector { ccnot: 0, cnot: 0, not: 0 };

    pub const fn new(ccnot: u64, cnot: u64, not: u64) -> Self {
        CostVector { ccnot, cnot, not }
    }

    pub fn total(&self) -> u64 {
        self.ccnot + self.cnot + self.not
    }

    pub fn le(&self, o: &CostVector) -> bool {
        self.ccnot <= o.ccnot && self.cnot <= o.cnot && self.not <= o.not
    }
}

impl Add for CostVector {
    type Output = CostVector;
    fn add(self, o: CostVector) -> CostVector {
        CostVector::new(self.ccnot + o.ccnot, self.cnot + o.cnot, self.not + o.not)
    }
}

impl AddAssign for CostVector {
    fn add_assign(&mut self, o: CostVector) {
        *self = *self + o;
    }
}

impl Mul<u64> for CostVector {
    type Output = CostVector;
    fn mul(self, k: u64) -> CostVector {
        CostVector::new(self.ccnot * k, self.cnot * k, self.not * k)
    }
}

impl fmt::Display for CostVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{};{})", self.ccnot, self.cnot, self.not)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireRole {
    AddendA,
    AddendB,
    Sum,
    CarryInternal,
    CarrySelect,
    MuxEnable,
    Ancilla,
    Exponent,
    Product,
    Scratch,
}

/// A contiguous block of qubits. Blocks are laid out in declaration order,
/// so qubit indices follow from the widths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterDecl {
    pub name: String,
    pub width: usize,
    pub role: WireRole,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub registers: Vec<RegisterDecl>,
    pub gates: Vec<Gate>,
    pub clean: Vec<usize>,
}

impl Circuit {
    pub fn num_qubits(&self) -> usize {
        self.registers.iter().map(|r| r.width).sum()
    }

    /// Qubit index ranges of each register, in declaration order.
    pub fn register_ranges(&self) -> Vec<(String, std::ops::Range<usize>)> {
        let mut at = 0;
        self.registers
            .iter()
            .map(|r| {
                let range = at..at + r.width;
                at += r.width;
                (r.name.clone(), range)
            })
            .collect()
    }

    pub fn register(&self, name: &str) -> Option<Vec<usize>> {
        self.register_ranges().into_iter().find(|(n, _)| n == name).map(|(_, r)| r.collect())
    }

    pub fn role_of(&self, q: usize) -> Option<WireRole> {
        let mut at = 0;
        for r in &self.registers {
            if q < at + r.width {
                return Some(r.role);
            }
            at += r.width;
        }
        None
    }

    pub fn validate(&self) -> Result<(), Error> {
        let nq = self.num_qubits();
        for g in &self.gates {
            g.validate()?;
            if let Some(q) = g.qubits().into_iter().find(|&q| q >= nq) {
                return Err(Error::Gate(format!("qubit {q} not allocated ({nq} qubits)")));
            }
        }
        if let Some(q) = self.clean.iter().find(|&&q| q >= nq) {
            return Err(Error::Gate(format!("clean qubit {q} not allocated")));
        }
        Ok(())
    }

    pub fn totals(&self) -> CostVector {
        self.gates.iter().fold(CostVector::ZERO, |acc, g| acc + g.cost())
    }

    /// Number of qubits; every allocated qubit counts, used or not.
    pub fn space(&self) -> usize {
        self.num_qubits()
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    /// Appends `other` after `self`. Both must declare the same registers.
    pub fn concat(&self, other: &Circuit) -> Result<Circuit, Error> {
        if self.registers != other.registers {
            return Err(Error::Param("concat needs identical register layouts".into()));
        }
        let mut out = self.clone();
        out.gates.extend(other.gates.iter().cloned());
        out.clean.retain(|q| other.clean.contains(q));
        Ok(out)
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            registers: self.registers.clone(),
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
            clean: self.clean.clone(),
        }
    }

    /// Adds `ctl` as one more control to every gate.
    pub fn controlled(&self, ctl: usize) -> Result<Circuit, Error> {
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            if g.touches(ctl) {
                return Err(Error::Param(format!("control {ctl} is an operand of {g}")));
            }
            let lifted = match g.kind {
                GateKind::Not => Gate::cnot(ctl, g.targets[0]),
                GateKind::Cnot => Gate::ccnot(ctl, g.controls[0], g.targets[0]),
                GateKind::Swap => Gate::cswap(ctl, g.targets[0], g.targets[1]),
                GateKind::SqrtX | GateKind::SqrtXDag if g.controls.is_empty() => {
                    Gate { kind: g.kind, controls: vec![ctl], targets: g.targets.clone() }
                }
                _ => return Err(Error::ControlOverflow(g.to_string())),
            };
            gates.push(lifted);
        }
        Ok(Circuit { registers: self.registers.clone(), gates, clean: self.clean.clone() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    pub fn from_json(s: &str) -> Result<Circuit, Error> {
        let c: Circuit = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }
}

/// Incremental construction with register allocation.
#[derive(Clone, Debug, Default)]
pub struct Builder {
    circuit: Circuit,
}

impl Builder {
    pub fn new() -> Self {
        Builder::default()
    }

    pub fn alloc(&mut self, name: &str, width: usize, role: WireRole) -> Vec<usize> {
        let start = self.circuit.num_qubits();
        self.circuit.registers.push(RegisterDecl { name: name.to_string(), width, role });
        (start..start + width).collect()
    }

    pub fn alloc1(&mut self, name: &str, role: WireRole) -> usize {
        self.alloc(name, 1, role)[0]
    }

    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    pub fn len(&self) -> usize {
        self.circuit.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circuit.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) {
        debug_assert!(g.validate().is_ok(), "bad gate {g}");
        self.circuit.gates.push(g);
    }

    pub fn not(&mut self, t: usize) {
        self.push(Gate::not(t));
    }
    pub fn cnot(&mut self, c: usize, t: usize) {
        self.push(Gate::cnot(c, t));
    }
    pub fn ccnot(&mut self, c1: usize, c2: usize, t: usize) {
        self.push(Gate::ccnot(c1, c2, t));
    }
    pub fn cswap(&mut self, c: usize, t1: usize, t2: usize) {
        self.push(Gate::cswap(c, t1, t2));
    }

    pub fn nots(&mut self, qs: &[usize]) {
        for &q in qs {
            self.not(q);
        }
    }

    /// Appends `block`, sending its qubit `i` to `map[i]`.
    pub fn splice(&mut self, block: &Circuit, map: &[usize]) {
        assert!(map.len() >= block.num_qubits(), "splice map too short");
        self.circuit.gates.extend(block.gates.iter().map(|g| g.remap(map)));
    }

    pub fn splice_inverse(&mut self, block: &Circuit, map: &[usize]) {
        assert!(map.len() >= block.num_qubits(), "splice map too short");
        self.circuit.gates.extend(block.gates.iter().rev().map(|g| g.adjoint().remap(map)));
    }

    /// Gates emitted since `mark`, for reversal.
    pub fn mark(&self) -> usize {
        self.circuit.gates.len()
    }

    /// Appends the adjoint of every gate emitted since `mark`, in reverse.
    pub fn undo_since(&mut self, mark: usize) {
        let tail: Vec<Gate> = self.circuit.gates[mark..].iter().rev().map(Gate::adjoint).collect();
        self.circuit.gates.extend(tail);
    }

    /// Appends the adjoint of gates `start..end`, in reverse.
    pub fn undo_range(&mut self, start: usize, end: usize) {
        let tail: Vec<Gate> = self.circuit.gates[start..end].iter().rev().map(Gate::adjoint).collect();
        self.circuit.gates.extend(tail);
    }

    pub fn gates_since(&self, mark: usize) -> &[Gate] {
        &self.circuit.gates[mark..]
    }

    pub fn set_clean(&mut self, qs: &[usize]) {
        self.circuit.clean.extend_from_slice(qs);
        self.circuit.clean.sort_unstable();
        self.circuit.clean.dedup();
    }

    pub fn finish(self) -> Circuit {
        self.circuit
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }
}
