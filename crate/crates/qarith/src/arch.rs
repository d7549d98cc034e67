//! Architecture models, Toffoli decomposition for the line architecture,
//! and SWAP-inserting routers.

use serde::{Deserialize, Serialize};

use crate::ir::{Circuit, Gate, GateKind, RegisterDecl, WireRole};
use crate::{Error, Result};

/// `Ac`: native Toffoli, any operand distance, unlimited concurrency.
/// `Ntc`: qubits on a line, one- and two-qubit gates between neighbours.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arch {
    Ac,
    Ntc(LineOrder),
}

impl Arch {
    pub fn ntc_identity(nq: usize) -> Arch {
        Arch::Ntc(LineOrder::identity(nq))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Arch::Ac => "ac",
            Arch::Ntc(_) => "ntc",
        }
    }

    pub fn is_legal(&self, g: &Gate) -> bool {
        match self {
            Arch::Ac => true,
            Arch::Ntc(order) => {
                let qs = g.qubits();
                match qs.len() {
                    1 => true,
                    2 => order.distance(qs[0], qs[1]) == 1,
                    _ => false,
                }
            }
        }
    }

    /// Gates that violate the architecture, by index.
    pub fn violations(&self, c: &Circuit) -> Vec<usize> {
        c.gates.iter().enumerate().filter(|(_, g)| !self.is_legal(g)).map(|(i, _)| i).collect()
    }
}

/// `order[p]` is the qubit at line position `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineOrder {
    pub order: Vec<usize>,
    #[serde(skip)]
    pos: Vec<usize>,
}

impl LineOrder {
    pub fn new(order: Vec<usize>) -> Result<LineOrder> {
        let mut pos = vec![usize::MAX; order.len()];
        for (p, &q) in order.iter().enumerate() {
            if q >= order.len() || pos[q] != usize::MAX {
                return Err(Error::Param(format!("line order is not a permutation at position {p}")));
            }
            pos[q] = p;
        }
        Ok(LineOrder { order, pos })
    }

    pub fn identity(nq: usize) -> LineOrder {
        LineOrder::new((0..nq).collect()).expect("identity is a permutation")
    }

    pub fn position(&self, q: usize) -> usize {
        if self.pos.len() == self.order.len() {
            self.pos[q]
        } else {
            self.order.iter().position(|&x| x == q).expect("qubit on the line")
        }
    }

    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.position(a).abs_diff(self.position(b))
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// The five two-qubit gates that make a Toffoli out of controlled square
/// roots of X: `CV(c2,t) CNOT(c1,c2) CV†(c2,t) CNOT(c1,c2) CV(c1,t)`.
pub fn decompose_ccnot_ntc(g: &Gate) -> Result<Vec<Gate>> {
    if g.kind != GateKind::Ccnot {
        return Err(Error::Param(format!("expected CCNOT, got {g}")));
    }
    let (c1, c2, t) = (g.controls[0], g.controls[1], g.targets[0]);
    Ok(vec![
        Gate::sqrt_x(Some(c2), t),
        Gate::cnot(c1, c2),
        Gate::sqrt_x_dag(Some(c2), t),
        Gate::cnot(c1, c2),
        Gate::sqrt_x(Some(c1), t),
    ])
}

/// CSWAP as CNOT-Toffoli-CNOT.
pub fn expand_cswap(g: &Gate) -> Vec<Gate> {
    let (c, x, y) = (g.controls[0], g.targets[0], g.targets[1]);
    vec![Gate::cnot(y, x), Gate::ccnot(c, x, y), Gate::cnot(y, x)]
}

/// Replaces every CSWAP by its Toffoli form.
pub fn expand_cswaps(c: &Circuit) -> Circuit {
    let mut out = c.clone();
    out.gates = c
        .gates
        .iter()
        .flat_map(|g| if g.kind == GateKind::Cswap { expand_cswap(g) } else { vec![g.clone()] })
        .collect();
    out
}

/// Lowers a circuit to one- and two-qubit gates.
pub fn decompose_for_ntc(c: &Circuit) -> Circuit {
    let mut out = c.clone();
    out.gates.clear();
    for g in &expand_cswaps(c).gates {
        match g.kind {
            GateKind::Ccnot => out.gates.extend(decompose_ccnot_ntc(g).expect("is a CCNOT")),
            _ => out.gates.push(g.clone()),
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RouteStrategy {
    /// Bring operands together, apply the gate, put them back.
    #[default]
    Restore,
    /// Leave operands where the last gate moved them.
    Sliding,
}

/// A circuit whose wires are line positions. Qubit `q` enters at position
/// `initial.position(q)` and leaves at `final_order.position(q)`.
#[derive(Clone, Debug)]
pub struct Routed {
    pub circuit: Circuit,
    pub initial: LineOrder,
    pub final_order: LineOrder,
    pub swaps: usize,
}

struct Line {
    at: Vec<usize>,
    pos: Vec<usize>,
    last: Vec<i64>,
    gates: Vec<Gate>,
    swaps: usize,
}

impl Line {
    fn new(order: &LineOrder) -> Line {
        let n = order.len();
        let mut pos = vec![0; n];
        for (p, &q) in order.order.iter().enumerate() {
            pos[q] = p;
        }
        Line { at: order.order.clone(), pos, last: vec![-1; n], gates: Vec::new(), swaps: 0 }
    }

    fn emit_pos(&mut self, g: Gate) {
        let slot = g.qubits().iter().map(|&p| self.last[p]).max().unwrap_or(-1) + 1;
        for p in g.qubits() {
            self.last[p] = slot;
        }
        self.gates.push(g);
    }

    fn swap_adjacent(&mut self, p: usize) {
        let (q1, q2) = (self.at[p], self.at[p + 1]);
        self.emit_pos(Gate::swap(p, p + 1));
        self.at.swap(p, p + 1);
        self.pos[q1] = p + 1;
        self.pos[q2] = p;
        self.swaps += 1;
    }

    /// Walks `mv` next to `other`; returns the swaps performed (as positions).
    fn bring(&mut self, mv: usize, other: usize) -> Vec<usize> {
        let mut done = Vec::new();
        while self.pos[mv].abs_diff(self.pos[other]) > 1 {
            let p = self.pos[mv];
            let s = if p < self.pos[other] { p } else { p - 1 };
            self.swap_adjacent(s);
            done.push(s);
        }
        done
    }

    fn apply_logical(&mut self, g: &Gate) {
        let mapped = Gate {
            kind: g.kind,
            controls: g.controls.iter().map(|&q| self.pos[q]).collect(),
            targets: g.targets.iter().map(|&q| self.pos[q]).collect(),
        };
        self.emit_pos(mapped);
    }

    fn ready(&self, qs: &[usize]) -> i64 {
        qs.iter().map(|&q| self.last[self.pos[q]]).max().unwrap_or(-1)
    }

    fn snapshot(&self) -> Line {
        Line {
            at: self.at.clone(),
            pos: self.pos.clone(),
            last: self.last.clone(),
            gates: Vec::new(),
            swaps: self.swaps,
        }
    }
}

/// Which operand walks toward the other.
#[derive(Clone, Copy, Debug)]
enum Mover {
    First,
    Second,
    Idle,
}

fn route_two(line: &mut Line, g: &Gate, mover: Mover, restore: bool) {
    let qs = g.qubits();
    if qs.len() < 2 {
        line.apply_logical(g);
        return;
    }
    let (a, b) = (qs[0], qs[1]);
    let mv = match mover {
        Mover::First => a,
        Mover::Second => b,
        Mover::Idle => {
            if line.last[line.pos[a]] <= line.last[line.pos[b]] {
                a
            } else {
                b
            }
        }
    };
    let other = if mv == a { b } else { a };
    let path = line.bring(mv, other);
    line.apply_logical(g);
    if restore {
        for &s in path.iter().rev() {
            line.swap_adjacent(s);
        }
    }
}

/// Inserts SWAPs so every two-qubit gate acts on neighbours. The input must
/// already be lowered to one- and two-qubit gates.
pub fn route_ntc(c: &Circuit, order: &LineOrder, strategy: RouteStrategy) -> Result<Routed> {
    if order.len() != c.num_qubits() {
        return Err(Error::Param(format!(
            "line order has {} positions for {} qubits",
            order.len(),
            c.num_qubits()
        )));
    }
    if let Some(g) = c.gates.iter().find(|g| g.qubits().len() > 2) {
        return Err(Error::Param(format!("{g} must be decomposed before routing")));
    }
    let mut line = Line::new(order);
    for g in &c.gates {
        match strategy {
            RouteStrategy::Restore => route_two(&mut line, g, Mover::First, true),
            RouteStrategy::Sliding => {
                let mut best: Option<(i64, usize, Mover)> = None;
                for mover in [Mover::First, Mover::Second, Mover::Idle] {
                    let mut trial = line.snapshot();
                    route_two(&mut trial, g, mover, false);
                    let key = (trial.ready(&g.qubits()), trial.gates.len());
                    if best.is_none_or(|(k, n, _)| (key.0, key.1) < (k, n)) {
                        best = Some((key.0, key.1, mover));
                    }
                }
                route_two(&mut line, g, best.expect("three candidates").2, false);
            }
        }
    }
    finish_routed(c, order, line)
}

/// Routes a circuit that still contains Toffolis, choosing per Toffoli the
/// control ordering of the five-gate form and the operand to move so the
/// Toffoli's qubits are free earliest. Sliding layout.
pub fn route_ntc_greedy(c: &Circuit, order: &LineOrder) -> Result<Routed> {
    if order.len() != c.num_qubits() {
        return Err(Error::Param("line order size mismatch".into()));
    }
    let c = expand_cswaps(c);
    let mut line = Line::new(order);
    let movers = [Mover::First, Mover::Second, Mover::Idle];
    for g in &c.gates {
        let parts: Vec<Vec<Gate>> = match g.kind {
            GateKind::Ccnot => {
                let flipped = Gate::ccnot(g.controls[1], g.controls[0], g.targets[0]);
                vec![decompose_ccnot_ntc(g)?, decompose_ccnot_ntc(&flipped)?]
            }
            _ => vec![vec![g.clone()]],
        };
        let qs = g.qubits();
        let mut best: Option<((i64, usize), usize, usize)> = None;
        for (pi, part) in parts.iter().enumerate() {
            for (mi, &mover) in movers.iter().enumerate() {
                let mut trial = line.snapshot();
                for h in part {
                    route_two(&mut trial, h, mover, false);
                }
                let key = (trial.ready(&qs), trial.gates.len());
                if best.is_none_or(|(k, _, _)| key < k) {
                    best = Some((key, pi, mi));
                }
            }
        }
        let (_, pi, mi) = best.expect("at least one candidate");
        for h in &parts[pi] {
            route_two(&mut line, h, movers[mi], false);
        }
    }
    finish_routed(&c, order, line)
}

fn finish_routed(c: &Circuit, order: &LineOrder, line: Line) -> Result<Routed> {
    let nq = c.num_qubits();
    let circuit = Circuit {
        registers: vec![RegisterDecl { name: "line".into(), width: nq, role: WireRole::Scratch }],
        gates: line.gates,
        clean: Vec::new(),
    };
    Ok(Routed { circuit, initial: order.clone(), final_order: LineOrder::new(line.at)?, swaps: line.swaps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::Builder;

    #[test]
    fn adjacent_cnot_is_unchanged() {
        let mut b = Builder::new();
        let q = b.alloc("q", 3, WireRole::Scratch);
        b.cnot(q[0], q[1]);
        let c = b.finish();
        let r = route_ntc(&c, &LineOrder::identity(3), RouteStrategy::Restore).unwrap();
        assert_eq!(r.circuit.gates, c.gates);
        assert_eq!(r.swaps, 0);
    }

    #[test]
    fn distance_two_cnot_swaps_there_and_back() {
        let mut b = Builder::new();
        let q = b.alloc("q", 3, WireRole::Scratch);
        b.cnot(q[0], q[2]);
        let c = b.finish();
        let r = route_ntc(&c, &LineOrder::identity(3), RouteStrategy::Restore).unwrap();
        assert_eq!(r.swaps, 2);
        assert_eq!(r.circuit.gates, vec![Gate::swap(0, 1), Gate::cnot(1, 2), Gate::swap(0, 1)]);
        assert_eq!(r.final_order, r.initial);
    }

    #[test]
    fn toffoli_becomes_five_two_qubit_gates() {
        let parts = decompose_ccnot_ntc(&Gate::ccnot(0, 1, 2)).unwrap();
        assert_eq!(parts.len(), 5);
        assert!(parts.iter().all(|g| g.qubits().len() == 2));
    }

    #[test]
    fn bad_line_order_rejected() {
        assert!(LineOrder::new(vec![0, 0, 1]).is_err());
    }
}
