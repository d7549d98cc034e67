//! Time-slot scheduling. A qubit takes part in at most one gate per slot,
//! and gates sharing a qubit keep their program order.

use serde::Serialize;

use crate::arch::Arch;
use crate::ir::{Circuit, CostVector};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct ScheduledCircuit {
    pub circuit: Circuit,
    /// Slot of each gate, indexed like `circuit.gates`.
    pub slot_of: Vec<usize>,
    pub slots: Vec<Vec<usize>>,
}

#[derive(Serialize)]
struct ScheduleJson<'a> {
    slots: &'a [Vec<usize>],
}

impl ScheduledCircuit {
    fn from_slots(circuit: Circuit, slot_of: Vec<usize>) -> ScheduledCircuit {
        let len = slot_of.iter().map(|s| s + 1).max().unwrap_or(0);
        let mut slots = vec![Vec::new(); len];
        for (i, &s) in slot_of.iter().enumerate() {
            slots[s].push(i);
        }
        ScheduledCircuit { circuit, slot_of, slots }
    }

    pub fn num_slots(&self) -> usize {
        self.slots.len()
    }

    /// Slots classified by the heaviest gate in them.
    pub fn depth(&self) -> CostVector {
        let mut d = CostVector::ZERO;
        for slot in &self.slots {
            match slot.iter().map(|&i| self.circuit.gates[i].class()).max() {
                Some(2) => d.ccnot += 1,
                Some(1) => d.cnot += 1,
                Some(_) => d.not += 1,
                None => {}
            }
        }
        d
    }

    pub fn concurrency_profile(&self) -> Vec<usize> {
        self.slots.iter().map(Vec::len).collect()
    }

    pub fn max_concurrency(&self) -> usize {
        self.slots.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ScheduleJson { slots: &self.slots }).expect("schedule serializes")
    }

    /// Checks the two scheduling rules; returns the first broken one.
    pub fn check(&self) -> Result<()> {
        let nq = self.circuit.num_qubits();
        let mut last: Vec<Option<usize>> = vec![None; nq];
        for (i, g) in self.circuit.gates.iter().enumerate() {
            let s = self.slot_of[i];
            for q in g.qubits() {
                if let Some(prev) = last[q] {
                    if prev >= s {
                        return Err(Error::Param(format!("gate {i} shares qubit {q} with an earlier gate in slot {prev}")));
                    }
                }
                last[q] = Some(s);
            }
        }
        Ok(())
    }
}

/// Earliest-slot assignment in program order.
pub fn schedule_asap(c: &Circuit, arch: &Arch) -> Result<ScheduledCircuit> {
    if let Some(&i) = arch.violations(c).first() {
        return Err(Error::Param(format!("gate {i} ({}) is not legal on {}", c.gates[i], arch.name())));
    }
    Ok(asap_unchecked(c))
}

pub(crate) fn asap_unchecked(c: &Circuit) -> ScheduledCircuit {
    let mut ready = vec![0usize; c.num_qubits()];
    let mut slot_of = Vec::with_capacity(c.gates.len());
    for g in &c.gates {
        let qs = g.qubits();
        let s = qs.iter().map(|&q| ready[q]).max().unwrap_or(0);
        for &q in &qs {
            ready[q] = s + 1;
        }
        slot_of.push(s);
    }
    ScheduledCircuit::from_slots(c.clone(), slot_of)
}

/// List scheduling with at most `cap` gates per slot. Gates are taken in
/// program order among those whose qubit predecessors are all placed.
pub fn schedule_capped(c: &Circuit, arch: &Arch, cap: usize) -> Result<ScheduledCircuit> {
    if cap == 0 {
        return Err(Error::Param("concurrency cap must be positive".into()));
    }
    if let Some(&i) = arch.violations(c).first() {
        return Err(Error::Param(format!("gate {i} is not legal on {}", arch.name())));
    }
    let n = c.gates.len();
    let nq = c.num_qubits();
    // predecessor count per gate through shared qubits (immediate only)
    let mut last_on: Vec<Option<usize>> = vec![None; nq];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, g) in c.gates.iter().enumerate() {
        for q in g.qubits() {
            if let Some(p) = last_on[q] {
                if !preds[i].contains(&p) {
                    preds[i].push(p);
                }
            }
            last_on[q] = Some(i);
        }
    }
    let mut slot_of = vec![usize::MAX; n];
    let mut placed = 0;
    let mut t = 0;
    let mut frontier = 0;
    while placed < n {
        let mut taken = 0;
        let mut i = frontier;
        while i < n && taken < cap {
            if slot_of[i] == usize::MAX && preds[i].iter().all(|&p| slot_of[p] != usize::MAX && slot_of[p] < t) {
                slot_of[i] = t;
                taken += 1;
                placed += 1;
            }
            i += 1;
        }
        while frontier < n && slot_of[frontier] != usize::MAX {
            frontier += 1;
        }
        t += 1;
    }
    Ok(ScheduledCircuit::from_slots(c.clone(), slot_of))
}

/// Number of gates on the longest dependence chain (independent check on
/// `schedule_asap`'s slot count).
pub fn longest_path(c: &Circuit) -> usize {
    let mut len_on = vec![0usize; c.num_qubits()];
    let mut best = 0;
    for g in &c.gates {
        let qs = g.qubits();
        let l = qs.iter().map(|&q| len_on[q]).max().unwrap_or(0) + 1;
        for &q in &qs {
            len_on[q] = l;
        }
        best = best.max(l);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Builder, WireRole};

    #[test]
    fn serial_circuit_profile_is_all_ones() {
        let mut b = Builder::new();
        let q = b.alloc("q", 2, WireRole::Scratch);
        for _ in 0..4 {
            b.cnot(q[0], q[1]);
        }
        let s = schedule_asap(&b.finish(), &Arch::Ac).unwrap();
        assert_eq!(s.concurrency_profile(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn heaviest_gate_classifies_slot() {
        let mut b = Builder::new();
        let q = b.alloc("q", 6, WireRole::Scratch);
        b.ccnot(q[0], q[1], q[2]);
        b.cnot(q[3], q[4]);
        b.not(q[5]);
        b.not(q[5]);
        let s = schedule_asap(&b.finish(), &Arch::Ac).unwrap();
        assert_eq!(s.depth(), CostVector::new(1, 0, 1));
        assert_eq!(s.max_concurrency(), 3);
    }

    #[test]
    fn ntc_rejects_toffoli() {
        let mut b = Builder::new();
        let q = b.alloc("q", 3, WireRole::Scratch);
        b.ccnot(q[0], q[1], q[2]);
        assert!(schedule_asap(&b.finish(), &Arch::ntc_identity(3)).is_err());
    }

    #[test]
    fn capped_schedule_respects_cap() {
        let mut b = Builder::new();
        let q = b.alloc("q", 8, WireRole::Scratch);
        for i in 0..4 {
            b.cnot(q[2 * i], q[2 * i + 1]);
        }
        let c = b.finish();
        let s = schedule_capped(&c, &Arch::Ac, 2).unwrap();
        assert_eq!(s.num_slots(), 2);
        s.check().unwrap();
    }
}
