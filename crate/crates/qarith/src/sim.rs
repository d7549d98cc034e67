//! Verification engines: a bit-sliced permutation simulator for
//! Toffoli-class circuits, a sparse amplitude simulator for circuits with
//! square-root gates, a dense unitary builder for up to five qubits, and
//! classical oracles.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ir::{Circuit, Gate, GateKind};
use crate::{Error, Result};

/// One bit per allocated qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisState(pub Vec<bool>);

impl BasisState {
    pub fn zeros(n: usize) -> Self {
        BasisState(vec![false; n])
    }

    pub fn set(&mut self, qubits: &[usize], value: u64) {
        for (i, &q) in qubits.iter().enumerate() {
            self.0[q] = (value >> i) & 1 == 1;
        }
    }

    pub fn get(&self, qubits: &[usize]) -> u64 {
        qubits.iter().enumerate().fold(0, |acc, (i, &q)| acc | ((self.0[q] as u64) << i))
    }

    pub fn to_bitstring(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

fn reject_non_permutation(c: &Circuit) -> Result<()> {
    if let Some(g) = c.gates.iter().find(|g| !g.kind.is_permutation()) {
        return Err(Error::Unsupported(format!(
            "{g} is not a permutation gate; check square-root blocks with run_unitary or run_sparse"
        )));
    }
    Ok(())
}

pub fn run_permutation(c: &Circuit, input: &BasisState) -> Result<BasisState> {
    reject_non_permutation(c)?;
    if input.0.len() != c.num_qubits() {
        return Err(Error::Param(format!("state has {} bits for {} qubits", input.0.len(), c.num_qubits())));
    }
    let mut s = input.0.clone();
    for g in &c.gates {
        apply_bool(&mut s, g);
    }
    Ok(BasisState(s))
}

fn apply_bool(s: &mut [bool], g: &Gate) {
    let t = &g.targets;
    let c = &g.controls;
    match g.kind {
        GateKind::Not => s[t[0]] = !s[t[0]],
        GateKind::Cnot => s[t[0]] ^= s[c[0]],
        GateKind::Ccnot => s[t[0]] ^= s[c[0]] & s[c[1]],
        GateKind::Swap => s.swap(t[0], t[1]),
        GateKind::Cswap => {
            if s[c[0]] {
                s.swap(t[0], t[1])
            }
        }
        GateKind::SqrtX | GateKind::SqrtXDag => unreachable!("rejected earlier"),
    }
}

/// 64 lanes per word, `words` words per qubit; each lane is one basis state.
#[derive(Clone, Debug)]
pub struct Lanes {
    nq: usize,
    words: usize,
    data: Vec<u64>,
}

impl Lanes {
    pub fn new(nq: usize, lanes: usize) -> Lanes {
        let words = lanes.div_ceil(64).max(1);
        Lanes { nq, words, data: vec![0; nq * words] }
    }

    pub fn lanes(&self) -> usize {
        self.words * 64
    }

    pub fn set(&mut self, lane: usize, qubits: &[usize], value: u64) {
        let (w, b) = (lane / 64, lane % 64);
        for (i, &q) in qubits.iter().enumerate() {
            let word = &mut self.data[q * self.words + w];
            if (value >> i) & 1 == 1 {
                *word |= 1 << b;
            } else {
                *word &= !(1 << b);
            }
        }
    }

    pub fn get(&self, lane: usize, qubits: &[usize]) -> u64 {
        let (w, b) = (lane / 64, lane % 64);
        qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &q)| acc | (((self.data[q * self.words + w] >> b) & 1) << i))
    }

    pub fn apply(&mut self, c: &Circuit) -> Result<()> {
        reject_non_permutation(c)?;
        if c.num_qubits() > self.nq {
            return Err(Error::Param("circuit wider than lane state".into()));
        }
        for g in &c.gates {
            self.apply_gate(g);
        }
        Ok(())
    }

    fn apply_gate(&mut self, g: &Gate) {
        let w = self.words;
        let d = &mut self.data;
        let row = |q: usize| q * w;
        match g.kind {
            GateKind::Not => {
                let t = row(g.targets[0]);
                for x in &mut d[t..t + w] {
                    *x = !*x;
                }
            }
            GateKind::Cnot => {
                let (c, t) = (row(g.controls[0]), row(g.targets[0]));
                for i in 0..w {
                    d[t + i] ^= d[c + i];
                }
            }
            GateKind::Ccnot => {
                let (c1, c2, t) = (row(g.controls[0]), row(g.controls[1]), row(g.targets[0]));
                for i in 0..w {
                    d[t + i] ^= d[c1 + i] & d[c2 + i];
                }
            }
            GateKind::Swap => {
                let (x, y) = (row(g.targets[0]), row(g.targets[1]));
                for i in 0..w {
                    d.swap(x + i, y + i);
                }
            }
            GateKind::Cswap => {
                let (c, x, y) = (row(g.controls[0]), row(g.targets[0]), row(g.targets[1]));
                for i in 0..w {
                    let m = (d[x + i] ^ d[y + i]) & d[c + i];
                    d[x + i] ^= m;
                    d[y + i] ^= m;
                }
            }
            GateKind::SqrtX | GateKind::SqrtXDag => unreachable!("rejected earlier"),
        }
    }
}

/// Runs `c` on many basis states in parallel chunks. `prepare(lane, state)`
/// writes lane inputs; `check(lane, state)` inspects outputs. Returns the
/// first lane index (in input order) whose check failed, if any.
pub fn run_lanes<P, K>(c: &Circuit, count: usize, prepare: P, check: K) -> Result<Option<usize>>
where
    P: Fn(usize, &mut Lanes, usize) + Sync,
    K: Fn(usize, &Lanes, usize) -> bool + Sync,
{
    reject_non_permutation(c)?;
    const CHUNK: usize = 64 * 16;
    let chunks: Vec<usize> = (0..count.div_ceil(CHUNK)).collect();
    let fails: Vec<Option<usize>> = chunks
        .par_iter()
        .map(|&ch| {
            let start = ch * CHUNK;
            let len = CHUNK.min(count - start);
            let mut st = Lanes::new(c.num_qubits(), len);
            for l in 0..len {
                prepare(start + l, &mut st, l);
            }
            st.apply(c).expect("checked above");
            (0..len).find(|&l| !check(start + l, &st, l)).map(|l| start + l)
        })
        .collect();
    Ok(fails.into_iter().flatten().min())
}

/// Amplitudes over basis states, keyed by bit mask (at most 128 qubits).
pub type SparseState = HashMap<u128, Complex64>;

fn v_entries(dag: bool) -> (Complex64, Complex64) {
    let p = Complex64::new(0.5, 0.5);
    let m = Complex64::new(0.5, -0.5);
    if dag {
        (m, p)
    } else {
        (p, m)
    }
}

/// Exact simulation from one basis state keeping only non-zero amplitudes.
/// Efficient when square-root gates appear in short cancelling runs, as in
/// the five-gate Toffoli.
pub fn run_sparse(c: &Circuit, input: u128) -> Result<SparseState> {
    if c.num_qubits() > 128 {
        return Err(Error::Param("sparse engine supports at most 128 qubits".into()));
    }
    let mut st: SparseState = HashMap::from([(input, Complex64::new(1.0, 0.0))]);
    let bit = |k: u128, q: usize| (k >> q) & 1 == 1;
    for g in &c.gates {
        let t = &g.targets;
        let cs = &g.controls;
        match g.kind {
            GateKind::SqrtX | GateKind::SqrtXDag => {
                let (diag, off) = v_entries(g.kind == GateKind::SqrtXDag);
                let mut next: SparseState = HashMap::with_capacity(st.len() * 2);
                for (k, a) in st {
                    if cs.iter().all(|&q| bit(k, q)) {
                        *next.entry(k).or_default() += a * diag;
                        *next.entry(k ^ (1u128 << t[0])).or_default() += a * off;
                    } else {
                        *next.entry(k).or_default() += a;
                    }
                }
                next.retain(|_, a| a.norm() > 1e-12);
                st = next;
            }
            _ => {
                st = st
                    .into_iter()
                    .map(|(k, a)| {
                        let on = cs.iter().all(|&q| bit(k, q));
                        let k2 = match g.kind {
                            GateKind::Not => k ^ (1u128 << t[0]),
                            GateKind::Cnot | GateKind::Ccnot if on => k ^ (1u128 << t[0]),
                            GateKind::Swap | GateKind::Cswap if on && bit(k, t[0]) != bit(k, t[1]) => {
                                k ^ (1u128 << t[0]) ^ (1u128 << t[1])
                            }
                            _ => k,
                        };
                        (k2, a)
                    })
                    .collect();
            }
        }
    }
    Ok(st)
}

/// The single basis state a sparse state collapses to, if it is one.
pub fn sparse_as_basis(st: &SparseState) -> Option<u128> {
    if st.len() != 1 {
        return None;
    }
    let (&k, a) = st.iter().next()?;
    ((a.norm() - 1.0).abs() < 1e-9).then_some(k)
}

/// Dense `2^k x 2^k` matrix, row-major, qubit `i` is bit `i` of the index.
#[derive(Clone, Debug)]
pub struct SmallUnitary {
    pub k: usize,
    pub m: Vec<Complex64>,
}

pub const MAX_UNITARY_QUBITS: usize = 5;

impl SmallUnitary {
    pub fn identity(k: usize) -> SmallUnitary {
        let d = 1 << k;
        let mut m = vec![Complex64::default(); d * d];
        for i in 0..d {
            m[i * d + i] = Complex64::new(1.0, 0.0);
        }
        SmallUnitary { k, m }
    }

    pub fn dim(&self) -> usize {
        1 << self.k
    }

    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.m[r * self.dim() + c]
    }

    /// Matrix of a permutation circuit over `k` qubits.
    pub fn from_permutation(c: &Circuit, k: usize) -> Result<SmallUnitary> {
        let d = 1 << k;
        let mut u = SmallUnitary { k, m: vec![Complex64::default(); d * d] };
        for col in 0..d {
            let mut s = BasisState::zeros(c.num_qubits().max(k));
            for q in 0..k {
                s.0[q] = (col >> q) & 1 == 1;
            }
            let out = run_permutation(c, &s)?;
            let row = (0..k).fold(0, |acc, q| acc | ((out.0[q] as usize) << q));
            u.m[row * d + col] = Complex64::new(1.0, 0.0);
        }
        Ok(u)
    }

    fn apply_left(&mut self, g: &Gate) {
        let d = self.dim();
        let ctl = |r: usize| g.controls.iter().all(|&q| (r >> q) & 1 == 1);
        match g.kind {
            GateKind::SqrtX | GateKind::SqrtXDag => {
                let (diag, off) = v_entries(g.kind == GateKind::SqrtXDag);
                let t = g.targets[0];
                for r in 0..d {
                    if (r >> t) & 1 == 0 && ctl(r) {
                        let r1 = r | (1 << t);
                        for c in 0..d {
                            let (a0, a1) = (self.m[r * d + c], self.m[r1 * d + c]);
                            self.m[r * d + c] = diag * a0 + off * a1;
                            self.m[r1 * d + c] = off * a0 + diag * a1;
                        }
                    }
                }
            }
            _ => {
                let mut next = vec![Complex64::default(); d * d];
                for r in 0..d {
                    let mut bits: Vec<bool> = (0..self.k).map(|q| (r >> q) & 1 == 1).collect();
                    apply_bool(&mut bits, g);
                    let r2 = bits.iter().enumerate().fold(0, |acc, (q, &b)| acc | ((b as usize) << q));
                    next[r2 * d..r2 * d + d].copy_from_slice(&self.m[r * d..r * d + d]);
                }
                self.m = next;
            }
        }
    }

    /// `max |U†U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut s = Complex64::default();
                for r in 0..d {
                    s += self.at(r, i).conj() * self.at(r, j);
                }
                let e = if i == j { s - 1.0 } else { s };
                worst = worst.max(e.norm());
            }
        }
        worst
    }

    /// Largest entrywise difference after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &SmallUnitary) -> f64 {
        assert_eq!(self.k, other.k);
        let mut overlap = Complex64::default();
        for (a, b) in self.m.iter().zip(&other.m) {
            overlap += b.conj() * a;
        }
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
        self.m.iter().zip(&other.m).map(|(a, b)| (a - b * phase).norm()).fold(0.0, f64::max)
    }
}

/// Product of the gate embeddings, first gate applied first.
pub fn run_unitary(gates: &[Gate], k: usize) -> Result<SmallUnitary> {
    if k > MAX_UNITARY_QUBITS {
        return Err(Error::Param(format!("dense engine is limited to {MAX_UNITARY_QUBITS} qubits, got {k}")));
    }
    let mut u = SmallUnitary::identity(k);
    for g in gates {
        if g.qubits().iter().any(|&q| q >= k) {
            return Err(Error::Param(format!("{g} outside {k} qubits")));
        }
        u.apply_left(g);
    }
    Ok(u)
}

pub mod oracle {
    use super::*;

    pub fn add(a: u64, b: u64) -> u64 {
        a + b
    }

    pub fn add_mod(n: u64, u: u64, v: u64) -> u64 {
        ((u as u128 + v as u128) % n as u128) as u64
    }

    pub fn mul_mod(n: u64, u: u64, v: u64) -> u64 {
        ((u as u128 * v as u128) % n as u128) as u64
    }

    pub fn modexp(x: u64, a: u64, n: u64) -> u64 {
        let r = BigUint::from(x).modpow(&BigUint::from(a), &BigUint::from(n));
        r.iter_u64_digits().next().unwrap_or(0)
    }

    pub fn mod_inverse(x: u64, n: u64) -> Option<u64> {
        use num_integer::Integer;
        let (x, n) = (x as i128, n as i128);
        let e = x.extended_gcd(&n);
        (e.gcd == 1).then(|| e.x.rem_euclid(n) as u64)
    }
}

/// Register-level input/output description for `verify`.
#[derive(Clone, Debug, Default)]
pub struct IoSpec {
    pub inputs: Vec<(String, Vec<usize>)>,
    pub outputs: Vec<(String, Vec<usize>)>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Exhaustive,
    Sampled { cases: usize, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub inputs: Vec<(String, u64)>,
    pub expected: Vec<(String, u64)>,
    pub got: Vec<(String, u64)>,
    /// Wire bits after each gate, capped at the first 4096 gates.
    pub trace: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub circuit: String,
    pub oracle: String,
    pub domain: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    pub seed: Option<u64>,
    pub cases: usize,
}

/// Oracle type: input register values → expected output register values,
/// or `None` to skip inputs outside the precondition.
pub type OracleFn<'a> = dyn Fn(&[u64]) -> Option<Vec<u64>> + Sync + 'a;

pub const EXHAUSTIVE_LIMIT_BITS: usize = 20;

/// Checks `c` against `oracle` on the input domain. Unlisted qubits start
/// at zero.
pub fn verify(
    name: &str,
    c: &Circuit,
    io: &IoSpec,
    oracle_name: &str,
    oracle: &OracleFn<'_>,
    domain: &Domain,
) -> Result<VerifyReport> {
    let widths: Vec<usize> = io.inputs.iter().map(|(_, q)| q.len()).collect();
    let total_bits: usize = widths.iter().sum();
    let decode = |mut k: u64| -> Vec<u64> {
        widths
            .iter()
            .map(|&w| {
                let v = k & ((1u64 << w) - 1);
                k >>= w;
                v
            })
            .collect()
    };
    let (cases, seed): (Vec<Vec<u64>>, Option<u64>) = match domain {
        Domain::Exhaustive => {
            if total_bits > EXHAUSTIVE_LIMIT_BITS {
                return Err(Error::Param(format!("{total_bits} input bits exceed the exhaustive limit")));
            }
            ((0..1u64 << total_bits).map(decode).collect(), None)
        }
        Domain::Sampled { cases, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mask = if total_bits >= 64 { u64::MAX } else { (1u64 << total_bits) - 1 };
            ((0..*cases).map(|_| decode(rng.gen::<u64>() & mask)).collect(), Some(*seed))
        }
    };
    let cases: Vec<(Vec<u64>, Vec<u64>)> =
        cases.into_iter().filter_map(|inp| oracle(&inp).map(|out| (inp, out))).collect();
    if cases.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let fail = run_lanes(
        c,
        cases.len(),
        |i, st, l| {
            for ((_, qs), &v) in io.inputs.iter().zip(&cases[i].0) {
                st.set(l, qs, v);
            }
        },
        |i, st, l| io.outputs.iter().zip(&cases[i].1).all(|((_, qs), &v)| st.get(l, qs) == v),
    )?;
    let counterexample = fail.map(|i| {
        let (inp, exp) = &cases[i];
        let mut s = BasisState::zeros(c.num_qubits());
        for ((_, qs), &v) in io.inputs.iter().zip(inp) {
            s.set(qs, v);
        }
        let mut trace = Vec::new();
        for g in c.gates.iter().take(4096) {
            apply_bool(&mut s.0, g);
            trace.push(s.to_bitstring());
        }
        let out = run_permutation(c, &{
            let mut s0 = BasisState::zeros(c.num_qubits());
            for ((_, qs), &v) in io.inputs.iter().zip(inp) {
                s0.set(qs, v);
            }
            s0
        })
        .expect("permutation circuit");
        Counterexample {
            inputs: io.inputs.iter().map(|(n, _)| n.clone()).zip(inp.iter().copied()).collect(),
            expected: io.outputs.iter().map(|(n, _)| n.clone()).zip(exp.iter().copied()).collect(),
            got: io.outputs.iter().map(|(n, qs)| (n.clone(), out.get(qs))).collect(),
            trace,
        }
    });
    Ok(VerifyReport {
        circuit: name.to_string(),
        oracle: oracle_name.to_string(),
        domain: match domain {
            Domain::Exhaustive => format!("exhaustive {total_bits} bits"),
            Domain::Sampled { cases, .. } => format!("sampled {cases}"),
        },
        pass: counterexample.is_none(),
        counterexample,
        seed,
        cases: cases.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Builder, WireRole};

    #[test]
    fn not_and_toffoli_truth() {
        let mut b = Builder::new();
        let q = b.alloc("q", 3, WireRole::Scratch);
        b.ccnot(q[0], q[1], q[2]);
        let c = b.finish();
        let out = run_permutation(&c, &BasisState(vec![true, true, false])).unwrap();
        assert_eq!(out, BasisState(vec![true, true, true]));
        let mut b = Builder::new();
        let q = b.alloc1("q", WireRole::Scratch);
        b.not(q);
        assert_eq!(run_permutation(&b.finish(), &BasisState(vec![false])).unwrap().0, vec![true]);
    }

    #[test]
    fn sqrt_x_squares_to_x() {
        let v = Gate::sqrt_x(None, 0);
        let u = run_unitary(&[v.clone(), v], 1).unwrap();
        let x = run_unitary(&[Gate::not(0)], 1).unwrap();
        assert!(u.distance_up_to_phase(&x) < 1e-12);
        let id = run_unitary(&[Gate::sqrt_x(None, 0), Gate::sqrt_x_dag(None, 0)], 1).unwrap();
        assert!(id.distance_up_to_phase(&SmallUnitary::identity(1)) < 1e-12);
    }

    #[test]
    fn dense_engine_size_limit() {
        assert!(run_unitary(&[], 6).is_err());
    }

    #[test]
    fn sparse_rejoins_after_toffoli_blocks() {
        let parts = crate::arch::decompose_ccnot_ntc(&Gate::ccnot(0, 1, 2)).unwrap();
        let mut b = Builder::new();
        b.alloc("q", 3, WireRole::Scratch);
        for g in parts {
            b.push(g);
        }
        let c = b.finish();
        for k in 0..8u128 {
            let out = sparse_as_basis(&run_sparse(&c, k).unwrap()).unwrap();
            let expect = if k & 3 == 3 { k ^ 4 } else { k };
            assert_eq!(out, expect);
        }
    }

    #[test]
    fn oracles() {
        assert_eq!(oracle::modexp(7, 4, 15), 1);
        assert_eq!(oracle::add_mod(11, 9, 7), 5);
        assert_eq!(oracle::modexp(1, 12345, 21), 1);
        assert_eq!(oracle::mod_inverse(7, 15), Some(13));
        assert_eq!(oracle::mod_inverse(3, 15), None);
    }
}
