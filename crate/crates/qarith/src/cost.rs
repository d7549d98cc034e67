//! Closed-form latency and space models, evaluated with exact rationals.
//!
//! Latencies are tuples (CCNOT; CNOT; NOT). On the line architecture the
//! CCNOT component is always zero and CNOT carries the whole depth.
//!
//! The algorithm latency is composed once here:
//!
//! ```text
//! deferred modulo:  R * R_M * (t_adder + t_arg) + 3p * t_adder,  R_M = n(2b+1)/b
//! three-adder:      R * 3n  * (t_adder + t_arg)
//! ```
//!
//! where `R` is the chain latency in multiplier calls for `s` chains and a
//! window of `w` exponent bits.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
pub use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::ir::CostVector;
use crate::{Error, Result};

pub type Q = Ratio<i128>;

fn q(x: i128) -> Q {
    Q::from_integer(x)
}

/// A latency tuple with exact rational components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Tuple {
    pub ccnot: Q,
    pub cnot: Q,
    pub not: Q,
}

impl Tuple {
    pub fn new(ccnot: i128, cnot: i128, not: i128) -> Tuple {
        Tuple { ccnot: q(ccnot), cnot: q(cnot), not: q(not) }
    }

    pub fn from_q(ccnot: Q, cnot: Q, not: Q) -> Tuple {
        Tuple { ccnot, cnot, not }
    }

    pub fn scale(self, k: Q) -> Tuple {
        Tuple { ccnot: self.ccnot * k, cnot: self.cnot * k, not: self.not * k }
    }

    /// The component a given architecture is ranked by.
    pub fn lead(&self, arch: ArchKind) -> Q {
        match arch {
            ArchKind::Ac => self.ccnot,
            ArchKind::Ntc => self.cnot,
        }
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [self.ccnot, self.cnot, self.not].map(|x| x.to_f64().unwrap_or(f64::NAN))
    }

    /// Exact integer tuple, if every component is integral.
    pub fn to_cost_vector(&self) -> Option<CostVector> {
        let c = |x: Q| x.is_integer().then(|| x.to_integer()).and_then(|v| u64::try_from(v).ok());
        Some(CostVector::new(c(self.ccnot)?, c(self.cnot)?, c(self.not)?))
    }
}

impl std::ops::Add for Tuple {
    type Output = Tuple;
    fn add(self, o: Tuple) -> Tuple {
        Tuple { ccnot: self.ccnot + o.ccnot, cnot: self.cnot + o.cnot, not: self.not + o.not }
    }
}

impl From<CostVector> for Tuple {
    fn from(c: CostVector) -> Tuple {
        Tuple::new(c.ccnot as i128, c.cnot as i128, c.not as i128)
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.to_f64();
        write!(f, "({a};{b};{c})")
    }
}

impl Serialize for Tuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_f64().serialize(s)
    }
}

/// Shorthand for three significant figures, as in `1.25e8`.
pub fn sci3(x: f64) -> String {
    format!("{x:.2e}")
}

/// True when `a` and `b` agree to three significant figures.
pub fn same_3sf(a: f64, b: f64) -> bool {
    sci3(a) == sci3(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchKind {
    Ac,
    Ntc,
}

impl ArchKind {
    pub fn name(self) -> &'static str {
        match self {
            ArchKind::Ac => "ac",
            ArchKind::Ntc => "ntc",
        }
    }
}

impl std::str::FromStr for ArchKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<ArchKind> {
        match s.to_ascii_lowercase().as_str() {
            "ac" => Ok(ArchKind::Ac),
            "ntc" => Ok(ArchKind::Ntc),
            _ => Err(Error::Parse(format!("unknown architecture `{s}` (expected ac or ntc)"))),
        }
    }
}

pub fn clog2(x: i128) -> i128 {
    if x <= 1 {
        0
    } else {
        128 - (x - 1).leading_zeros() as i128
    }
}

fn flog2(x: i128) -> i128 {
    127 - x.leading_zeros() as i128
}

fn div_ceil(a: i128, b: i128) -> i128 {
    a.div_euclid(b) + i128::from(a.rem_euclid(b) != 0)
}

/// `(4n-4; 4n-3; 0)`
pub fn t_add(n: usize) -> Tuple {
    let n = n as i128;
    Tuple::new(4 * n - 4, 4 * n - 3, 0)
}

pub fn vbe_adder_calls(n: usize) -> i128 {
    let n = n as i128;
    20 * n * n - 5 * n
}

pub fn t_v(n: usize) -> Tuple {
    t_add(n).scale(q(vbe_adder_calls(n)))
}

/// Concurrent VBE adder on AC: `(3n-3; 2n-3; 0)`.
pub fn t_add_ac(n: usize) -> Tuple {
    let n = n as i128;
    Tuple::new(3 * n - 3, 2 * n - 3, 0)
}

pub fn t_v_ac(n: usize) -> Tuple {
    t_add_ac(n).scale(q(vbe_adder_calls(n)))
}

/// VBE adder on the line: `20n - 15` CNOT slots.
pub fn t_add_ntc(n: usize) -> Tuple {
    Tuple::new(0, 20 * n as i128 - 15, 0)
}

pub fn t_v_ntc(n: usize) -> Tuple {
    t_add_ntc(n).scale(q(vbe_adder_calls(n)))
}

pub fn t_b(n: usize) -> Tuple {
    let n = n as i128;
    Tuple::new(
        54 * n.pow(3) - 127 * n * n + 108 * n - 29,
        10 * n.pow(3) + 15 * n * n - 38 * n + 14,
        20 * n.pow(3) - 38 * n * n + 22 * n - 4,
    )
}

pub fn t_cuca_ac(n: usize) -> Tuple {
    Tuple::new(2 * n as i128 - 1, 5, 0)
}

pub fn t_cuca_ntc(n: usize) -> Tuple {
    Tuple::new(0, 10 * n as i128 + 5, 0)
}

/// `(4 log n + 3; 4; 2)`, `n` a power of two.
pub fn t_la_ac(n: usize) -> Tuple {
    Tuple::new(4 * flog2(n as i128) + 3, 4, 2)
}

pub fn t_cs_ac(m: usize) -> Tuple {
    Tuple::new(m as i128, 2, 0)
}

/// Group count and first-group width for `n` bits in groups of `m`.
pub fn partition(n: usize, m: usize) -> (usize, usize) {
    let g = (n - 1) / m + 1;
    (g, n - m * (g - 1))
}

/// MUX with a fanout of 4: `(4g + m/2 - 6; 2; 2g - 2)`.
pub fn t_mux_ac(n: usize, m: usize) -> Tuple {
    let (g, _) = partition(n, m);
    let g = g as i128;
    Tuple::from_q(q(4 * g - 6) + Q::new(m as i128, 2), q(2), q(2 * g - 2))
}

/// CSLA, MUX and CSLA undo.
pub fn t_sem_ac(n: usize, m: usize) -> Tuple {
    t_cs_ac(m).scale(q(2)) + t_mux_ac(n, m)
}

/// `(2m + 4L + 2; 4; 4L + 2)` with `L = ceil(log2(g-1))`; needs `g >= 2`.
pub fn t_csum_ac(n: usize, m: usize) -> Tuple {
    let (g, _) = partition(n, m);
    let l = clog2(g as i128 - 1);
    Tuple::new(2 * m as i128 + 4 * l + 2, 4, 4 * l + 2)
}

pub fn t_arg_ac(w: usize) -> Tuple {
    match w {
        1 => Tuple::new(0, 0, 0),
        2 => Tuple::new(4, 0, 4),
        3 => Tuple::new(24, 0, 8),
        _ => Tuple::new(48, 0, 16),
    }
}

/// Argument setting on the line: each AC CCNOT becomes CNOT work and the
/// enable signal crosses the `n`-bit register twice.
pub fn t_arg_ntc(w: usize, n: usize) -> Tuple {
    let ac = t_arg_ac(w);
    if w == 1 {
        return Tuple::default();
    }
    Tuple::from_q(q(0), ac.ccnot + q(2 * n as i128), ac.not)
}

/// Windows of `w` exponent bits: `ceil((2n+1)/w)`.
pub fn windows(n: usize, w: usize) -> usize {
    (2 * n + 1).div_ceil(w)
}

/// Chain latency in multiplier calls for exactly `s` chains over `k`
/// multiplicands.
fn chain_latency(k: i128, s: i128) -> i128 {
    let r = k / s;
    let long = k - r * s;
    if long == 0 {
        2 * r - 1 + clog2(s)
    } else {
        2 * r + 1 + clog2((s - long) / 4 + long)
    }
}

/// Multiplier-call latency with at most `s` chains over the windows.
pub fn r_i(n: usize, s: usize, w: usize) -> i128 {
    let k = windows(n, w) as i128;
    (1..=(s as i128).min(k)).map(|t| chain_latency(k, t)).min().unwrap_or(0)
}

pub fn r_v(n: usize, s: usize) -> i128 {
    r_i(n, s, 1)
}

/// The chain-latency expression read literally, with `2n+1` in place of
/// the window count.
pub fn r_i_printed(n: usize, s: usize, w: usize) -> i128 {
    let (n, s) = (n as i128, s as i128);
    let r = windows(n as usize, w) as i128 / s;
    let inner = div_ceil(s - 2 * n - 1 + r * s, 4) + 2 * n + 1 - r * s;
    2 * r + 1 + clog2(inner)
}

pub fn r_m(n: usize, b: usize) -> Q {
    Q::new((n * (2 * b + 1)) as i128, b as i128)
}

pub fn s_vbe(n: usize) -> usize {
    7 * n + 1
}

pub fn s_bcdp(n: usize) -> usize {
    5 * n + 3
}

pub fn s_gossett_mult(n: usize) -> usize {
    8 * n * n
}

/// Clean carry-select adder with fanout 4: `(6m-1)(g-1) + 3f + 4g`.
pub fn s_csla(n: usize, m: usize) -> usize {
    let (g, f) = partition(n, m);
    (6 * m - 1) * (g - 1) + 3 * f + 4 * g
}

/// Clean conditional-sum adder: `(6m-1)(g-1) + 3f + ceil(3(g-1)/2 - 2 + (n-f)/2)`.
pub fn s_csum(n: usize, m: usize) -> usize {
    let (g, f) = partition(n, m);
    let extra = div_ceil(3 * (g as i128 - 1) - 4 + (n - f) as i128, 2);
    ((6 * m - 1) * (g - 1) + 3 * f) + extra.max(0) as usize
}

/// Carry-lookahead storage plus the `n`-bit addend it keeps alongside.
pub fn s_qcla(n: usize) -> usize {
    5 * n - flog2(n as i128) as usize - 1
}

/// Ripple multiplier storage: `3n + 2` with deferred modulo, `2n + 2` with
/// the three-adder modulo.
pub fn s_cuca(n: usize, deferred: bool) -> usize {
    if deferred {
        3 * n + 2
    } else {
        2 * n + 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algo {
    #[serde(rename = "cvbe")]
    Cvbe,
    D,
    E,
    F,
    G,
}

impl Algo {
    pub const ALL: [Algo; 5] = [Algo::Cvbe, Algo::D, Algo::E, Algo::F, Algo::G];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Cvbe => "cvbe",
            Algo::D => "D",
            Algo::E => "E",
            Algo::F => "F",
            Algo::G => "G",
        }
    }

    pub fn adder_name(self) -> &'static str {
        match self {
            Algo::Cvbe => "vbe",
            Algo::D => "csum",
            Algo::E => "qcla",
            Algo::F | Algo::G => "cuccaro",
        }
    }

    pub fn supports(self, arch: ArchKind) -> bool {
        arch == ArchKind::Ac || matches!(self, Algo::Cvbe | Algo::F | Algo::G)
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algo {
    type Err = Error;
    fn from_str(s: &str) -> Result<Algo> {
        match s.to_ascii_lowercase().as_str() {
            "cvbe" | "vbe" => Ok(Algo::Cvbe),
            "d" => Ok(Algo::D),
            "e" => Ok(Algo::E),
            "f" => Ok(Algo::F),
            "g" => Ok(Algo::G),
            _ => Err(Error::Parse(format!("unknown algorithm `{s}` (expected cvbe, D, E, F or G)"))),
        }
    }
}

/// Free parameters of an algorithm. `p = 0` selects the three-adder modulo.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub s: usize,
    pub w: usize,
    pub p: usize,
    /// CSUM group size; ignored by the other adders.
    pub m: usize,
}

impl ModelParams {
    /// The 128-bit parameter sets.
    pub fn preset(algo: Algo) -> ModelParams {
        let n = 128;
        match algo {
            Algo::Cvbe => ModelParams { n, s: 1, w: 1, p: 0, m: 0 },
            Algo::D => ModelParams { n, s: 12, w: 2, p: 11, m: 4 },
            Algo::E => ModelParams { n, s: 16, w: 2, p: 10, m: 0 },
            Algo::F => ModelParams { n, s: 20, w: 4, p: 10, m: 0 },
            Algo::G => ModelParams { n, s: 1, w: 4, p: 0, m: 0 },
        }
    }

    pub fn b(&self) -> usize {
        if self.p == 0 {
            0
        } else {
            1 << (self.p - 1)
        }
    }
}

/// One evaluated algorithm with its intermediate terms.
#[derive(Clone, Debug, Serialize)]
pub struct AlgoEval {
    pub algo: Algo,
    pub arch: ArchKind,
    pub params: ModelParams,
    pub latency: Tuple,
    pub space: usize,
    /// Multiplier calls on the critical path.
    pub r: i128,
    /// Adder calls per multiplier.
    pub r_m: Tuple1,
    pub t_adder: Tuple,
    pub t_arg: Tuple,
}

/// A scalar that serializes as a float.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tuple1(pub Q);

impl Serialize for Tuple1 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.to_f64().unwrap_or(f64::NAN).serialize(s)
    }
}

fn validate(algo: Algo, arch: ArchKind, p: &ModelParams) -> Result<()> {
    if !algo.supports(arch) {
        let why = match algo {
            Algo::E => "the carry-lookahead adder's long-distance operands make it unattractive on the line architecture",
            _ => "the conditional-sum adder is evaluated on the abstract concurrent architecture only",
        };
        return Err(Error::Unsupported(format!("algorithm {algo} on {}: {why}", arch.name())));
    }
    if p.n < 2 {
        return Err(Error::Param(format!("n = {} too small", p.n)));
    }
    if p.s == 0 || p.s > p.n {
        return Err(Error::Param(format!("s = {} outside 1..={}", p.s, p.n)));
    }
    if !(1..=4).contains(&p.w) {
        return Err(Error::Param(format!("w = {} outside 1..=4", p.w)));
    }
    if p.p > 62 {
        return Err(Error::Param(format!("p = {} too large", p.p)));
    }
    match algo {
        Algo::D if p.m < 2 || p.m >= p.n => Err(Error::Param(format!("CSUM needs 2 <= m < n, got m = {}", p.m))),
        Algo::E if !p.n.is_power_of_two() => Err(Error::Param(format!("QCLA needs a power-of-two n, got {}", p.n))),
        Algo::D | Algo::E | Algo::F if p.p == 0 => Err(Error::Param(format!("algorithm {algo} uses deferred modulo, p >= 1"))),
        _ => Ok(()),
    }
}

pub fn adder_latency(algo: Algo, arch: ArchKind, p: &ModelParams) -> Tuple {
    match (algo, arch) {
        (Algo::Cvbe, ArchKind::Ac) => t_add_ac(p.n),
        (Algo::Cvbe, ArchKind::Ntc) => t_add_ntc(p.n),
        (Algo::D, _) => t_csum_ac(p.n, p.m),
        (Algo::E, _) => t_la_ac(p.n),
        (Algo::F | Algo::G, ArchKind::Ac) => t_cuca_ac(p.n),
        (Algo::F | Algo::G, ArchKind::Ntc) => t_cuca_ntc(p.n),
    }
}

pub fn adder_space(algo: Algo, p: &ModelParams) -> usize {
    match algo {
        Algo::Cvbe => s_vbe(p.n),
        Algo::D => s_csum(p.n, p.m),
        Algo::E => s_qcla(p.n),
        Algo::F | Algo::G => s_cuca(p.n, p.p > 0),
    }
}

/// `s(S_adder + 2^w + 1 + p + n) + 2n + 1`, or `7n + 1` for VBE.
pub fn algo_space(algo: Algo, p: &ModelParams) -> usize {
    if algo == Algo::Cvbe {
        return s_vbe(p.n);
    }
    p.s * (adder_space(algo, p) + (1 << p.w) + 1 + p.p + p.n) + 2 * p.n + 1
}

pub fn algo_eval(algo: Algo, arch: ArchKind, p: &ModelParams) -> Result<AlgoEval> {
    validate(algo, arch, p)?;
    let t_adder = adder_latency(algo, arch, p);
    if algo == Algo::Cvbe {
        let calls = q(vbe_adder_calls(p.n));
        return Ok(AlgoEval {
            algo,
            arch,
            params: *p,
            latency: t_adder.scale(calls),
            space: s_vbe(p.n),
            r: r_v(p.n, 1),
            r_m: Tuple1(q(5 * p.n as i128)),
            t_adder,
            t_arg: Tuple::default(),
        });
    }
    let t_arg = match arch {
        ArchKind::Ac => t_arg_ac(p.w),
        ArchKind::Ntc => t_arg_ntc(p.w, p.n),
    };
    let r = r_i(p.n, p.s, p.w);
    let (rm, tail) = if p.p == 0 {
        (q(3 * p.n as i128), Tuple::default())
    } else {
        (r_m(p.n, p.b()), t_adder.scale(q(3 * p.p as i128)))
    };
    let latency = (t_adder + t_arg).scale(rm * q(r)) + tail;
    Ok(AlgoEval { algo, arch, params: *p, latency, space: algo_space(algo, p), r, r_m: Tuple1(rm), t_adder, t_arg })
}

/// Parameter value for [`eval`].
pub type Params = BTreeMap<String, i64>;

/// Result of a named formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Tuple(Tuple),
    Scalar(Tuple1),
}

impl Value {
    pub fn tuple(self) -> Option<Tuple> {
        match self {
            Value::Tuple(t) => Some(t),
            Value::Scalar(_) => None,
        }
    }

    pub fn scalar(self) -> Option<Q> {
        match self {
            Value::Scalar(s) => Some(s.0),
            Value::Tuple(_) => None,
        }
    }
}

pub const FORMULAS: &[&str] = &[
    "t_ADD", "t_ADD_AC", "t_ADD_NTC", "t_V", "t_V_AC", "t_V_NTC", "t_B", "t_CUCA_AC", "t_CUCA_NTC", "t_LA_AC", "t_CS_AC",
    "t_MUX", "t_SEM_AC", "t_CSUM_AC", "t_ARG", "R_V", "R_I", "R_M", "t_D", "t_E", "t_F", "t_G", "S_D", "S_E", "S_F", "S_G",
    "S_CSLA", "S_CSUM", "S_QCLA", "S_VBE", "S_BCDP", "S_GOSSETT_MULT",
];

/// Evaluates a named formula. Parameters are looked up by name (`n`, `m`,
/// `s`, `w`, `p`, `b`, and `arch` as 0 for AC, 1 for the line).
pub fn eval(name: &str, params: &Params) -> Result<Value> {
    let get = |k: &str| -> Result<usize> {
        let v = *params.get(k).ok_or_else(|| Error::MissingParam(k.to_string()))?;
        usize::try_from(v).map_err(|_| Error::Param(format!("{k} = {v} must be non-negative")))
    };
    let arch = || -> ArchKind {
        if params.get("arch").copied().unwrap_or(0) == 1 {
            ArchKind::Ntc
        } else {
            ArchKind::Ac
        }
    };
    let t = |x: Tuple| Ok(Value::Tuple(x));
    let sc = |x: usize| Ok(Value::Scalar(Tuple1(q(x as i128))));
    let algo_params = |algo: Algo| -> Result<ModelParams> {
        let base = ModelParams::preset(algo);
        let opt = |k: &str, d: usize| if params.contains_key(k) { get(k) } else { Ok(d) };
        Ok(ModelParams { n: get("n")?, s: opt("s", base.s)?, w: opt("w", base.w)?, p: opt("p", base.p)?, m: opt("m", base.m)? })
    };
    match name {
        "t_ADD" => t(t_add(get("n")?)),
        "t_ADD_AC" => t(t_add_ac(get("n")?)),
        "t_ADD_NTC" => t(t_add_ntc(get("n")?)),
        "t_V" => t(t_v(get("n")?)),
        "t_V_AC" => t(t_v_ac(get("n")?)),
        "t_V_NTC" => t(t_v_ntc(get("n")?)),
        "t_B" => t(t_b(get("n")?)),
        "t_CUCA_AC" => t(t_cuca_ac(get("n")?)),
        "t_CUCA_NTC" => t(t_cuca_ntc(get("n")?)),
        "t_LA_AC" => t(t_la_ac(get("n")?)),
        "t_CS_AC" => t(t_cs_ac(get("m")?)),
        "t_MUX" => t(t_mux_ac(get("n")?, get("m")?)),
        "t_SEM_AC" => t(t_sem_ac(get("n")?, get("m")?)),
        "t_CSUM_AC" => t(t_csum_ac(get("n")?, get("m")?)),
        "t_ARG" => match arch() {
            ArchKind::Ac => t(t_arg_ac(get("w")?)),
            ArchKind::Ntc => t(t_arg_ntc(get("w")?, get("n")?)),
        },
        "R_V" => Ok(Value::Scalar(Tuple1(q(r_v(get("n")?, get("s")?))))),
        "R_I" => Ok(Value::Scalar(Tuple1(q(r_i(get("n")?, get("s")?, get("w")?))))),
        "R_M" => Ok(Value::Scalar(Tuple1(r_m(get("n")?, get("b")?)))),
        "t_D" | "t_E" | "t_F" | "t_G" => {
            let algo: Algo = name[2..].parse()?;
            t(algo_eval(algo, arch(), &algo_params(algo)?)?.latency)
        }
        "S_D" | "S_E" | "S_F" | "S_G" => {
            let algo: Algo = name[2..].parse()?;
            sc(algo_space(algo, &algo_params(algo)?))
        }
        "S_CSLA" => sc(s_csla(get("n")?, get("m")?)),
        "S_CSUM" => sc(s_csum(get("n")?, get("m")?)),
        "S_QCLA" => sc(s_qcla(get("n")?)),
        "S_VBE" => sc(s_vbe(get("n")?)),
        "S_BCDP" => sc(s_bcdp(get("n")?)),
        "S_GOSSETT_MULT" => sc(s_gossett_mult(get("n")?)),
        _ => Err(Error::Parse(format!("unknown formula `{name}`"))),
    }
}

/// Search ranges for [`optimize`].
#[derive(Clone, Debug, Serialize)]
pub struct SearchSpace {
    pub s: Vec<usize>,
    pub w: Vec<usize>,
    pub p: Vec<usize>,
    pub m: Vec<usize>,
}

impl SearchSpace {
    pub fn default_for(algo: Algo, n: usize) -> SearchSpace {
        let all_s: Vec<usize> = (1..=n).collect();
        match algo {
            Algo::Cvbe => SearchSpace { s: vec![1], w: vec![1], p: vec![0], m: vec![0] },
            Algo::G => SearchSpace { s: all_s, w: vec![1, 2, 3, 4], p: vec![0], m: vec![0] },
            Algo::D => SearchSpace {
                s: all_s,
                w: vec![1, 2, 3, 4],
                p: (1..=15).collect(),
                m: (2..=n.saturating_sub(1).min(16)).collect(),
            },
            Algo::E | Algo::F => SearchSpace { s: all_s, w: vec![1, 2, 3, 4], p: (1..=15).collect(), m: vec![0] },
        }
    }

    fn points(&self, n: usize) -> Vec<ModelParams> {
        let mut out = Vec::new();
        for &s in &self.s {
            for &w in &self.w {
                for &p in &self.p {
                    for &m in &self.m {
                        out.push(ModelParams { n, s, w, p, m });
                    }
                }
            }
        }
        out
    }
}

/// Exhaustive grid search for the lowest leading latency within `budget`
/// qubits; ties go to smaller space, then smaller `s`.
pub fn optimize(algo: Algo, arch: ArchKind, n: usize, budget: usize) -> Result<AlgoEval> {
    optimize_in(algo, arch, n, budget, &SearchSpace::default_for(algo, n))
}

pub fn optimize_in(algo: Algo, arch: ArchKind, n: usize, budget: usize, space: &SearchSpace) -> Result<AlgoEval> {
    if !algo.supports(arch) {
        validate(algo, arch, &ModelParams::preset(algo))?;
    }
    let evals: Vec<AlgoEval> =
        space.points(n).into_par_iter().filter_map(|p| algo_eval(algo, arch, &p).ok()).collect();
    let min_space = evals.iter().map(|e| e.space).min();
    let best = evals.into_iter().filter(|e| e.space <= budget).min_by(|a, b| {
        a.latency
            .lead(arch)
            .cmp(&b.latency.lead(arch))
            .then(a.space.cmp(&b.space))
            .then(a.params.s.cmp(&b.params.s))
            .then(a.params.w.cmp(&b.params.w))
            .then(a.params.p.cmp(&b.params.p))
            .then(a.params.m.cmp(&b.params.m))
    });
    best.ok_or_else(|| match min_space {
        Some(ms) => Error::Infeasible(format!(
            "algorithm {algo} at n = {n} needs at least {ms} qubits, budget is {budget}"
        )),
        None => Error::Infeasible(format!("algorithm {algo} has no valid parameters at n = {n}")),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    /// Problem size at a fixed space multiple.
    N,
    /// Space budget as a multiple of `n`.
    SpaceMultiple,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSpec {
    pub algo: Algo,
    pub arch: ArchKind,
    pub var: SweepVar,
    pub range: Vec<usize>,
    /// The fixed `n` (space sweeps) or space multiple (size sweeps).
    pub fixed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub x: usize,
    pub eval: AlgoEval,
}

pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.range.is_empty() {
        return Err(Error::Param("sweep range is empty".into()));
    }
    spec.range
        .iter()
        .map(|&x| {
            let (n, budget) = match spec.var {
                SweepVar::N => (x, spec.fixed * x),
                SweepVar::SpaceMultiple => (spec.fixed, x * spec.fixed),
            };
            optimize(spec.algo, spec.arch, n, budget).map(|eval| SweepRow { x, eval })
        })
        .collect()
}

/// Least-squares fit of `y = c x` and its coefficient of determination.
pub fn fit_through_origin(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let c = sxy / sxx;
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - c * x).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    (c, if ss_tot.is_zero() { 1.0 } else { 1.0 - ss_res / ss_tot })
}
