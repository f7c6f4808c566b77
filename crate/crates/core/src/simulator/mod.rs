//! Statevector execution of emitted OpenQASM 2.0.
//!
//! Qubits are numbered by register declaration order, little-endian within
//! each register; global qubit `k` is bit `k` of the basis index.
//! Measurements are terminal: [`measure_all`] marginalizes the final state
//! onto the classical registers. Sampling draws from `ChaCha8Rng` seeded
//! with `seed_from_u64(seed)`.

mod state;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::qasm::{read, QubitRef, ReadError, Statement};

pub use state::{gate_matrix, Matrix2, StateVector};

/// Largest circuit the simulator will allocate.
pub const MAX_QUBITS: usize = 26;

/// Probabilities below this are left out of reports.
const REPORT_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("line {line}: unsupported gate `{name}`")]
    UnsupportedGate { line: usize, name: String },
    #[error("line {line}: undeclared register `{name}`")]
    UndeclaredRegister { line: usize, name: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: `{register}[{index}]` is out of range")]
    QubitOutOfRange {
        line: usize,
        register: String,
        index: usize,
    },
    #[error("line {line}: gate acts on a qubit that was already measured")]
    MidCircuitMeasurement { line: usize },
    #[error("circuit needs {0} qubits, more than the supported {MAX_QUBITS}")]
    TooManyQubits(usize),
}

impl SimError {
    pub fn code(&self) -> &'static str {
        match self {
            SimError::UnsupportedGate { .. } => "UnsupportedGate",
            SimError::UndeclaredRegister { .. } => "UndeclaredRegister",
            SimError::Syntax { .. } => "SyntaxError",
            SimError::QubitOutOfRange { .. } => "QubitOutOfRange",
            SimError::MidCircuitMeasurement { .. } => "MidCircuitMeasurement",
            SimError::TooManyQubits(_) => "TooManyQubits",
        }
    }
}

/// Gates the simulator executes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimGate {
    H,
    X,
    Y,
    Z,
    S,
    T,
    RX(f64),
    RY(f64),
    RZ(f64),
    U1(f64),
}

/// A single-target gate with optional controls, on global qubit indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Op {
    pub gate: SimGate,
    pub controls: Vec<usize>,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub base: usize,
    pub width: usize,
}

/// A loaded circuit bound to global qubit indices.
#[derive(Debug, Clone, Default)]
pub struct Circuit {
    qregs: Vec<Register>,
    cregs: Vec<Register>,
    ops: Vec<Op>,
    /// `(qubit, creg index, bit)` for every measurement.
    measurements: Vec<(usize, usize, usize)>,
    num_qubits: usize,
}

impl Circuit {
    pub fn load(text: &str) -> Result<Self, SimError> {
        let stmts = read(text).map_err(|e| match e {
            ReadError::Syntax { line, message } => SimError::Syntax { line, message },
        })?;
        let mut c = Circuit::default();
        let mut measured = vec![false; 0];
        for (line, stmt) in stmts {
            match stmt {
                Statement::Header | Statement::Include(_) => {}
                Statement::Qreg { name, size } => {
                    c.qregs.push(Register {
                        name,
                        base: c.num_qubits,
                        width: size,
                    });
                    c.num_qubits += size;
                    if c.num_qubits > MAX_QUBITS {
                        return Err(SimError::TooManyQubits(c.num_qubits));
                    }
                    measured.resize(c.num_qubits, false);
                }
                Statement::Creg { name, size } => c.cregs.push(Register {
                    name,
                    base: 0,
                    width: size,
                }),
                Statement::Measure { qubit, bit } => {
                    let q = resolve(&c.qregs, &qubit, line)?;
                    let creg = c
                        .cregs
                        .iter()
                        .position(|r| r.name == bit.reg)
                        .ok_or_else(|| SimError::UndeclaredRegister {
                            line,
                            name: bit.reg.clone(),
                        })?;
                    if bit.index >= c.cregs[creg].width {
                        return Err(SimError::QubitOutOfRange {
                            line,
                            register: bit.reg,
                            index: bit.index,
                        });
                    }
                    measured[q] = true;
                    c.measurements.push((q, creg, bit.index));
                }
                Statement::Barrier(args) => {
                    for a in &args {
                        resolve(&c.qregs, a, line)?;
                    }
                }
                Statement::Gate { name, params, args } => {
                    let qs = args
                        .iter()
                        .map(|a| resolve(&c.qregs, a, line))
                        .collect::<Result<Vec<_>, _>>()?;
                    let op = gate_op(&name, &params, &qs, line)?;
                    if qs.iter().any(|&q| measured[q]) {
                        return Err(SimError::MidCircuitMeasurement { line });
                    }
                    c.ops.push(op);
                }
            }
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn gate_count(&self) -> usize {
        self.ops.len()
    }

    pub fn qregs(&self) -> &[Register] {
        &self.qregs
    }

    pub fn cregs(&self) -> &[Register] {
        &self.cregs
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.qregs.iter().find(|r| r.name == name)
    }

    /// Global indices of the qubits in `ancillaN` and `cmpN` registers.
    pub fn pool_qubits(&self) -> Vec<usize> {
        let is_pool = |name: &str| {
            ["ancilla", "cmp"].iter().any(|p| {
                name.strip_prefix(p)
                    .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            })
        };
        self.qregs
            .iter()
            .filter(|r| is_pool(&r.name))
            .flat_map(|r| r.base..r.base + r.width)
            .collect()
    }
}

fn resolve(qregs: &[Register], r: &QubitRef, line: usize) -> Result<usize, SimError> {
    let reg = qregs
        .iter()
        .find(|q| q.name == r.reg)
        .ok_or_else(|| SimError::UndeclaredRegister {
            line,
            name: r.reg.clone(),
        })?;
    if r.index >= reg.width {
        return Err(SimError::QubitOutOfRange {
            line,
            register: r.reg.clone(),
            index: r.index,
        });
    }
    Ok(reg.base + r.index)
}

fn gate_op(name: &str, params: &[f64], qs: &[usize], line: usize) -> Result<Op, SimError> {
    let syntax = |message: String| SimError::Syntax { line, message };
    let (gate, arity) = match (name, params) {
        ("h", []) => (SimGate::H, 1),
        ("x", []) => (SimGate::X, 1),
        ("y", []) => (SimGate::Y, 1),
        ("z", []) => (SimGate::Z, 1),
        ("s", []) => (SimGate::S, 1),
        ("t", []) => (SimGate::T, 1),
        ("rx", [a]) => (SimGate::RX(*a), 1),
        ("ry", [a]) => (SimGate::RY(*a), 1),
        ("rz", [a]) => (SimGate::RZ(*a), 1),
        ("u1", [a]) => (SimGate::U1(*a), 1),
        ("cx", []) => (SimGate::X, 2),
        ("cz", []) => (SimGate::Z, 2),
        ("cu1", [a]) => (SimGate::U1(*a), 2),
        ("h" | "x" | "y" | "z" | "s" | "t" | "rx" | "ry" | "rz" | "u1" | "cx" | "cz" | "cu1", _) => {
            return Err(syntax(format!("wrong number of parameters for `{name}`")))
        }
        _ => {
            return Err(SimError::UnsupportedGate {
                line,
                name: name.to_string(),
            })
        }
    };
    if qs.len() != arity {
        return Err(syntax(format!("`{name}` takes {arity} qubit(s), got {}", qs.len())));
    }
    if arity == 2 && qs[0] == qs[1] {
        return Err(syntax(format!("`{name}` operands coincide")));
    }
    Ok(Op {
        gate,
        controls: qs[..arity - 1].to_vec(),
        target: qs[arity - 1],
    })
}

/// Runs `circuit` from |0…0⟩, or from the given basis state.
pub fn run(circuit: &Circuit, initial: Option<usize>) -> StateVector {
    let mut s = StateVector::basis(circuit.num_qubits, initial.unwrap_or(0));
    for op in &circuit.ops {
        s.apply(op);
    }
    s
}

/// Like [`run`], also returning the largest `|‖ψ‖² − 1|` seen after any gate.
pub fn run_traced(circuit: &Circuit, initial: Option<usize>) -> (StateVector, f64) {
    let mut s = StateVector::basis(circuit.num_qubits, initial.unwrap_or(0));
    let mut worst = (s.norm_sqr() - 1.0).abs();
    for op in &circuit.ops {
        s.apply(op);
        worst = worst.max((s.norm_sqr() - 1.0).abs());
    }
    (s, worst)
}

/// Measurement outcomes keyed by bitstring.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub probabilities: BTreeMap<String, f64>,
    pub counts: Option<BTreeMap<String, u64>>,
    pub shots: u64,
    pub seed: u64,
}

impl Distribution {
    pub fn probability(&self, outcome: &str) -> f64 {
        self.probabilities.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn count(&self, outcome: &str) -> u64 {
        self.counts
            .as_ref()
            .and_then(|c| c.get(outcome).copied())
            .unwrap_or(0)
    }

    /// One `bitstring probability [count]` line per outcome, sorted by
    /// bitstring.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for (bits, p) in &self.probabilities {
            let _ = write!(out, "{bits} {p:.9}");
            if self.counts.is_some() {
                let _ = write!(out, " {}", self.count(bits));
            }
            out.push('\n');
        }
        out
    }
}

/// Outcome string of a basis state: each classical register MSB first,
/// registers in declaration order separated by spaces. Without
/// measurements, every qubit is read, highest index first.
fn outcome(circuit: &Circuit, basis: usize) -> String {
    if circuit.measurements.is_empty() {
        return (0..circuit.num_qubits)
            .rev()
            .map(|q| if basis >> q & 1 == 1 { '1' } else { '0' })
            .collect();
    }
    let mut bits: Vec<Vec<char>> = circuit.cregs.iter().map(|r| vec!['0'; r.width]).collect();
    for &(q, c, b) in &circuit.measurements {
        let w = bits[c].len();
        bits[c][w - 1 - b] = if basis >> q & 1 == 1 { '1' } else { '0' };
    }
    bits.iter()
        .map(|b| b.iter().collect::<String>())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Exact outcome probabilities, plus `shots` samples when `shots > 0`.
pub fn measure_all(circuit: &Circuit, state: &StateVector, shots: u64, seed: u64) -> Distribution {
    let mut probabilities: BTreeMap<String, f64> = BTreeMap::new();
    for (i, a) in state.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        if p > 0.0 {
            *probabilities.entry(outcome(circuit, i)).or_default() += p;
        }
    }
    probabilities.retain(|_, p| *p >= REPORT_FLOOR);

    let counts = (shots > 0).then(|| {
        let total: f64 = probabilities.values().sum();
        let mut cumulative = Vec::with_capacity(probabilities.len());
        let mut acc = 0.0;
        for p in probabilities.values() {
            acc += p / total;
            cumulative.push(acc);
        }
        let keys: Vec<&String> = probabilities.keys().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts: BTreeMap<String, u64> = keys.iter().map(|k| ((*k).clone(), 0)).collect();
        for _ in 0..shots {
            let u: f64 = rng.random();
            let i = cumulative
                .partition_point(|&c| c <= u)
                .min(keys.len() - 1);
            *counts.get_mut(keys[i]).expect("key exists") += 1;
        }
        counts
    });

    Distribution {
        probabilities,
        counts,
        shots,
        seed,
    }
}

/// True iff the probability that any of `qubits` reads 1 is below `tol`.
pub fn assert_ancilla_clean(state: &StateVector, qubits: &[usize], tol: f64) -> bool {
    let mask = qubits.iter().fold(0usize, |m, &q| m | 1 << q);
    let dirty: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| i & mask != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    dirty < tol
}

/// Probability of each value of a register, keyed by value.
pub fn register_distribution(circuit: &Circuit, state: &StateVector, name: &str) -> Option<HashMap<u64, f64>> {
    let r = circuit.register(name)?;
    let mut out = HashMap::new();
    for (i, a) in state.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        if p > 0.0 {
            let v = ((i >> r.base) & ((1usize << r.width) - 1)) as u64;
            *out.entry(v).or_default() += p;
        }
    }
    Some(out)
}

/// Amplitude of the basis state with each named register at the given value
/// and every other qubit 0.
pub fn amplitude_of(circuit: &Circuit, state: &StateVector, values: &[(&str, u64)]) -> Option<Complex64> {
    let mut index = 0usize;
    for (name, v) in values {
        let r = circuit.register(name)?;
        index |= (*v as usize) << r.base;
    }
    state.amplitudes().get(index).copied()
}
