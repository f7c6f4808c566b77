//! Fourier-basis arithmetic: QFT, Draper addition and subtraction, and
//! multiplication by doubly controlled phase rotations.

use crate::circuit_ir::{invert, GateInstr, IrError, PhaseAngle, QReg, Qubit, Tape};
use crate::semantics::ArithOp;

use super::control::controlled;

/// An arithmetic input: a register or a compile-time constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Reg(QReg),
    Const(u64),
}

impl Operand {
    pub fn width(&self) -> usize {
        match self {
            Operand::Reg(r) => r.width,
            Operand::Const(c) => crate::semantics::sizing::bits(*c),
        }
    }
}

/// Widest register the phase ladders support; angles are exact dyadic
/// fractions with 62-bit numerators.
pub const MAX_ARITH_WIDTH: usize = 62;

/// Quantum Fourier transform on a little-endian register, including the
/// final qubit reversal.
pub fn qft_gates(q: &[Qubit]) -> Vec<GateInstr> {
    let n = q.len();
    let mut gates = Vec::new();
    for i in (0..n).rev() {
        gates.push(GateInstr::h(q[i]));
        for j in (0..i).rev() {
            gates.push(GateInstr::cp(PhaseAngle::pi_over_pow2((i - j) as u32), q[j], q[i]));
        }
    }
    for k in 0..n / 2 {
        let (a, b) = (q[k], q[n - 1 - k]);
        gates.push(GateInstr::cx(a, b));
        gates.push(GateInstr::cx(b, a));
        gates.push(GateInstr::cx(a, b));
    }
    gates
}

pub fn iqft_gates(q: &[Qubit]) -> Vec<GateInstr> {
    invert(&qft_gates(q)).expect("the QFT contains no measurement")
}

fn append_all(tape: &mut Tape, gates: Vec<GateInstr>) -> Result<(), IrError> {
    gates.into_iter().try_for_each(|g| tape.append(g))
}

pub fn qft(tape: &mut Tape, q: &[Qubit]) -> Result<(), IrError> {
    append_all(tape, qft_gates(q))
}

pub fn iqft(tape: &mut Tape, q: &[Qubit]) -> Result<(), IrError> {
    append_all(tape, iqft_gates(q))
}

/// `π·c / 2^m` reduced modulo 2π.
fn const_angle(c: u64, m: usize) -> PhaseAngle {
    let modulus = m + 1;
    let num = if modulus >= 64 { c } else { c & ((1u64 << modulus) - 1) };
    PhaseAngle::new(num as i64, m as u32).wrap()
}

fn sign(angle: PhaseAngle, negate: bool) -> PhaseAngle {
    if negate {
        (-angle).wrap()
    } else {
        angle
    }
}

/// Adds (or subtracts) `operand` to the Fourier-encoded register `r`.
fn phase_add(
    tape: &mut Tape,
    ctrl: &[Qubit],
    r: &QReg,
    operand: &Operand,
    negate: bool,
) -> Result<(), IrError> {
    let n = r.width;
    match operand {
        Operand::Reg(x) => {
            for j in 0..x.width {
                for k in 0..n.saturating_sub(j) {
                    let angle = sign(PhaseAngle::pi_over_pow2((n - 1 - j - k) as u32), negate);
                    controlled(tape, ctrl, GateInstr::cp(angle, x.qubit(j), r.qubit(k)))?;
                }
            }
        }
        Operand::Const(c) => {
            for k in 0..n {
                let angle = sign(const_angle(*c, n - 1 - k), negate);
                if !angle.is_zero() {
                    controlled(tape, ctrl, GateInstr::p(angle, r.qubit(k)))?;
                }
            }
        }
    }
    Ok(())
}

/// Adds `a·b` to the Fourier-encoded register `j`.
fn phase_mul(tape: &mut Tape, ctrl: &[Qubit], j: &QReg, a: &Operand, b: &Operand) -> Result<(), IrError> {
    let n = j.width;
    match (a, b) {
        (Operand::Reg(k), Operand::Reg(l)) => {
            for x in 0..k.width {
                for y in 0..l.width {
                    for m in 0..n {
                        if x + y + m >= n {
                            break;
                        }
                        let angle = PhaseAngle::pi_over_pow2((n - 1 - x - y - m) as u32);
                        let mut cs = ctrl.to_vec();
                        cs.push(k.qubit(x));
                        if l.qubit(y) != k.qubit(x) {
                            cs.push(l.qubit(y));
                        }
                        tape.append(GateInstr::controlled_phase(angle, cs, j.qubit(m)))?;
                    }
                }
            }
        }
        (Operand::Reg(k), Operand::Const(c)) | (Operand::Const(c), Operand::Reg(k)) => {
            for x in 0..k.width {
                for m in 0..n {
                    if x + m >= n {
                        break;
                    }
                    let angle = const_angle(*c, n - 1 - x - m);
                    if !angle.is_zero() {
                        controlled(tape, ctrl, GateInstr::cp(angle, k.qubit(x), j.qubit(m)))?;
                    }
                }
            }
        }
        (Operand::Const(x), Operand::Const(y)) => {
            phase_add(tape, ctrl, j, &Operand::Const(x.wrapping_mul(*y)), false)?;
        }
    }
    Ok(())
}

/// Computes `a op b` into the fresh zero register `r`, modulo `2^width(r)`.
/// Only the phase rotations carry the `ctrl` qubits: with the controls off,
/// the Hadamards and the inverse QFT cancel on |0…0⟩.
pub fn arith_into(
    tape: &mut Tape,
    ctrl: &[Qubit],
    op: ArithOp,
    a: &Operand,
    b: &Operand,
    r: &QReg,
) -> Result<(), IrError> {
    if r.width > MAX_ARITH_WIDTH {
        return Err(IrError::MalformedGate(format!(
            "register {} is wider than {MAX_ARITH_WIDTH} qubits",
            r.name
        )));
    }
    let q: Vec<Qubit> = r.qubits().collect();
    for &t in &q {
        tape.append(GateInstr::h(t))?;
    }
    match op {
        ArithOp::Add => {
            phase_add(tape, ctrl, r, a, false)?;
            phase_add(tape, ctrl, r, b, false)?;
        }
        ArithOp::Sub => {
            phase_add(tape, ctrl, r, a, false)?;
            phase_add(tape, ctrl, r, b, true)?;
        }
        ArithOp::Mul => phase_mul(tape, ctrl, r, a, b)?,
    }
    iqft(tape, &q)
}

pub fn add_into(tape: &mut Tape, a: &Operand, b: &Operand, r: &QReg) -> Result<(), IrError> {
    arith_into(tape, &[], ArithOp::Add, a, b, r)
}

pub fn sub_into(tape: &mut Tape, a: &Operand, b: &Operand, r: &QReg) -> Result<(), IrError> {
    arith_into(tape, &[], ArithOp::Sub, a, b, r)
}

pub fn mul_into(tape: &mut Tape, a: &Operand, b: &Operand, r: &QReg) -> Result<(), IrError> {
    arith_into(tape, &[], ArithOp::Mul, a, b, r)
}
