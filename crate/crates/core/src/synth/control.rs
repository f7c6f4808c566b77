//! Controlled-gate promotion, phase marking, diffusion and comparators.

use crate::circuit_ir::{GateInstr, IrError, Opcode, PhaseAngle, QReg, Qubit, RegKind, Tape};
use crate::semantics::{ArithOp, RelOp};

use super::arith::{arith_into, Operand};

/// Appends `gate` with every qubit of `ctrl` added as a control.
///
/// `gate` is a single-target gate, optionally with its own controls
/// (CX, CZ, CP and their multi-controlled forms).
pub fn controlled(tape: &mut Tape, ctrl: &[Qubit], gate: GateInstr) -> Result<(), IrError> {
    if ctrl.is_empty() {
        return tape.append(gate);
    }
    let t = gate.targets[0];
    let mut cs = ctrl.to_vec();
    cs.extend(gate.controls.iter().copied());
    let angle = gate.angle.unwrap_or(PhaseAngle::ZERO);
    let half_pi = PhaseAngle::pi_over_pow2(1);
    match gate.opcode {
        Opcode::X | Opcode::CX | Opcode::MCX => tape.append(GateInstr::controlled_x(cs, t)),
        Opcode::Z | Opcode::CZ => tape.append(GateInstr::controlled_phase(PhaseAngle::PI, cs, t)),
        Opcode::S => tape.append(GateInstr::controlled_phase(half_pi, cs, t)),
        Opcode::T => tape.append(GateInstr::controlled_phase(PhaseAngle::pi_over_pow2(2), cs, t)),
        Opcode::P | Opcode::CP | Opcode::MCP => {
            tape.append(GateInstr::controlled_phase(angle, cs, t))
        }
        Opcode::Y => {
            tape.append(GateInstr::p(-half_pi, t))?;
            tape.append(GateInstr::controlled_x(cs, t))?;
            tape.append(GateInstr::p(half_pi, t))
        }
        Opcode::H => {
            let quarter = PhaseAngle::pi_over_pow2(2);
            tape.append(GateInstr::rotation(Opcode::RY, -quarter, t))?;
            tape.append(GateInstr::controlled_phase(PhaseAngle::PI, cs, t))?;
            tape.append(GateInstr::rotation(Opcode::RY, quarter, t))
        }
        Opcode::RZ => controlled_rz(tape, cs, angle, t),
        Opcode::RX => {
            tape.append(GateInstr::h(t))?;
            controlled_rz(tape, cs, angle, t)?;
            tape.append(GateInstr::h(t))
        }
        Opcode::RY => {
            tape.append(GateInstr::p(-half_pi, t))?;
            tape.append(GateInstr::h(t))?;
            controlled_rz(tape, cs, angle, t)?;
            tape.append(GateInstr::h(t))?;
            tape.append(GateInstr::p(half_pi, t))
        }
        Opcode::Measure | Opcode::Barrier => Err(IrError::MalformedGate(format!(
            "{} cannot be controlled",
            gate.opcode.name()
        ))),
    }
}

/// RZ(θ) = e^{-iθ/2}·P(θ); under control the global factor becomes a phase
/// on the last control.
fn controlled_rz(tape: &mut Tape, cs: Vec<Qubit>, angle: PhaseAngle, t: Qubit) -> Result<(), IrError> {
    let (&last, rest) = cs.split_last().expect("at least one control");
    let rest = rest.to_vec();
    tape.append(GateInstr::controlled_phase(angle, cs, t))?;
    tape.append(GateInstr::controlled_phase(-angle.half(), rest, last))
}

/// Applies e^{iθ} to the states where every qubit of `ctx` is 1: P(θ) on
/// the innermost qubit, controlled by the others.
pub fn mark(tape: &mut Tape, ctx: &[Qubit], angle: PhaseAngle) -> Result<(), IrError> {
    let Some((&last, rest)) = ctx.split_last() else {
        return Err(IrError::MalformedGate("mark needs a condition qubit".into()));
    };
    let angle = angle.wrap();
    if angle.is_zero() {
        return Ok(());
    }
    if rest.is_empty() && angle == PhaseAngle::PI {
        return tape.append(GateInstr::z(last));
    }
    tape.append(GateInstr::controlled_phase(angle, rest.to_vec(), last))
}

/// Reflection about the uniform superposition, up to a global phase.
pub fn diffusion(tape: &mut Tape, reg: &QReg) -> Result<(), IrError> {
    let q: Vec<Qubit> = reg.qubits().collect();
    for &t in &q {
        tape.append(GateInstr::h(t))?;
    }
    for &t in &q {
        tape.append(GateInstr::x(t))?;
    }
    let (&last, rest) = q.split_last().expect("registers are nonempty");
    if rest.is_empty() {
        tape.append(GateInstr::z(last))?;
    } else {
        tape.append(GateInstr::controlled_phase(PhaseAngle::PI, rest.to_vec(), last))?;
    }
    for &t in &q {
        tape.append(GateInstr::x(t))?;
    }
    for &t in &q {
        tape.append(GateInstr::h(t))?;
    }
    Ok(())
}

/// Uniform superposition over `0..value` (a power of two) on a zero register.
pub fn super_init(tape: &mut Tape, ctrl: &[Qubit], reg: &QReg, value: u64) -> Result<(), IrError> {
    debug_assert!(value.is_power_of_two());
    for i in 0..value.trailing_zeros() as usize {
        controlled(tape, ctrl, GateInstr::h(reg.qubit(i)))?;
    }
    Ok(())
}

/// Width of the difference register used by the order comparators.
pub fn compare_width(a: &Operand, b: &Operand) -> usize {
    a.width().max(b.width()) + 1
}

/// Allocates a `cmpX` qubit and sets it to `a op b`. Scratch registers are
/// uncomputed before returning; the operands are left unchanged.
pub fn compare(tape: &mut Tape, op: RelOp, a: &Operand, b: &Operand) -> Result<QReg, IrError> {
    let cmp = tape.alloc(1, RegKind::Cmp)?;
    let out = cmp.qubit(0);
    match op {
        RelOp::Lt | RelOp::Gt | RelOp::Le | RelOp::Ge => {
            let (x, y) = if matches!(op, RelOp::Lt | RelOp::Ge) { (a, b) } else { (b, a) };
            let w = compare_width(a, b);
            let scope = tape.begin_scope();
            let d = tape.alloc(w, RegKind::Ancilla)?;
            arith_into(tape, &[], ArithOp::Sub, x, y, &d)?;
            tape.end_compute(scope)?;
            tape.append(GateInstr::cx(d.qubit(w - 1), out))?;
            tape.uncompute_scope(scope, &[])?;
            if matches!(op, RelOp::Le | RelOp::Ge) {
                tape.append(GateInstr::x(out))?;
            }
        }
        RelOp::Eq | RelOp::Ne => {
            equality(tape, a, b, out)?;
            if op == RelOp::Ne {
                tape.append(GateInstr::x(out))?;
            }
        }
    }
    Ok(cmp)
}

fn equality(tape: &mut Tape, a: &Operand, b: &Operand, out: Qubit) -> Result<(), IrError> {
    match (a, b) {
        (Operand::Const(x), Operand::Const(y)) => {
            if x == y {
                tape.append(GateInstr::x(out))?;
            }
        }
        (Operand::Reg(r), Operand::Const(c)) | (Operand::Const(c), Operand::Reg(r)) => {
            if r.width < 64 && c >> r.width != 0 {
                return Ok(());
            }
            let zeros: Vec<Qubit> = (0..r.width)
                .filter(|i| c >> i & 1 == 0)
                .map(|i| r.qubit(i))
                .collect();
            for &q in &zeros {
                tape.append(GateInstr::x(q))?;
            }
            tape.append(GateInstr::controlled_x(r.qubits().collect(), out))?;
            for &q in zeros.iter().rev() {
                tape.append(GateInstr::x(q))?;
            }
        }
        (Operand::Reg(x), Operand::Reg(y)) => {
            let w = x.width.max(y.width);
            let scope = tape.begin_scope();
            let t = tape.alloc(w, RegKind::Ancilla)?;
            for (i, q) in x.qubits().enumerate() {
                tape.append(GateInstr::cx(q, t.qubit(i)))?;
            }
            for (i, q) in y.qubits().enumerate() {
                tape.append(GateInstr::cx(q, t.qubit(i)))?;
            }
            for q in t.qubits() {
                tape.append(GateInstr::x(q))?;
            }
            tape.end_compute(scope)?;
            tape.append(GateInstr::controlled_x(t.qubits().collect(), out))?;
            tape.uncompute_scope(scope, &[])?;
        }
    }
    Ok(())
}

/// Allocates a `cmpX` qubit holding `a AND b`.
pub fn and(tape: &mut Tape, a: Qubit, b: Qubit) -> Result<QReg, IrError> {
    let cmp = tape.alloc(1, RegKind::Cmp)?;
    tape.append(GateInstr::controlled_x(vec![a, b], cmp.qubit(0)))?;
    Ok(cmp)
}

/// Allocates a `cmpX` qubit holding `a OR b`.
pub fn or(tape: &mut Tape, a: Qubit, b: Qubit) -> Result<QReg, IrError> {
    let cmp = tape.alloc(1, RegKind::Cmp)?;
    let out = cmp.qubit(0);
    tape.append(GateInstr::x(a))?;
    tape.append(GateInstr::x(b))?;
    tape.append(GateInstr::controlled_x(vec![a, b], out))?;
    tape.append(GateInstr::x(a))?;
    tape.append(GateInstr::x(b))?;
    tape.append(GateInstr::x(out))?;
    Ok(cmp)
}
