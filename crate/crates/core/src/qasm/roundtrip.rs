use std::collections::HashMap;

use crate::circuit_ir::{CReg, CregId, GateInstr, Opcode, PhaseAngle, Qubit, RegEntry, RegId, RegKind, Tape};

use super::emit::emit;
use super::reader::{read, QubitRef, Statement};
use super::QasmError;

fn mismatch(line: usize, message: impl Into<String>) -> QasmError {
    QasmError::ParseMismatch {
        line,
        message: message.into(),
    }
}

/// `ancillaN` and `cmpN` are pool registers; everything else is a user
/// register.
fn kind_of(name: &str) -> (RegKind, Option<usize>) {
    for (prefix, kind) in [("ancilla", RegKind::Ancilla), ("cmp", RegKind::Cmp)] {
        if let Some(digits) = name.strip_prefix(prefix) {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                if let Ok(n) = digits.parse() {
                    return (kind, Some(n));
                }
            }
        }
    }
    (RegKind::User, None)
}

/// Parses emitted text back into a sealed tape and checks that re-emitting
/// it reproduces the text exactly.
pub fn validate_roundtrip(text: &str) -> Result<Tape, QasmError> {
    let stmts = read(text).map_err(|e| match e {
        super::ReadError::Syntax { line, message } => mismatch(line, message),
    })?;
    let mut regs = Vec::new();
    let mut qindex: HashMap<String, (usize, usize)> = HashMap::new();
    let mut cregs = Vec::new();
    let mut cindex: HashMap<String, (usize, usize)> = HashMap::new();
    let mut instrs: Vec<GateInstr> = Vec::new();

    for (line, stmt) in stmts {
        let qubit = |r: &QubitRef| -> Result<Qubit, QasmError> {
            let &(id, width) = qindex
                .get(&r.reg)
                .ok_or_else(|| mismatch(line, format!("undeclared register `{}`", r.reg)))?;
            if r.index >= width {
                return Err(mismatch(line, format!("`{}[{}]` out of range", r.reg, r.index)));
            }
            Ok(Qubit::new(RegId(id), r.index))
        };
        match stmt {
            Statement::Header | Statement::Include(_) => {}
            Statement::Qreg { name, size } => {
                let (kind, pool_index) = kind_of(&name);
                qindex.insert(name.clone(), (regs.len(), size));
                regs.push(RegEntry {
                    name,
                    width: size,
                    kind,
                    pool_index,
                    live: true,
                });
            }
            Statement::Creg { name, size } => {
                cindex.insert(name.clone(), (cregs.len(), size));
                cregs.push(CReg { name, width: size });
            }
            Statement::Measure { qubit: q, bit } => {
                let q = qubit(&q)?;
                let &(c, _) = cindex
                    .get(&bit.reg)
                    .ok_or_else(|| mismatch(line, format!("undeclared creg `{}`", bit.reg)))?;
                // Per-qubit measures of one register fold into a single instruction.
                match instrs.last_mut() {
                    Some(g)
                        if g.opcode == Opcode::Measure
                            && g.creg == Some(CregId(c))
                            && g.targets.len() == bit.index
                            && g.targets[0].reg == q.reg =>
                    {
                        g.targets.push(q)
                    }
                    _ if bit.index == 0 => instrs.push(GateInstr::measure(vec![q], CregId(c))),
                    _ => return Err(mismatch(line, "measurement out of order")),
                }
            }
            Statement::Barrier(args) => {
                let qs = args.iter().map(&qubit).collect::<Result<Vec<_>, _>>()?;
                instrs.push(GateInstr::barrier(qs));
            }
            Statement::Gate { name, params, args } => {
                let qs = args.iter().map(&qubit).collect::<Result<Vec<_>, _>>()?;
                let angle = || -> Result<PhaseAngle, QasmError> {
                    match params.as_slice() {
                        [x] => PhaseAngle::from_radians(*x)
                            .ok_or_else(|| mismatch(line, format!("angle {x} is not a dyadic multiple of pi"))),
                        _ => Err(mismatch(line, format!("`{name}` takes one parameter"))),
                    }
                };
                let arity = |n: usize| -> Result<(), QasmError> {
                    if qs.len() == n {
                        Ok(())
                    } else {
                        Err(mismatch(line, format!("`{name}` takes {n} qubits")))
                    }
                };
                let unparameterized = |g: GateInstr| -> Result<GateInstr, QasmError> {
                    if params.is_empty() {
                        Ok(g)
                    } else {
                        Err(mismatch(line, format!("`{name}` takes no parameters")))
                    }
                };
                let g = match name.as_str() {
                    "h" | "x" | "y" | "z" | "s" | "t" => {
                        arity(1)?;
                        unparameterized(match name.as_str() {
                            "h" => GateInstr::h(qs[0]),
                            "x" => GateInstr::x(qs[0]),
                            "y" => GateInstr::y(qs[0]),
                            "z" => GateInstr::z(qs[0]),
                            "s" => GateInstr::s(qs[0]),
                            _ => GateInstr::t(qs[0]),
                        })?
                    }
                    "rx" | "ry" | "rz" | "u1" => {
                        arity(1)?;
                        let op = match name.as_str() {
                            "rx" => Opcode::RX,
                            "ry" => Opcode::RY,
                            "rz" => Opcode::RZ,
                            _ => Opcode::P,
                        };
                        if op == Opcode::P {
                            GateInstr::p(angle()?, qs[0])
                        } else {
                            GateInstr::rotation(op, angle()?, qs[0])
                        }
                    }
                    "cx" => {
                        arity(2)?;
                        unparameterized(GateInstr::cx(qs[0], qs[1]))?
                    }
                    "cz" => {
                        arity(2)?;
                        unparameterized(GateInstr::cz(qs[0], qs[1]))?
                    }
                    "cu1" => {
                        arity(2)?;
                        GateInstr::cp(angle()?, qs[0], qs[1])
                    }
                    other => return Err(mismatch(line, format!("unknown gate `{other}`"))),
                };
                g.validate().map_err(|e| mismatch(line, e.to_string()))?;
                instrs.push(g);
            }
        }
    }

    let tape = Tape::from_parts(regs, cregs, instrs);
    let again = emit(&tape)?;
    if again != text {
        let line = again
            .lines()
            .zip(text.lines())
            .position(|(a, b)| a != b)
            .unwrap_or_else(|| again.lines().count().min(text.lines().count()))
            + 1;
        return Err(mismatch(line, "re-emitted text differs"));
    }
    Ok(tape)
}
