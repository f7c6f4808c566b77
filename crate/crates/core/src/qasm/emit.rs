use std::fmt::Write;

use crate::circuit_ir::{GateInstr, Opcode, PhaseAngle, Tape};

use super::decompose::decompose;
use super::QasmError;

pub const HEADER: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

/// Serializes a sealed tape. Output depends only on the tape.
pub fn emit(tape: &Tape) -> Result<String, QasmError> {
    if !tape.is_sealed() {
        return Err(QasmError::UnsealedTape);
    }
    let mut out = String::from(HEADER);
    for l in tape.layout() {
        let _ = writeln!(out, "qreg {}[{}];", l.name, l.width);
    }
    for c in tape.cregs() {
        let _ = writeln!(out, "creg {}[{}];", c.name, c.width);
    }
    for g in decompose(tape)? {
        statement(tape, &g, &mut out);
    }
    Ok(out)
}

fn statement(tape: &Tape, g: &GateInstr, out: &mut String) {
    let q = |i: usize| tape.qubit_name(g.targets[i]);
    let c = |i: usize| tape.qubit_name(g.controls[i]);
    let angle = || format_angle(g.angle.unwrap_or(PhaseAngle::ZERO).radians());
    let _ = match g.opcode {
        Opcode::H => writeln!(out, "h {};", q(0)),
        Opcode::X => writeln!(out, "x {};", q(0)),
        Opcode::Y => writeln!(out, "y {};", q(0)),
        Opcode::Z => writeln!(out, "z {};", q(0)),
        Opcode::S => writeln!(out, "s {};", q(0)),
        Opcode::T => writeln!(out, "t {};", q(0)),
        Opcode::RX => writeln!(out, "rx({}) {};", angle(), q(0)),
        Opcode::RY => writeln!(out, "ry({}) {};", angle(), q(0)),
        Opcode::RZ => writeln!(out, "rz({}) {};", angle(), q(0)),
        Opcode::P => writeln!(out, "u1({}) {};", angle(), q(0)),
        Opcode::CX => writeln!(out, "cx {},{};", c(0), q(0)),
        Opcode::CZ => writeln!(out, "cz {},{};", c(0), q(0)),
        Opcode::CP => writeln!(out, "cu1({}) {},{};", angle(), c(0), q(0)),
        Opcode::Measure => {
            let creg = &tape.cregs()[g.creg.expect("measure has a creg").0].name;
            for (i, &t) in g.targets.iter().enumerate() {
                let _ = writeln!(out, "measure {} -> {creg}[{i}];", tape.qubit_name(t));
            }
            Ok(())
        }
        Opcode::Barrier => {
            let qs: Vec<String> = g.targets.iter().map(|&t| tape.qubit_name(t)).collect();
            writeln!(out, "barrier {};", qs.join(","))
        }
        Opcode::MCX | Opcode::MCP => unreachable!("decomposed before emission"),
    };
}

/// Shortest decimal that round-trips to `x`, capped at 15 significant
/// digits, never in exponent form.
pub fn format_angle(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let render = |digits: i32| {
        let decimals = (digits - 1 - magnitude).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    (1..15)
        .map(render)
        .find(|s| s.parse::<f64>() == Ok(x))
        .unwrap_or_else(|| render(15))
}
