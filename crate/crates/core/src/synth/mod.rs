//! Circuit construction: turns a lowered program into an instruction tape.
//!
//! Temporaries live in `ancillaX` registers and condition results in
//! `cmpX` registers; both are computed inside tape scopes and uncomputed
//! as soon as the statement or conditional that needed them ends.

mod arith;
mod control;

use std::collections::{HashMap, HashSet};
use std::ops::Range;

pub use arith::{
    add_into, arith_into, iqft, iqft_gates, mul_into, qft, qft_gates, sub_into, Operand,
    MAX_ARITH_WIDTH,
};
pub use control::{and, compare, compare_width, controlled, diffusion, mark, or, super_init};

use crate::circuit_ir::{GateInstr, IrError, Opcode, PhaseAngle, QReg, Qubit, RegKind, Tape};
use crate::frontend::ast::GateName;
use crate::semantics::sizing::range;
use crate::semantics::{LStmt, LoweredProgram, QCond, QExpr, SymId};

/// Grover search parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthOptions {
    /// Assumed number of solutions M.
    pub grover_solutions: u64,
    /// Overrides the iteration count derived from N and M.
    pub grover_iterations: Option<u64>,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            grover_solutions: 1,
            grover_iterations: None,
        }
    }
}

/// `max(1, round(π/4·√(N/M)))`.
pub fn grover_iterations(states: u64, solutions: u64) -> u64 {
    let ratio = states as f64 / solutions.max(1) as f64;
    ((std::f64::consts::FRAC_PI_4 * ratio.sqrt()).round() as u64).max(1)
}

/// Builds and seals the tape for `program`.
pub fn synthesize(program: &LoweredProgram, options: &SynthOptions) -> Result<Tape, IrError> {
    let mut s = Synth {
        program,
        options: *options,
        tape: Tape::new(),
        regs: HashMap::new(),
        ranges: HashMap::new(),
        ctrl: Vec::new(),
        taken: program.symbols.iter().map(|(_, e)| e.name.clone()).collect(),
    };
    s.block(&program.body)?;
    let mut tape = s.tape;
    tape.seal()?;
    Ok(tape)
}

/// Name given to the `n`-th extra instance of a register re-created while
/// it is still live (an oracle body repeated by `filter`).
pub(crate) fn instance_name(base: &str, n: usize) -> String {
    format!("{base}_i{n}")
}

struct Synth<'a> {
    program: &'a LoweredProgram,
    options: SynthOptions,
    tape: Tape,
    regs: HashMap<SymId, QReg>,
    /// Tape range of the latest computation of each computed register.
    ranges: HashMap<SymId, Range<usize>>,
    /// Condition qubits of the enclosing quantum conditionals.
    ctrl: Vec<Qubit>,
    taken: HashSet<String>,
}

impl Synth<'_> {
    fn reg(&self, sym: SymId) -> Result<QReg, IrError> {
        self.regs.get(&sym).cloned().ok_or_else(|| {
            IrError::MalformedGate(format!(
                "register `{}` used before it is created",
                self.program.symbols.get(sym).name
            ))
        })
    }

    /// Register for a symbol being (re)created.
    fn user_reg(&mut self, sym: SymId) -> Result<QReg, IrError> {
        let entry = self.program.symbols.get(sym);
        let width = self.program.symbols.width(sym);
        if let Some(r) = self.regs.get(&sym) {
            if !self.tape.is_live(r.id) {
                self.tape.revive(r.id);
                return Ok(r.clone());
            }
        }
        let name = if self.regs.contains_key(&sym) {
            let mut n = 1;
            while self.taken.contains(&instance_name(&entry.name, n)) {
                n += 1;
            }
            instance_name(&entry.name, n)
        } else {
            entry.name.clone()
        };
        self.taken.insert(name.clone());
        let r = self.tape.alloc_user(&name, width)?;
        self.regs.insert(sym, r.clone());
        Ok(r)
    }

    fn emit(&mut self, gate: GateInstr) -> Result<(), IrError> {
        controlled(&mut self.tape, &self.ctrl, gate)
    }

    fn block(&mut self, body: &[LStmt]) -> Result<(), IrError> {
        body.iter().try_for_each(|s| self.stmt(s))
    }

    fn stmt(&mut self, stmt: &LStmt) -> Result<(), IrError> {
        match stmt {
            LStmt::Superpose { sym, value } => {
                let r = self.user_reg(*sym)?;
                super_init(&mut self.tape, &self.ctrl, &r, *value)
            }
            LStmt::Compute { sym, expr } => {
                let start = self.tape.len();
                let r = self.user_reg(*sym)?;
                self.compute_into(expr, &r)?;
                self.ranges.insert(*sym, start..self.tape.len());
                Ok(())
            }
            LStmt::Gate {
                gate,
                operands,
                angle,
            } => self.gate(*gate, operands, *angle),
            LStmt::If { arms, otherwise } => self.conditional(arms, otherwise.as_deref()),
            LStmt::Mark { angle, .. } => mark(&mut self.tape, &self.ctrl, *angle),
            LStmt::Filter { body, register, .. } => {
                let r = self.reg(*register)?;
                let k = self.options.grover_iterations.unwrap_or_else(|| {
                    let states = 1u64.checked_shl(r.width as u32).unwrap_or(u64::MAX);
                    grover_iterations(states, self.options.grover_solutions)
                });
                for _ in 0..k {
                    self.block(body)?;
                    diffusion(&mut self.tape, &r)?;
                }
                Ok(())
            }
            LStmt::Measure { sym, name } => {
                let r = self.reg(*sym)?;
                let creg = self.tape.declare_creg(name, r.width)?;
                self.tape.append(GateInstr::measure(r.qubits().collect(), creg))
            }
            LStmt::Scope { body, release, .. } => {
                self.block(body)?;
                for sym in release {
                    let r = self.reg(*sym)?;
                    let span = self.ranges.get(sym).cloned().ok_or_else(|| {
                        IrError::MalformedGate(format!("`{}` was never computed", r.name))
                    })?;
                    self.tape.append_inverse_of(span)?;
                    self.tape.release(r.id);
                }
                Ok(())
            }
        }
    }

    fn gate(&mut self, gate: GateName, operands: &[SymId], angle: Option<PhaseAngle>) -> Result<(), IrError> {
        let regs = operands
            .iter()
            .map(|s| self.reg(*s))
            .collect::<Result<Vec<_>, _>>()?;
        let theta = angle.unwrap_or(PhaseAngle::ZERO);
        for i in 0..regs[0].width {
            let a = regs[0].qubit(i);
            let g = match gate {
                GateName::H => GateInstr::h(a),
                GateName::X => GateInstr::x(a),
                GateName::Y => GateInstr::y(a),
                GateName::Z => GateInstr::z(a),
                GateName::S => GateInstr::s(a),
                GateName::T => GateInstr::t(a),
                GateName::P => GateInstr::p(theta, a),
                GateName::RX => GateInstr::rotation(Opcode::RX, theta, a),
                GateName::RY => GateInstr::rotation(Opcode::RY, theta, a),
                GateName::RZ => GateInstr::rotation(Opcode::RZ, theta, a),
                GateName::CX => GateInstr::cx(a, regs[1].qubit(i)),
                GateName::CZ => GateInstr::cz(a, regs[1].qubit(i)),
                GateName::CP => GateInstr::cp(theta, a, regs[1].qubit(i)),
            };
            self.emit(g)?;
        }
        Ok(())
    }

    /// Materializes an expression: registers and constants are used as is,
    /// compound expressions are computed into a fresh ancilla register.
    /// Runs uncontrolled; callers uncompute it in a scope.
    fn mat(&mut self, e: &QExpr) -> Result<Operand, IrError> {
        match e {
            QExpr::Sym(s) => Ok(Operand::Reg(self.reg(*s)?)),
            QExpr::Const(c) => Ok(Operand::Const(*c)),
            QExpr::Bin(op, a, b) => {
                let width = range(e, &self.program.symbols).width;
                let scope = self.tape.begin_scope();
                let oa = self.mat(a)?;
                let ob = self.mat(b)?;
                self.tape.end_compute(scope)?;
                let t = self.tape.alloc(width, RegKind::Ancilla)?;
                arith_into(&mut self.tape, &[], *op, &oa, &ob, &t)?;
                self.tape.uncompute_scope(scope, &[t.id])?;
                Ok(Operand::Reg(t))
            }
        }
    }

    fn compute_into(&mut self, e: &QExpr, r: &QReg) -> Result<(), IrError> {
        match e {
            QExpr::Sym(s) => {
                let src = self.reg(*s)?;
                for i in 0..src.width.min(r.width) {
                    self.emit(GateInstr::cx(src.qubit(i), r.qubit(i)))?;
                }
                Ok(())
            }
            QExpr::Const(c) => {
                for i in (0..r.width).filter(|i| c >> i & 1 == 1) {
                    self.emit(GateInstr::x(r.qubit(i)))?;
                }
                Ok(())
            }
            QExpr::Bin(op, a, b) => {
                let scope = self.tape.begin_scope();
                let oa = self.mat(a)?;
                let ob = self.mat(b)?;
                self.tape.end_compute(scope)?;
                arith_into(&mut self.tape, &self.ctrl, *op, &oa, &ob, r)?;
                self.tape.uncompute_scope(scope, &[])
            }
        }
    }

    /// Computes a condition into a fresh `cmpX` qubit, uncontrolled.
    fn condition(&mut self, c: &QCond) -> Result<Qubit, IrError> {
        let cmp = match c {
            QCond::Compare { op, lhs, rhs } => {
                let scope = self.tape.begin_scope();
                let a = self.mat(lhs)?;
                let b = self.mat(rhs)?;
                self.tape.end_compute(scope)?;
                let cmp = compare(&mut self.tape, *op, &a, &b)?;
                self.tape.uncompute_scope(scope, &[cmp.id])?;
                cmp
            }
            QCond::And(x, y) => {
                let qx = self.condition(x)?;
                let qy = self.condition(y)?;
                and(&mut self.tape, qx, qy)?
            }
            QCond::Or(x, y) => {
                let qx = self.condition(x)?;
                let qy = self.condition(y)?;
                or(&mut self.tape, qx, qy)?
            }
        };
        Ok(cmp.qubit(0))
    }

    fn conditional(&mut self, arms: &[(QCond, Vec<LStmt>)], otherwise: Option<&[LStmt]>) -> Result<(), IrError> {
        let scope = self.tape.begin_scope();
        let qs = arms
            .iter()
            .map(|(c, _)| self.condition(c))
            .collect::<Result<Vec<_>, _>>()?;
        self.tape.end_compute(scope)?;
        for (i, (_, body)) in arms.iter().enumerate() {
            self.arm(&qs[..i], Some(qs[i]), body)?;
        }
        if let Some(body) = otherwise {
            self.arm(&qs, None, body)?;
        }
        self.tape.uncompute_scope(scope, &[])
    }

    /// Runs `body` controlled on every `negated` qubit being 0 and
    /// `positive` being 1.
    fn arm(&mut self, negated: &[Qubit], positive: Option<Qubit>, body: &[LStmt]) -> Result<(), IrError> {
        if body.is_empty() {
            return Ok(());
        }
        for &q in negated {
            self.tape.append(GateInstr::x(q))?;
        }
        let depth = self.ctrl.len();
        self.ctrl.extend_from_slice(negated);
        self.ctrl.extend(positive);
        let result = self.block(body);
        self.ctrl.truncate(depth);
        result?;
        for &q in negated.iter().rev() {
            self.tape.append(GateInstr::x(q))?;
        }
        Ok(())
    }
}
