use std::collections::{HashMap, HashSet};

use super::sizing::{bits, range};
use super::{ArithOp, LStmt, LoweredProgram, QCond, QExpr, RelOp, SymId};
use crate::circuit_ir::{PhaseAngle, RegKind};
use crate::frontend::ast::GateName;
use crate::synth::{grover_iterations, SynthOptions};

/// One request to the `ancillaX` or `cmpX` pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TempWidth {
    pub kind: RegKind,
    pub width: usize,
}

/// Qubit budget of a lowered program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourcePlan {
    /// User registers in creation order.
    pub user_registers: Vec<(String, usize)>,
    /// Every pool request in allocation order.
    pub temporaries: Vec<TempWidth>,
    /// Pool registers with their final widths, in creation order.
    pub pool_registers: Vec<(String, usize)>,
    /// Scratch qubits reserved for expanding gates with three or more controls.
    pub work_qubits: usize,
    /// Largest number of pool qubits live at the same time.
    pub ancilla_high_water: usize,
    /// Width of the emitted circuit.
    pub total_qubits: usize,
}

/// Estimates the qubit budget with the default Grover parameters.
pub fn estimate_resources(lowered: &LoweredProgram) -> ResourcePlan {
    estimate_resources_with(lowered, &SynthOptions::default())
}

pub fn estimate_resources_with(lowered: &LoweredProgram, options: &SynthOptions) -> ResourcePlan {
    let mut w = Walk {
        program: lowered,
        options: *options,
        pool: Vec::new(),
        scopes: Vec::new(),
        users: HashMap::new(),
        user_registers: Vec::new(),
        taken: lowered.symbols.iter().map(|(_, e)| e.name.clone()).collect(),
        temporaries: Vec::new(),
        max_controls: 0,
        high_water: 0,
    };
    w.block(&lowered.body, 0);
    let work_qubits = w.max_controls.saturating_sub(2);
    let mut pool_registers: Vec<(String, usize)> = w
        .pool
        .iter()
        .map(|p| (format!("{}{}", prefix(p.kind), p.index), p.width))
        .collect();
    if work_qubits > 0 {
        let index = w.pool.iter().filter(|p| p.kind == RegKind::Ancilla).count();
        pool_registers.push((format!("ancilla{index}"), work_qubits));
    }
    let total_qubits = w.user_registers.iter().map(|(_, n)| n).sum::<usize>()
        + pool_registers.iter().map(|(_, n)| n).sum::<usize>();
    ResourcePlan {
        user_registers: w.user_registers,
        temporaries: w.temporaries,
        pool_registers,
        work_qubits,
        ancilla_high_water: w.high_water,
        total_qubits,
    }
}

fn prefix(kind: RegKind) -> &'static str {
    match kind {
        RegKind::Ancilla => "ancilla",
        _ => "cmp",
    }
}

struct PoolReg {
    kind: RegKind,
    index: usize,
    width: usize,
    live: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Key {
    Sym(SymId),
    Temp(usize),
}

#[derive(Debug, Clone, Copy)]
enum Opnd {
    Reg { width: usize, key: Key },
    Const(u64),
}

impl Opnd {
    fn width(&self) -> usize {
        match self {
            Opnd::Reg { width, .. } => *width,
            Opnd::Const(c) => bits(*c),
        }
    }
}

fn nonzero_mod_pow2(c: u64, n: usize) -> bool {
    if n >= 64 {
        c != 0
    } else {
        c & ((1u64 << n) - 1) != 0
    }
}

struct Walk<'a> {
    program: &'a LoweredProgram,
    options: SynthOptions,
    pool: Vec<PoolReg>,
    scopes: Vec<Vec<usize>>,
    /// Live flag of each symbol's current register.
    users: HashMap<SymId, bool>,
    user_registers: Vec<(String, usize)>,
    taken: HashSet<String>,
    temporaries: Vec<TempWidth>,
    max_controls: usize,
    high_water: usize,
}

impl Walk<'_> {
    fn controls(&mut self, k: usize) {
        self.max_controls = self.max_controls.max(k);
    }

    fn live_pool_qubits(&self) -> usize {
        self.pool.iter().filter(|p| p.live).map(|p| p.width).sum()
    }

    fn alloc(&mut self, width: usize, kind: RegKind) -> usize {
        self.temporaries.push(TempWidth { kind, width });
        let free = self
            .pool
            .iter()
            .enumerate()
            .filter(|(_, p)| p.kind == kind && !p.live)
            .min_by_key(|(_, p)| p.index)
            .map(|(i, _)| i);
        let id = match free {
            Some(i) => {
                let p = &mut self.pool[i];
                p.live = true;
                p.width = p.width.max(width);
                i
            }
            None => {
                let index = self.pool.iter().filter(|p| p.kind == kind).count();
                self.pool.push(PoolReg {
                    kind,
                    index,
                    width,
                    live: true,
                });
                self.pool.len() - 1
            }
        };
        if let Some(frame) = self.scopes.last_mut() {
            frame.push(id);
        }
        self.high_water = self.high_water.max(self.live_pool_qubits());
        id
    }

    fn begin(&mut self) {
        self.scopes.push(Vec::new());
    }

    fn end(&mut self, keep: &[usize]) {
        let frame = self.scopes.pop().expect("balanced scopes");
        for id in frame {
            if keep.contains(&id) {
                if let Some(parent) = self.scopes.last_mut() {
                    parent.push(id);
                }
            } else {
                self.pool[id].live = false;
            }
        }
    }

    fn user(&mut self, sym: SymId) {
        match self.users.get(&sym) {
            Some(false) => {
                self.users.insert(sym, true);
            }
            existing => {
                let entry = self.program.symbols.get(sym);
                let name = if existing.is_some() {
                    let mut n = 1;
                    while self.taken.contains(&crate::synth::instance_name(&entry.name, n)) {
                        n += 1;
                    }
                    crate::synth::instance_name(&entry.name, n)
                } else {
                    entry.name.clone()
                };
                self.taken.insert(name.clone());
                self.user_registers.push((name, self.program.symbols.width(sym)));
                self.users.insert(sym, true);
            }
        }
    }

    fn block(&mut self, body: &[LStmt], d: usize) {
        for s in body {
            self.stmt(s, d);
        }
    }

    fn stmt(&mut self, stmt: &LStmt, d: usize) {
        match stmt {
            LStmt::Superpose { sym, value } => {
                self.user(*sym);
                if *value > 1 {
                    self.controls(d);
                }
            }
            LStmt::Compute { sym, expr } => {
                self.user(*sym);
                let width = self.program.symbols.width(*sym);
                self.compute_into(expr, width, d);
            }
            LStmt::Gate { gate, .. } => match gate {
                GateName::CX | GateName::CZ | GateName::CP => self.controls(1 + d),
                GateName::RX | GateName::RY | GateName::RZ if d > 0 => {
                    self.controls(d);
                    self.controls(d - 1);
                }
                _ => self.controls(d),
            },
            LStmt::If { arms, otherwise } => {
                self.begin();
                for (c, _) in arms {
                    self.condition(c);
                }
                for (i, (_, body)) in arms.iter().enumerate() {
                    if !body.is_empty() {
                        self.block(body, d + i + 1);
                    }
                }
                if let Some(body) = otherwise {
                    if !body.is_empty() {
                        self.block(body, d + arms.len());
                    }
                }
                self.end(&[]);
            }
            LStmt::Mark { angle, .. } => {
                let angle = angle.wrap();
                if !angle.is_zero() && !(d == 1 && angle == PhaseAngle::PI) {
                    self.controls(d.saturating_sub(1));
                }
            }
            LStmt::Filter { body, register, .. } => {
                let width = self.program.symbols.width(*register);
                let k = self.options.grover_iterations.unwrap_or_else(|| {
                    let states = 1u64.checked_shl(width as u32).unwrap_or(u64::MAX);
                    grover_iterations(states, self.options.grover_solutions)
                });
                for _ in 0..k {
                    self.block(body, 0);
                    self.controls(width - 1);
                }
            }
            LStmt::Measure { .. } => {}
            LStmt::Scope { body, release, .. } => {
                self.block(body, d);
                for sym in release {
                    self.users.insert(*sym, false);
                }
            }
        }
    }

    fn mat(&mut self, e: &QExpr) -> Opnd {
        match e {
            QExpr::Sym(s) => Opnd::Reg {
                width: self.program.symbols.width(*s),
                key: Key::Sym(*s),
            },
            QExpr::Const(c) => Opnd::Const(*c),
            QExpr::Bin(op, a, b) => {
                let width = range(e, &self.program.symbols).width;
                self.begin();
                let oa = self.mat(a);
                let ob = self.mat(b);
                let t = self.alloc(width, RegKind::Ancilla);
                self.arith(*op, oa, ob, width, 0);
                self.end(&[t]);
                Opnd::Reg {
                    width,
                    key: Key::Temp(t),
                }
            }
        }
    }

    fn compute_into(&mut self, e: &QExpr, width: usize, d: usize) {
        match e {
            QExpr::Sym(_) => self.controls(1 + d),
            QExpr::Const(c) => {
                if nonzero_mod_pow2(*c, width) {
                    self.controls(d);
                }
            }
            QExpr::Bin(op, a, b) => {
                self.begin();
                let oa = self.mat(a);
                let ob = self.mat(b);
                self.arith(*op, oa, ob, width, d);
                self.end(&[]);
            }
        }
    }

    fn arith(&mut self, op: ArithOp, a: Opnd, b: Opnd, n: usize, d: usize) {
        match op {
            ArithOp::Add | ArithOp::Sub => {
                for o in [a, b] {
                    match o {
                        Opnd::Reg { .. } => self.controls(1 + d),
                        Opnd::Const(c) => {
                            if nonzero_mod_pow2(c, n) {
                                self.controls(d);
                            }
                        }
                    }
                }
            }
            ArithOp::Mul => match (a, b) {
                (Opnd::Reg { width: wa, key: ka }, Opnd::Reg { key: kb, .. }) => {
                    if ka == kb && wa == 1 {
                        self.controls(1 + d);
                    } else {
                        self.controls(2 + d);
                    }
                }
                (Opnd::Reg { .. }, Opnd::Const(c)) | (Opnd::Const(c), Opnd::Reg { .. }) => {
                    if nonzero_mod_pow2(c, n) {
                        self.controls(1 + d);
                    }
                }
                (Opnd::Const(x), Opnd::Const(y)) => {
                    if nonzero_mod_pow2(x.wrapping_mul(y), n) {
                        self.controls(d);
                    }
                }
            },
        }
    }

    fn condition(&mut self, c: &QCond) {
        match c {
            QCond::Compare { op, lhs, rhs } => {
                self.begin();
                let a = self.mat(lhs);
                let b = self.mat(rhs);
                let cmp = self.alloc(1, RegKind::Cmp);
                match op {
                    RelOp::Lt | RelOp::Gt | RelOp::Le | RelOp::Ge => {
                        let (x, y) = if matches!(op, RelOp::Lt | RelOp::Ge) { (a, b) } else { (b, a) };
                        let w = a.width().max(b.width()) + 1;
                        self.begin();
                        self.alloc(w, RegKind::Ancilla);
                        self.arith(ArithOp::Sub, x, y, w, 0);
                        self.end(&[]);
                        self.controls(1);
                    }
                    RelOp::Eq | RelOp::Ne => match (a, b) {
                        (Opnd::Reg { width, .. }, Opnd::Const(c))
                        | (Opnd::Const(c), Opnd::Reg { width, .. }) => {
                            if width >= 64 || c >> width == 0 {
                                self.controls(width);
                            }
                        }
                        (Opnd::Reg { width: wa, .. }, Opnd::Reg { width: wb, .. }) => {
                            let w = wa.max(wb);
                            self.begin();
                            self.alloc(w, RegKind::Ancilla);
                            self.controls(1);
                            self.controls(w);
                            self.end(&[]);
                        }
                        (Opnd::Const(_), Opnd::Const(_)) => {}
                    },
                }
                self.end(&[cmp]);
            }
            QCond::And(x, y) | QCond::Or(x, y) => {
                self.condition(x);
                self.condition(y);
                self.alloc(1, RegKind::Cmp);
                self.controls(2);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse, tokenize};
    use crate::semantics::analyze;

    fn plan(src: &str) -> ResourcePlan {
        estimate_resources(&analyze(&parse(&tokenize(src).unwrap()).unwrap()).unwrap())
    }

    #[test]
    fn grover_program_budget() {
        let p = plan(
            "oracle some_oracle(super var) { if(var * 4 < 4) { mark(var,pi); } }
             function main() { super variable = 8; filter(some_oracle(variable), variable); measure variable; }",
        );
        assert_eq!(p.user_registers, [("variable".to_string(), 3)]);
        assert_eq!(
            p.temporaries,
            [
                TempWidth { kind: RegKind::Ancilla, width: 5 },
                TempWidth { kind: RegKind::Cmp, width: 1 },
                TempWidth { kind: RegKind::Ancilla, width: 6 },
                TempWidth { kind: RegKind::Ancilla, width: 5 },
                TempWidth { kind: RegKind::Cmp, width: 1 },
                TempWidth { kind: RegKind::Ancilla, width: 6 },
            ]
        );
        assert_eq!(
            p.pool_registers,
            [("ancilla0".to_string(), 5), ("cmp0".to_string(), 1), ("ancilla1".to_string(), 6)]
        );
        assert_eq!(p.work_qubits, 0);
        assert_eq!(p.ancilla_high_water, 12);
        assert_eq!(p.total_qubits, 15);
    }

    #[test]
    fn deutsch_jozsa_budget() {
        let p = plan(
            "function deutsch_josza(super inputs) { if(inputs + 7 > 14) { mark(inputs,pi); } }
             function main() { super test = 16; deutsch_josza(test); H(test); measure test; }",
        );
        assert_eq!(
            p.pool_registers,
            [("ancilla0".to_string(), 5), ("cmp0".to_string(), 1), ("ancilla1".to_string(), 6)]
        );
        assert_eq!(p.total_qubits, 16);
    }

    #[test]
    fn widening_and_work() {
        // A 4-qubit equality needs an MCX with four controls: two work qubits.
        let p = plan("function main() { super a = 16; if (a == 3) { mark(a, pi); } }");
        assert_eq!(p.work_qubits, 2);
        assert_eq!(p.total_qubits, 4 + 1 + 2);
    }
}
