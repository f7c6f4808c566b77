use std::collections::{BTreeSet, HashMap, HashSet};

use super::sizing::{range, superposition_width};
use super::{
    apply_binop, ArithOp, LStmt, LoweredProgram, QCond, QExpr, RelOp, SemanticError, SymId,
    SymbolEntry, SymbolKind, SymbolTable,
};
use crate::circuit_ir::PhaseAngle;
use crate::diagnostic::Diagnostic;
use crate::frontend::ast::{
    AssignOp, BinOp, Call, Callee, Expr, GateName, Ident, Intrinsic, Program, Stmt, Subroutine,
    SubroutineKind, Type,
};
use crate::frontend::Pos;

/// Iteration cap for a single loop.
pub const LOOP_BUDGET: u64 = 1 << 20;

type Result<T> = std::result::Result<T, SemanticError>;

/// Names that cannot be used as register names in the emitted QASM.
const RESERVED: &[&str] = &[
    "OPENQASM", "include", "qreg", "creg", "gate", "opaque", "measure", "reset", "barrier", "if",
    "pi", "U", "CX", "sin", "cos", "tan", "exp", "ln", "sqrt", "u3", "u2", "u1", "u0", "u", "p",
    "cx", "id", "x", "y", "z", "h", "s", "sdg", "t", "tdg", "rx", "ry", "rz", "sx", "sxdg", "cz",
    "cy", "swap", "ch", "ccx", "cswap", "crx", "cry", "crz", "cu1", "cu3", "rxx", "rzz", "rccx",
    "rc3x", "c3x", "c3sqrtx", "c4x",
];

/// Lowers `main` with every call inlined and every loop unrolled.
pub fn analyze(program: &Program) -> Result<LoweredProgram> {
    analyze_with_budget(program, LOOP_BUDGET)
}

pub fn analyze_with_budget(program: &Program, budget: u64) -> Result<LoweredProgram> {
    let main = program
        .subroutine("main")
        .ok_or_else(|| SemanticError::UndefinedIdentifier {
            name: "main".into(),
            pos: Pos::new(1, 1),
        })?;
    if !main.params.is_empty() {
        return Err(SemanticError::ArityMismatch {
            name: "main".into(),
            expected: 0,
            found: main.params.len(),
            pos: main.name.pos,
        });
    }
    let mut lowerer = Lowerer {
        program,
        symbols: SymbolTable::default(),
        frames: vec![Frame::new("main", 0, HashMap::new())],
        qdepth: 0,
        guards: Vec::new(),
        deps: HashMap::new(),
        warnings: Vec::new(),
        budget,
        reg_names: HashSet::new(),
        measured: HashSet::new(),
        cregs: HashSet::new(),
    };
    let mut body = Vec::new();
    lowerer.block_in_frame_scope(&main.body, &mut body)?;
    Ok(LoweredProgram {
        symbols: lowerer.symbols,
        body,
        warnings: lowerer.warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Next,
    Return,
}

#[derive(Debug, Clone)]
enum Operand {
    Classical(i64),
    Quantum(QExpr),
}

#[derive(Debug, Clone)]
enum Cond {
    Classical(i64),
    Quantum(QCond),
}

struct Frame {
    name: String,
    scopes: Vec<HashMap<String, SymId>>,
    /// Quantum symbols created while this frame is active.
    locals: Vec<SymId>,
    /// Named locals, used for the leftover-register warning.
    named_locals: Vec<SymId>,
    qdepth_at_entry: usize,
    returned: Option<SymId>,
}

impl Frame {
    fn new(name: &str, qdepth: usize, params: HashMap<String, SymId>) -> Self {
        Self {
            name: name.to_string(),
            scopes: vec![params],
            locals: Vec::new(),
            named_locals: Vec::new(),
            qdepth_at_entry: qdepth,
            returned: None,
        }
    }
}

struct Lowerer<'p> {
    program: &'p Program,
    symbols: SymbolTable,
    frames: Vec<Frame>,
    /// Number of enclosing quantum conditionals.
    qdepth: usize,
    /// Registers read by the conditions of each enclosing quantum chain.
    guards: Vec<BTreeSet<SymId>>,
    /// Registers each computed register was derived from, transitively.
    deps: HashMap<SymId, BTreeSet<SymId>>,
    warnings: Vec<Diagnostic>,
    budget: u64,
    reg_names: HashSet<String>,
    measured: HashSet<SymId>,
    /// Classical register names handed out so far.
    cregs: HashSet<String>,
}

fn is_pool_name(name: &str) -> bool {
    ["ancilla", "cmp"].iter().any(|prefix| {
        name.strip_prefix(prefix)
            .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
    })
}

fn const_operand(v: i64, pos: Pos) -> Result<QExpr> {
    if v < 0 {
        Err(SemanticError::NegativeOperand { pos })
    } else {
        Ok(QExpr::Const(v as u64))
    }
}

fn relop(op: BinOp) -> RelOp {
    match op {
        BinOp::Lt => RelOp::Lt,
        BinOp::Gt => RelOp::Gt,
        BinOp::Le => RelOp::Le,
        BinOp::Ge => RelOp::Ge,
        BinOp::Eq => RelOp::Eq,
        BinOp::Ne => RelOp::Ne,
        _ => unreachable!("not a relational operator"),
    }
}

fn contains_mark(stmts: &[LStmt]) -> bool {
    stmts.iter().any(|s| match s {
        LStmt::Mark { .. } => true,
        LStmt::If { arms, otherwise } => {
            arms.iter().any(|(_, b)| contains_mark(b))
                || otherwise.as_deref().is_some_and(contains_mark)
        }
        LStmt::Scope { body, .. } | LStmt::Filter { body, .. } => contains_mark(body),
        _ => false,
    })
}

/// Registers whose basis value a statement list may change. Creating a
/// register does not count.
pub(crate) fn writes(stmts: &[LStmt], out: &mut BTreeSet<SymId>) {
    for s in stmts {
        match s {
            LStmt::Superpose { .. } | LStmt::Compute { .. } | LStmt::Mark { .. } => {}
            LStmt::Gate { gate, operands, .. } => match gate {
                GateName::H | GateName::X | GateName::Y | GateName::RX | GateName::RY => {
                    out.insert(operands[0]);
                }
                GateName::CX => {
                    out.insert(operands[1]);
                }
                _ => {}
            },
            LStmt::If { arms, otherwise } => {
                for (_, body) in arms {
                    writes(body, out);
                }
                if let Some(body) = otherwise {
                    writes(body, out);
                }
            }
            LStmt::Filter { body, register, .. } => {
                out.insert(*register);
                writes(body, out);
            }
            LStmt::Measure { sym, .. } => {
                out.insert(*sym);
            }
            LStmt::Scope { body, .. } => writes(body, out),
        }
    }
}

impl<'p> Lowerer<'p> {
    fn frame(&self) -> &Frame {
        self.frames.last().expect("frame stack is never empty")
    }

    fn frame_mut(&mut self) -> &mut Frame {
        self.frames.last_mut().expect("frame stack is never empty")
    }

    fn lookup(&self, name: &str) -> Option<SymId> {
        self.frame()
            .scopes
            .iter()
            .rev()
            .find_map(|scope| scope.get(name).copied())
    }

    fn resolve(&self, id: &Ident) -> Result<SymId> {
        self.lookup(&id.name)
            .ok_or_else(|| SemanticError::UndefinedIdentifier {
                name: id.name.clone(),
                pos: id.pos,
            })
    }

    fn register_name(&mut self, source: &str) -> String {
        let mut base = source.to_string();
        if base.starts_with(|c: char| c.is_ascii_uppercase()) || base.starts_with("creg_") {
            base = format!("q_{base}");
        }
        if RESERVED.contains(&base.as_str()) {
            base.push('_');
        }
        let mut name = base.clone();
        let mut n = 0;
        while self.reg_names.contains(&name) || is_pool_name(&name) {
            n += 1;
            name = format!("{base}_{n}");
        }
        self.reg_names.insert(name.clone());
        name
    }

    fn check_declarable(&self, id: &Ident) -> Result<()> {
        if id.name == "pi" {
            return Err(SemanticError::TypeError {
                message: "`pi` is reserved".into(),
                pos: id.pos,
            });
        }
        let scope = self.frame().scopes.last().expect("scope stack is never empty");
        if scope.contains_key(&id.name) {
            return Err(SemanticError::Redeclared {
                name: id.name.clone(),
                pos: id.pos,
            });
        }
        Ok(())
    }

    fn bind(&mut self, name: &str, sym: SymId) {
        self.frame_mut()
            .scopes
            .last_mut()
            .expect("scope stack is never empty")
            .insert(name.to_string(), sym);
    }

    fn new_classical(&mut self, source: &str, value: i64, pos: Pos) -> SymId {
        self.symbols.push(SymbolEntry {
            name: source.to_string(),
            source_name: source.to_string(),
            kind: SymbolKind::Classical { value },
            pos,
        })
    }

    fn new_quantum(&mut self, source: &str, max_value: u64, width: usize, pos: Pos) -> SymId {
        let name = self.register_name(source);
        let id = self.symbols.push(SymbolEntry {
            name,
            source_name: source.to_string(),
            kind: SymbolKind::Quantum { max_value, width },
            pos,
        });
        self.frame_mut().locals.push(id);
        id
    }

    fn compute(&mut self, source: &str, expr: QExpr, pos: Pos, out: &mut Vec<LStmt>) -> SymId {
        let r = range(&expr, &self.symbols);
        let sym = self.new_quantum(source, r.max_value, r.width, pos);
        let mut direct = BTreeSet::new();
        expr.symbols(&mut direct);
        let mut all = direct.clone();
        for s in &direct {
            if let Some(d) = self.deps.get(s) {
                all.extend(d.iter().copied());
            }
        }
        self.deps.insert(sym, all);
        out.push(LStmt::Compute { sym, expr });
        sym
    }

    fn in_quantum_block(&self) -> bool {
        self.qdepth > 0
    }

    fn require_classical_context(&self, what: &str, pos: Pos) -> Result<()> {
        if self.in_quantum_block() {
            Err(SemanticError::NonQuantumInQuantumBlock {
                what: what.to_string(),
                pos,
            })
        } else {
            Ok(())
        }
    }

    fn note_write(&self, sym: SymId, pos: Pos) -> Result<()> {
        if self.guards.iter().any(|g| g.contains(&sym)) {
            return Err(SemanticError::ConditionOperandWritten {
                name: self.symbols.get(sym).source_name.clone(),
                pos,
            });
        }
        Ok(())
    }

    /// Runs `stmts` in a fresh lexical scope.
    fn block(&mut self, stmts: &[Stmt], out: &mut Vec<LStmt>) -> Result<Flow> {
        self.frame_mut().scopes.push(HashMap::new());
        let flow = self.block_in_frame_scope(stmts, out);
        self.frame_mut().scopes.pop();
        flow
    }

    fn block_in_frame_scope(&mut self, stmts: &[Stmt], out: &mut Vec<LStmt>) -> Result<Flow> {
        for stmt in stmts {
            if self.stmt(stmt, out)? == Flow::Return {
                return Ok(Flow::Return);
            }
        }
        Ok(Flow::Next)
    }

    fn stmt(&mut self, stmt: &Stmt, out: &mut Vec<LStmt>) -> Result<Flow> {
        match stmt {
            Stmt::Declare {
                ty: Type::Int,
                name,
                value,
            } => {
                self.require_classical_context("a classical declaration", name.pos)?;
                self.check_declarable(name)?;
                let v = self.classical_value(value, out)?;
                let id = self.new_classical(&name.name, v, name.pos);
                self.bind(&name.name, id);
            }
            Stmt::Declare {
                ty: Type::Super,
                name,
                value,
            } => self.declare_super(name, value, out)?,
            Stmt::Assign { name, op, value } => self.assign(name, *op, value, out)?,
            Stmt::Call(call) => self.call_stmt(call, out)?,
            Stmt::Measure(id) => {
                self.require_classical_context("`measure`", id.pos)?;
                let sym = self.resolve(id)?;
                if !self.symbols.get(sym).is_quantum() {
                    return Err(SemanticError::TypeError {
                        message: format!("`{}` is classical and cannot be measured", id.name),
                        pos: id.pos,
                    });
                }
                if !self.measured.insert(sym) {
                    return Err(SemanticError::TypeError {
                        message: format!("`{}` is already measured", id.name),
                        pos: id.pos,
                    });
                }
                let entry = self.symbols.get(sym);
                let mut name = format!("creg_{}", entry.source_name);
                if self.cregs.contains(&name) {
                    name = format!("creg_{}", entry.name);
                }
                self.cregs.insert(name.clone());
                out.push(LStmt::Measure { sym, name });
            }
            Stmt::Return(id) => {
                if self.qdepth > self.frame().qdepth_at_entry {
                    return Err(SemanticError::ReturnInQuantumBlock { pos: id.pos });
                }
                let sym = self.resolve(id)?;
                self.frame_mut().returned = Some(sym);
                return Ok(Flow::Return);
            }
            Stmt::For {
                pos,
                init,
                cond,
                step,
                body,
            } => {
                self.require_classical_context("a loop", *pos)?;
                self.frame_mut().scopes.push(HashMap::new());
                let flow = self.for_loop(*pos, init, cond, step, body, out);
                self.frame_mut().scopes.pop();
                return flow;
            }
            Stmt::While { pos, cond, body } => {
                self.require_classical_context("a loop", *pos)?;
                let mut iterations = 0u64;
                while self.header_value(cond, *pos)? != 0 {
                    self.count_iteration(&mut iterations, *pos)?;
                    if self.block(body, out)? == Flow::Return {
                        return Ok(Flow::Return);
                    }
                }
            }
            Stmt::If { arms, otherwise } => {
                for (i, arm) in arms.iter().enumerate() {
                    match self.condition(&arm.cond, out)? {
                        Cond::Classical(v) => {
                            self.require_classical_context("a classical conditional", arm.pos)?;
                            if v != 0 {
                                return self.block(&arm.body, out);
                            }
                        }
                        Cond::Quantum(first) => {
                            self.quantum_chain(first, &arms[i..], otherwise.as_deref(), out)?;
                            return Ok(Flow::Next);
                        }
                    }
                }
                if let Some(body) = otherwise {
                    return self.block(body, out);
                }
            }
        }
        Ok(Flow::Next)
    }

    fn count_iteration(&self, iterations: &mut u64, pos: Pos) -> Result<()> {
        *iterations += 1;
        if *iterations > self.budget {
            return Err(SemanticError::LoopBudgetExceeded {
                budget: self.budget,
                pos,
            });
        }
        Ok(())
    }

    fn for_loop(
        &mut self,
        pos: Pos,
        init: &Stmt,
        cond: &Expr,
        step: &Stmt,
        body: &[Stmt],
        out: &mut Vec<LStmt>,
    ) -> Result<Flow> {
        self.header_stmt(init, pos)?;
        let mut iterations = 0u64;
        while self.header_value(cond, pos)? != 0 {
            self.count_iteration(&mut iterations, pos)?;
            if self.block(body, out)? == Flow::Return {
                return Ok(Flow::Return);
            }
            self.header_stmt(step, pos)?;
        }
        Ok(Flow::Next)
    }

    fn header_is_classical(&self, expr: &Expr) -> bool {
        match expr {
            Expr::Int { .. } => true,
            Expr::Var(id) => self
                .lookup(&id.name)
                .is_none_or(|s| !self.symbols.get(s).is_quantum()),
            Expr::Call(_) => false,
            Expr::Binary { lhs, rhs, .. } => {
                self.header_is_classical(lhs) && self.header_is_classical(rhs)
            }
        }
    }

    fn header_value(&mut self, expr: &Expr, pos: Pos) -> Result<i64> {
        if !self.header_is_classical(expr) {
            return Err(SemanticError::NonClassicalLoopHeader { pos });
        }
        let mut scratch = Vec::new();
        self.classical_value(expr, &mut scratch)
    }

    fn header_stmt(&mut self, stmt: &Stmt, pos: Pos) -> Result<()> {
        let classical = match stmt {
            Stmt::Declare { ty, value, .. } => *ty == Type::Int && self.header_is_classical(value),
            Stmt::Assign { name, value, .. } => {
                self.lookup(&name.name)
                    .is_none_or(|s| !self.symbols.get(s).is_quantum())
                    && self.header_is_classical(value)
            }
            _ => false,
        };
        if !classical {
            return Err(SemanticError::NonClassicalLoopHeader { pos });
        }
        let mut scratch = Vec::new();
        self.stmt(stmt, &mut scratch)?;
        Ok(())
    }

    fn declare_super(&mut self, name: &Ident, value: &Expr, out: &mut Vec<LStmt>) -> Result<()> {
        self.check_declarable(name)?;
        let first_new = self.symbols.len();
        let is_call = matches!(value, Expr::Call(_));
        match self.operand(value, out)? {
            Operand::Classical(v) => {
                if v <= 0 || v & (v - 1) != 0 {
                    return Err(SemanticError::NotPowerOfTwo {
                        value: v,
                        pos: value.pos(),
                    });
                }
                let n = v as u64;
                let sym = self.new_quantum(&name.name, n - 1, superposition_width(n), name.pos);
                self.frame_mut().named_locals.push(sym);
                self.bind(&name.name, sym);
                out.push(LStmt::Superpose { sym, value: n });
            }
            Operand::Quantum(QExpr::Sym(sym)) if is_call => {
                // The call's result register takes the caller's name when the
                // callee created it.
                if sym.0 >= first_new {
                    let old = self.symbols.get(sym).name.clone();
                    self.reg_names.remove(&old);
                    let fresh = self.register_name(&name.name);
                    let entry = self.symbols.get_mut(sym);
                    entry.name = fresh;
                    entry.source_name = name.name.clone();
                    self.frame_mut().locals.push(sym);
                }
                self.frame_mut().named_locals.push(sym);
                self.bind(&name.name, sym);
            }
            Operand::Quantum(expr) => {
                let sym = self.compute(&name.name, expr, name.pos, out);
                self.frame_mut().named_locals.push(sym);
                self.bind(&name.name, sym);
            }
        }
        Ok(())
    }

    fn assign(&mut self, name: &Ident, op: AssignOp, value: &Expr, out: &mut Vec<LStmt>) -> Result<()> {
        let sym = self.resolve(name)?;
        let old = match self.symbols.get(sym).kind {
            SymbolKind::Quantum { .. } => {
                return Err(SemanticError::QuantumReassignment {
                    name: name.name.clone(),
                    pos: name.pos,
                })
            }
            SymbolKind::Classical { value } => value,
        };
        self.require_classical_context("a classical assignment", name.pos)?;
        let v = self.classical_value(value, out)?;
        let new = match op {
            AssignOp::Set => v,
            AssignOp::Add => apply_binop(BinOp::Add, old, v, name.pos)?,
            AssignOp::Sub => apply_binop(BinOp::Sub, old, v, name.pos)?,
            AssignOp::Mul => apply_binop(BinOp::Mul, old, v, name.pos)?,
        };
        self.symbols.get_mut(sym).kind = SymbolKind::Classical { value: new };
        Ok(())
    }

    fn classical_value(&mut self, expr: &Expr, out: &mut Vec<LStmt>) -> Result<i64> {
        match self.operand(expr, out)? {
            Operand::Classical(v) => Ok(v),
            Operand::Quantum(_) => Err(SemanticError::TypeError {
                message: "a quantum value cannot be stored in a classical variable".into(),
                pos: expr.pos(),
            }),
        }
    }

    fn operand(&mut self, expr: &Expr, out: &mut Vec<LStmt>) -> Result<Operand> {
        match expr {
            Expr::Int { value, .. } => Ok(Operand::Classical(*value)),
            Expr::Var(id) => {
                let sym = self.resolve(id)?;
                Ok(match self.symbols.get(sym).kind {
                    SymbolKind::Classical { value } => Operand::Classical(value),
                    SymbolKind::Quantum { .. } => Operand::Quantum(QExpr::Sym(sym)),
                })
            }
            Expr::Call(call) => {
                let sym = self.call_value(call, out)?.ok_or_else(|| SemanticError::TypeError {
                    message: format!("`{}` does not return a value", call.name.name),
                    pos: call.name.pos,
                })?;
                Ok(match self.symbols.get(sym).kind {
                    SymbolKind::Classical { value } => Operand::Classical(value),
                    SymbolKind::Quantum { .. } => Operand::Quantum(QExpr::Sym(sym)),
                })
            }
            Expr::Binary { op, pos, lhs, rhs } => {
                let a = self.operand(lhs, out)?;
                let b = self.operand(rhs, out)?;
                match (a, b) {
                    (Operand::Classical(x), Operand::Classical(y)) => {
                        Ok(Operand::Classical(apply_binop(*op, x, y, *pos)?))
                    }
                    _ if op.is_relational() || op.is_boolean() => Err(SemanticError::TypeError {
                        message: format!(
                            "quantum operator `{}` can only be used as a condition",
                            op.symbol()
                        ),
                        pos: *pos,
                    }),
                    (a, b) => self.arith(*op, a, b, *pos).map(Operand::Quantum),
                }
            }
        }
    }

    fn arith(&self, op: BinOp, a: Operand, b: Operand, pos: Pos) -> Result<QExpr> {
        let aop = match op {
            BinOp::Add => ArithOp::Add,
            BinOp::Sub => ArithOp::Sub,
            BinOp::Mul => ArithOp::Mul,
            _ => unreachable!("arithmetic operator expected"),
        };
        Ok(match (a, b) {
            (Operand::Quantum(x), Operand::Quantum(y)) => QExpr::bin(aop, x, y),
            (Operand::Quantum(x), Operand::Classical(c)) => {
                let mag = QExpr::Const(c.unsigned_abs());
                match aop {
                    ArithOp::Add if c < 0 => QExpr::bin(ArithOp::Sub, x, mag),
                    ArithOp::Sub if c < 0 => QExpr::bin(ArithOp::Add, x, mag),
                    _ => QExpr::bin(aop, x, const_operand(c, pos)?),
                }
            }
            (Operand::Classical(c), Operand::Quantum(y)) => match aop {
                ArithOp::Add if c < 0 => QExpr::bin(ArithOp::Sub, y, QExpr::Const(c.unsigned_abs())),
                _ => QExpr::bin(aop, const_operand(c, pos)?, y),
            },
            (Operand::Classical(_), Operand::Classical(_)) => unreachable!("folded by the caller"),
        })
    }

    fn condition(&mut self, expr: &Expr, out: &mut Vec<LStmt>) -> Result<Cond> {
        match expr {
            Expr::Binary { op, pos, lhs, rhs } if op.is_boolean() => {
                let a = self.condition(lhs, out)?;
                let b = self.condition(rhs, out)?;
                match (a, b) {
                    (Cond::Classical(x), Cond::Classical(y)) => {
                        Ok(Cond::Classical(apply_binop(*op, x, y, *pos)?))
                    }
                    (Cond::Quantum(x), Cond::Quantum(y)) => Ok(Cond::Quantum(match op {
                        BinOp::And => QCond::And(Box::new(x), Box::new(y)),
                        _ => QCond::Or(Box::new(x), Box::new(y)),
                    })),
                    _ => Err(SemanticError::MixedCondition { pos: *pos }),
                }
            }
            Expr::Binary { op, pos, lhs, rhs } if op.is_relational() => {
                let a = self.operand(lhs, out)?;
                let b = self.operand(rhs, out)?;
                match (a, b) {
                    (Operand::Classical(x), Operand::Classical(y)) => {
                        Ok(Cond::Classical(apply_binop(*op, x, y, *pos)?))
                    }
                    (a, b) => {
                        let side = |o: Operand| match o {
                            Operand::Quantum(e) => Ok(e),
                            Operand::Classical(c) => const_operand(c, *pos),
                        };
                        Ok(Cond::Quantum(QCond::Compare {
                            op: relop(*op),
                            lhs: side(a)?,
                            rhs: side(b)?,
                        }))
                    }
                }
            }
            _ => Ok(match self.operand(expr, out)? {
                Operand::Classical(v) => Cond::Classical(v),
                Operand::Quantum(e) => Cond::Quantum(QCond::Compare {
                    op: RelOp::Ne,
                    lhs: e,
                    rhs: QExpr::Const(0),
                }),
            }),
        }
    }

    fn quantum_chain(
        &mut self,
        first: QCond,
        arms: &[crate::frontend::ast::CondArm],
        otherwise: Option<&[Stmt]>,
        out: &mut Vec<LStmt>,
    ) -> Result<()> {
        let mut conds = vec![first];
        for arm in &arms[1..] {
            match self.condition(&arm.cond, out)? {
                Cond::Quantum(c) => conds.push(c),
                Cond::Classical(_) => return Err(SemanticError::MixedCondition { pos: arm.pos }),
            }
        }
        let mut guard = BTreeSet::new();
        for c in &conds {
            c.symbols(&mut guard);
        }
        self.guards.push(guard);
        self.qdepth += 1;
        let result = (|| {
            let mut lowered = Vec::with_capacity(conds.len());
            for (cond, arm) in conds.into_iter().zip(arms) {
                let mut body = Vec::new();
                self.block(&arm.body, &mut body)?;
                lowered.push((cond, body));
            }
            let otherwise = match otherwise {
                Some(stmts) => {
                    let mut body = Vec::new();
                    self.block(stmts, &mut body)?;
                    Some(body)
                }
                None => None,
            };
            Ok(LStmt::If {
                arms: lowered,
                otherwise,
            })
        })();
        self.qdepth -= 1;
        self.guards.pop();
        out.push(result?);
        Ok(())
    }

    fn register_arg(&self, expr: &Expr) -> Result<SymId> {
        match expr {
            Expr::Var(id) => {
                let sym = self.resolve(id)?;
                if self.symbols.get(sym).is_quantum() {
                    Ok(sym)
                } else {
                    Err(SemanticError::TypeError {
                        message: format!("`{}` is classical; a quantum variable is required", id.name),
                        pos: id.pos,
                    })
                }
            }
            other => Err(SemanticError::TypeError {
                message: "a quantum variable is required here".into(),
                pos: other.pos(),
            }),
        }
    }

    /// Folds an angle of the form `k*pi` to an exact phase.
    fn angle(&self, expr: &Expr) -> Result<PhaseAngle> {
        let (coef, constant) = self.angle_form(expr)?;
        if constant != 0 {
            return Err(SemanticError::InvalidAngle { pos: expr.pos() });
        }
        Ok(PhaseAngle::multiple_of_pi(coef))
    }

    /// `coef*pi + constant`.
    fn angle_form(&self, expr: &Expr) -> Result<(i64, i64)> {
        let invalid = || SemanticError::InvalidAngle { pos: expr.pos() };
        match expr {
            Expr::Int { value, .. } => Ok((0, *value)),
            Expr::Var(id) if id.name == "pi" => Ok((1, 0)),
            Expr::Var(id) => match self.symbols.get(self.resolve(id)?).kind {
                SymbolKind::Classical { value } => Ok((0, value)),
                SymbolKind::Quantum { .. } => Err(invalid()),
            },
            Expr::Call(_) => Err(invalid()),
            Expr::Binary { op, pos, lhs, rhs } => {
                let (ac, ak) = self.angle_form(lhs)?;
                let (bc, bk) = self.angle_form(rhs)?;
                let overflow = || SemanticError::Overflow { pos: *pos };
                match op {
                    BinOp::Add => Ok((
                        ac.checked_add(bc).ok_or_else(overflow)?,
                        ak.checked_add(bk).ok_or_else(overflow)?,
                    )),
                    BinOp::Sub => Ok((
                        ac.checked_sub(bc).ok_or_else(overflow)?,
                        ak.checked_sub(bk).ok_or_else(overflow)?,
                    )),
                    BinOp::Mul if ac == 0 => Ok((
                        ak.checked_mul(bc).ok_or_else(overflow)?,
                        ak.checked_mul(bk).ok_or_else(overflow)?,
                    )),
                    BinOp::Mul if bc == 0 => Ok((
                        ac.checked_mul(bk).ok_or_else(overflow)?,
                        ak.checked_mul(bk).ok_or_else(overflow)?,
                    )),
                    _ => Err(invalid()),
                }
            }
        }
    }

    fn call_stmt(&mut self, call: &Call, out: &mut Vec<LStmt>) -> Result<()> {
        match &call.callee {
            Callee::Gate(gate) => self.gate(*gate, call, out),
            Callee::Intrinsic(Intrinsic::Mark) => self.mark(call, out),
            Callee::Intrinsic(Intrinsic::Filter) => self.filter(call, out),
            Callee::User { .. } => self.call_value(call, out).map(|_| ()),
        }
    }

    fn check_arity(&self, call: &Call, expected: usize) -> Result<()> {
        if call.args.len() != expected {
            return Err(SemanticError::ArityMismatch {
                name: call.name.name.clone(),
                expected,
                found: call.args.len(),
                pos: call.name.pos,
            });
        }
        Ok(())
    }

    fn gate(&mut self, gate: GateName, call: &Call, out: &mut Vec<LStmt>) -> Result<()> {
        let regs = gate.register_arity();
        self.check_arity(call, regs + gate.takes_angle() as usize)?;
        let operands = call.args[..regs]
            .iter()
            .map(|a| self.register_arg(a))
            .collect::<Result<Vec<_>>>()?;
        if regs == 2 {
            if operands[0] == operands[1] {
                return Err(SemanticError::OverlappingOperands { pos: call.name.pos });
            }
            let (left, right) = (self.symbols.width(operands[0]), self.symbols.width(operands[1]));
            if left != right {
                return Err(SemanticError::WidthMismatch {
                    left,
                    right,
                    pos: call.name.pos,
                });
            }
        }
        let angle = if gate.takes_angle() {
            Some(self.angle(&call.args[regs])?)
        } else {
            None
        };
        let mut written = BTreeSet::new();
        let stmt = LStmt::Gate {
            gate,
            operands,
            angle,
        };
        writes(std::slice::from_ref(&stmt), &mut written);
        for sym in written {
            self.note_write(sym, call.name.pos)?;
        }
        out.push(stmt);
        Ok(())
    }

    fn mark(&mut self, call: &Call, out: &mut Vec<LStmt>) -> Result<()> {
        if !self.in_quantum_block() {
            return Err(SemanticError::MarkOutsideConditional { pos: call.name.pos });
        }
        self.check_arity(call, 2)?;
        let target = self.register_arg(&call.args[0])?;
        let angle = self.angle(&call.args[1])?;
        let conditioned = self.guards.iter().flatten().any(|s| {
            *s == target || self.deps.get(s).is_some_and(|d| d.contains(&target))
        });
        if !conditioned {
            self.warnings.push(Diagnostic::warning(
                "MarkAnnotation",
                format!(
                    "`{}` does not occur in the enclosing condition",
                    self.symbols.get(target).source_name
                ),
                Some(call.name.pos),
            ));
        }
        out.push(LStmt::Mark { target, angle });
        Ok(())
    }

    fn filter(&mut self, call: &Call, out: &mut Vec<LStmt>) -> Result<()> {
        self.require_classical_context("`filter`", call.name.pos)?;
        self.check_arity(call, 2)?;
        let oracle_call = match &call.args[0] {
            Expr::Call(c) if c.callee == (Callee::User { oracle: true }) => c,
            other => {
                return Err(SemanticError::TypeError {
                    message: "the first argument of `filter` must be an oracle call".into(),
                    pos: other.pos(),
                })
            }
        };
        let register = self.register_arg(&call.args[1])?;
        let sub = self.subroutine(oracle_call)?;
        let (scope, _) = self.expand(sub, oracle_call, out)?;
        let body = scope.into_iter().collect::<Vec<_>>();
        if !contains_mark(&body) {
            self.warnings.push(Diagnostic::warning(
                "EmptyOracle",
                format!("oracle `{}` marks no states", oracle_call.name.name),
                Some(oracle_call.name.pos),
            ));
        }
        self.note_write(register, call.name.pos)?;
        out.push(LStmt::Filter {
            oracle: oracle_call.name.name.clone(),
            body,
            register,
        });
        Ok(())
    }

    fn subroutine(&self, call: &Call) -> Result<&'p Subroutine> {
        let sub = self
            .program
            .subroutine(&call.name.name)
            .ok_or_else(|| SemanticError::UndefinedIdentifier {
                name: call.name.name.clone(),
                pos: call.name.pos,
            })?;
        if self.frames.iter().any(|f| f.name == sub.name.name) {
            return Err(SemanticError::RecursionUnsupported {
                name: sub.name.name.clone(),
                pos: call.name.pos,
            });
        }
        self.check_arity(call, sub.params.len())?;
        Ok(sub)
    }

    /// Inlines a user function call and returns the symbol it returned.
    fn call_value(&mut self, call: &Call, out: &mut Vec<LStmt>) -> Result<Option<SymId>> {
        match call.callee {
            Callee::User { oracle: false } => {}
            Callee::User { oracle: true } => {
                return Err(SemanticError::OracleCalledAsFunction {
                    name: call.name.name.clone(),
                    pos: call.name.pos,
                })
            }
            _ => {
                return Err(SemanticError::TypeError {
                    message: format!("`{}` does not produce a value", call.name.name),
                    pos: call.name.pos,
                })
            }
        }
        let sub = self.subroutine(call)?;
        let (scope, returned) = self.expand(sub, call, out)?;
        out.extend(scope);
        if let (Some(sym), SubroutineKind::Function(Some(ty))) = (returned, sub.kind) {
            let quantum = self.symbols.get(sym).is_quantum();
            if quantum != (ty == Type::Super) {
                return Err(SemanticError::TypeError {
                    message: format!("`{}` is declared to return {ty}", sub.name.name),
                    pos: call.name.pos,
                });
            }
        }
        Ok(returned)
    }

    /// Binds arguments, lowers the body in a new frame and wraps it in a
    /// `Scope` (absent when the body lowers to nothing).
    fn expand(
        &mut self,
        sub: &Subroutine,
        call: &Call,
        out: &mut Vec<LStmt>,
    ) -> Result<(Option<LStmt>, Option<SymId>)> {
        let mut params = HashMap::new();
        for (param, arg) in sub.params.iter().zip(&call.args) {
            let sym = match param.ty {
                Type::Super => match self.operand(arg, out)? {
                    Operand::Quantum(QExpr::Sym(s)) => s,
                    Operand::Quantum(expr) => self.compute("tmp", expr, arg.pos(), out),
                    Operand::Classical(_) => {
                        return Err(SemanticError::TypeError {
                            message: format!("parameter `{}` expects a quantum argument", param.name.name),
                            pos: arg.pos(),
                        })
                    }
                },
                Type::Int => match arg {
                    Expr::Var(id) if !self.symbols.get(self.resolve(id)?).is_quantum() => {
                        self.resolve(id)?
                    }
                    _ => match self.operand(arg, out)? {
                        Operand::Classical(v) => self.new_classical(&param.name.name, v, arg.pos()),
                        Operand::Quantum(_) => {
                            return Err(SemanticError::TypeError {
                                message: format!(
                                    "parameter `{}` expects a classical argument",
                                    param.name.name
                                ),
                                pos: arg.pos(),
                            })
                        }
                    },
                },
            };
            if params.insert(param.name.name.clone(), sym).is_some() {
                return Err(SemanticError::Redeclared {
                    name: param.name.name.clone(),
                    pos: param.name.pos,
                });
            }
        }

        self.frames.push(Frame::new(&sub.name.name, self.qdepth, params));
        let mut body = Vec::new();
        let flow = self.block(&sub.body, &mut body);
        let frame = self.frames.pop().expect("pushed above");
        flow?;

        let release = self.releasable(&frame, &body);
        for sym in &frame.named_locals {
            if Some(*sym) != frame.returned && !release.contains(sym) {
                self.warnings.push(Diagnostic::warning(
                    "LocalNotUncomputed",
                    format!(
                        "quantum local `{}` in `{}` stays allocated",
                        self.symbols.get(*sym).source_name,
                        frame.name
                    ),
                    Some(self.symbols.get(*sym).pos),
                ));
            }
        }
        let scope = (!body.is_empty()).then(|| LStmt::Scope {
            name: frame.name.clone(),
            body,
            release,
        });
        Ok((scope, frame.returned))
    }

    /// Locals computed at the top level of `body` whose inputs are left
    /// untouched afterwards, latest first.
    fn releasable(&self, frame: &Frame, body: &[LStmt]) -> Vec<SymId> {
        let locals: HashSet<SymId> = frame.locals.iter().copied().collect();
        let mut release = Vec::new();
        for (i, stmt) in body.iter().enumerate() {
            let LStmt::Compute { sym, expr } = stmt else {
                continue;
            };
            if !locals.contains(sym) || Some(*sym) == frame.returned {
                continue;
            }
            let mut touched = BTreeSet::new();
            writes(&body[i + 1..], &mut touched);
            let mut inputs = BTreeSet::new();
            expr.symbols(&mut inputs);
            inputs.insert(*sym);
            if inputs.is_disjoint(&touched) {
                release.push(*sym);
            }
        }
        release.reverse();
        release
    }
}
