//! Type rules, compile-time evaluation and register sizing.
//!
//! [`analyze`] interprets every classical construct while walking `main`:
//! loops are unrolled, classical conditionals pick their branch, and calls
//! are expanded inline. What remains is a flat list of quantum statements
//! over a symbol table whose quantum entries already carry their widths.

mod eval;
mod lower;
mod resources;
pub mod sizing;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::circuit_ir::PhaseAngle;
use crate::diagnostic::Diagnostic;
use crate::frontend::ast::GateName;
use crate::frontend::Pos;

pub use eval::{apply_binop, eval_classical};
pub use lower::{analyze, analyze_with_budget, LOOP_BUDGET};
pub use resources::{estimate_resources, estimate_resources_with, ResourcePlan, TempWidth};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Classical { value: i64 },
    /// `max_value` is the largest basis state the register can hold.
    Quantum { max_value: u64, width: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolEntry {
    /// Unique across the program; used as the register name.
    pub name: String,
    /// Name as written in the source.
    pub source_name: String,
    pub kind: SymbolKind,
    pub pos: Pos,
}

impl SymbolEntry {
    pub fn is_quantum(&self) -> bool {
        matches!(self.kind, SymbolKind::Quantum { .. })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    entries: Vec<SymbolEntry>,
}

impl SymbolTable {
    pub fn get(&self, id: SymId) -> &SymbolEntry {
        &self.entries[id.0]
    }

    pub(crate) fn get_mut(&mut self, id: SymId) -> &mut SymbolEntry {
        &mut self.entries[id.0]
    }

    pub(crate) fn push(&mut self, entry: SymbolEntry) -> SymId {
        self.entries.push(entry);
        SymId(self.entries.len() - 1)
    }

    /// `(max_value, width)` of a quantum symbol.
    pub fn quantum(&self, id: SymId) -> (u64, usize) {
        match self.entries[id.0].kind {
            SymbolKind::Quantum { max_value, width } => (max_value, width),
            SymbolKind::Classical { .. } => panic!("`{}` is classical", self.entries[id.0].name),
        }
    }

    pub fn width(&self, id: SymId) -> usize {
        self.quantum(id).1
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymId, &SymbolEntry)> {
        self.entries.iter().enumerate().map(|(i, e)| (SymId(i), e))
    }

    pub fn find(&self, name: &str) -> Option<(SymId, &SymbolEntry)> {
        self.iter().find(|(_, e)| e.name == name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelOp {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
}

impl RelOp {
    pub const ALL: [RelOp; 6] = [RelOp::Lt, RelOp::Gt, RelOp::Le, RelOp::Ge, RelOp::Eq, RelOp::Ne];

    pub fn holds(self, a: u64, b: u64) -> bool {
        match self {
            RelOp::Lt => a < b,
            RelOp::Gt => a > b,
            RelOp::Le => a <= b,
            RelOp::Ge => a >= b,
            RelOp::Eq => a == b,
            RelOp::Ne => a != b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Gt => ">",
            RelOp::Le => "<=",
            RelOp::Ge => ">=",
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
        }
    }
}

/// Quantum arithmetic over registers and folded constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QExpr {
    Sym(SymId),
    Const(u64),
    Bin(ArithOp, Box<QExpr>, Box<QExpr>),
}

impl QExpr {
    pub fn bin(op: ArithOp, a: QExpr, b: QExpr) -> Self {
        QExpr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn symbols(&self, out: &mut BTreeSet<SymId>) {
        match self {
            QExpr::Sym(s) => {
                out.insert(*s);
            }
            QExpr::Const(_) => {}
            QExpr::Bin(_, a, b) => {
                a.symbols(out);
                b.symbols(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QCond {
    Compare { op: RelOp, lhs: QExpr, rhs: QExpr },
    And(Box<QCond>, Box<QCond>),
    Or(Box<QCond>, Box<QCond>),
}

impl QCond {
    pub fn symbols(&self, out: &mut BTreeSet<SymId>) {
        match self {
            QCond::Compare { lhs, rhs, .. } => {
                lhs.symbols(out);
                rhs.symbols(out);
            }
            QCond::And(a, b) | QCond::Or(a, b) => {
                a.symbols(out);
                b.symbols(out);
            }
        }
    }
}

/// A statement that survives compile-time evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LStmt {
    /// `super v = x`: uniform superposition over `0..x`.
    Superpose { sym: SymId, value: u64 },
    /// `super v = expr` with a quantum right-hand side.
    Compute { sym: SymId, expr: QExpr },
    Gate {
        gate: GateName,
        operands: Vec<SymId>,
        angle: Option<PhaseAngle>,
    },
    /// Quantum conditional chain; `otherwise` runs when no arm holds.
    If {
        arms: Vec<(QCond, Vec<LStmt>)>,
        otherwise: Option<Vec<LStmt>>,
    },
    Mark { target: SymId, angle: PhaseAngle },
    /// Grover search: `body` is the inlined oracle (one `Scope`).
    Filter {
        oracle: String,
        body: Vec<LStmt>,
        register: SymId,
    },
    Measure { sym: SymId, name: String },
    /// An inlined subroutine body. `release` lists locals to uncompute at
    /// the end of the body, latest first.
    Scope {
        name: String,
        body: Vec<LStmt>,
        release: Vec<SymId>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoweredProgram {
    pub symbols: SymbolTable,
    pub body: Vec<LStmt>,
    pub warnings: Vec<Diagnostic>,
}

impl LoweredProgram {
    pub fn quantum_symbols(&self) -> impl Iterator<Item = (SymId, &SymbolEntry)> {
        self.symbols.iter().filter(|(_, e)| e.is_quantum())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticError {
    #[error("{message}")]
    TypeError { message: String, pos: Pos },
    #[error("{what} is not allowed inside a quantum conditional")]
    NonQuantumInQuantumBlock { what: String, pos: Pos },
    #[error("`return` is not allowed inside a quantum conditional")]
    ReturnInQuantumBlock { pos: Pos },
    #[error("`mark` must appear inside a quantum conditional")]
    MarkOutsideConditional { pos: Pos },
    #[error("quantum variables must be initialized with a power of two, found {value}")]
    NotPowerOfTwo { value: i64, pos: Pos },
    #[error("quantum variable `{name}` cannot be reassigned")]
    QuantumReassignment { name: String, pos: Pos },
    #[error("`{name}` is not defined")]
    UndefinedIdentifier { name: String, pos: Pos },
    #[error("condition mixes classical and quantum tests")]
    MixedCondition { pos: Pos },
    #[error("integer overflow in compile-time arithmetic")]
    Overflow { pos: Pos },
    #[error("loop header must be classical")]
    NonClassicalLoopHeader { pos: Pos },
    #[error("loop exceeded {budget} iterations")]
    LoopBudgetExceeded { budget: u64, pos: Pos },
    #[error("recursive call to `{name}` cannot be expanded inline")]
    RecursionUnsupported { name: String, pos: Pos },
    #[error("`{name}` takes {expected} argument(s), {found} given")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
        pos: Pos,
    },
    #[error("oracle `{name}` can only be passed to `filter`")]
    OracleCalledAsFunction { name: String, pos: Pos },
    #[error("`{name}` is already declared in this scope")]
    Redeclared { name: String, pos: Pos },
    #[error("register operands have different widths ({left} and {right})")]
    WidthMismatch { left: usize, right: usize, pos: Pos },
    #[error("gate operands must be distinct registers")]
    OverlappingOperands { pos: Pos },
    #[error("`{name}` is tested by the enclosing condition and cannot be modified in its body")]
    ConditionOperandWritten { name: String, pos: Pos },
    #[error("angle must be an integer multiple of `pi`")]
    InvalidAngle { pos: Pos },
    #[error("negative constant cannot be used with a quantum operand here")]
    NegativeOperand { pos: Pos },
}

impl SemanticError {
    pub fn code(&self) -> &'static str {
        match self {
            SemanticError::TypeError { .. } => "TypeError",
            SemanticError::NonQuantumInQuantumBlock { .. } => "NonQuantumInQuantumBlock",
            SemanticError::ReturnInQuantumBlock { .. } => "ReturnInQuantumBlock",
            SemanticError::MarkOutsideConditional { .. } => "MarkOutsideConditional",
            SemanticError::NotPowerOfTwo { .. } => "NotPowerOfTwo",
            SemanticError::QuantumReassignment { .. } => "QuantumReassignment",
            SemanticError::UndefinedIdentifier { .. } => "UndefinedIdentifier",
            SemanticError::MixedCondition { .. } => "MixedCondition",
            SemanticError::Overflow { .. } => "OverflowError",
            SemanticError::NonClassicalLoopHeader { .. } => "NonClassicalLoopHeader",
            SemanticError::LoopBudgetExceeded { .. } => "LoopBudgetExceeded",
            SemanticError::RecursionUnsupported { .. } => "RecursionUnsupported",
            SemanticError::ArityMismatch { .. } => "ArityMismatch",
            SemanticError::OracleCalledAsFunction { .. } => "OracleCalledAsFunction",
            SemanticError::Redeclared { .. } => "Redeclared",
            SemanticError::WidthMismatch { .. } => "WidthMismatch",
            SemanticError::OverlappingOperands { .. } => "OverlappingOperands",
            SemanticError::ConditionOperandWritten { .. } => "ConditionOperandWritten",
            SemanticError::InvalidAngle { .. } => "InvalidAngle",
            SemanticError::NegativeOperand { .. } => "NegativeOperand",
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            SemanticError::TypeError { pos, .. }
            | SemanticError::NonQuantumInQuantumBlock { pos, .. }
            | SemanticError::ReturnInQuantumBlock { pos }
            | SemanticError::MarkOutsideConditional { pos }
            | SemanticError::NotPowerOfTwo { pos, .. }
            | SemanticError::QuantumReassignment { pos, .. }
            | SemanticError::UndefinedIdentifier { pos, .. }
            | SemanticError::MixedCondition { pos }
            | SemanticError::Overflow { pos }
            | SemanticError::NonClassicalLoopHeader { pos }
            | SemanticError::LoopBudgetExceeded { pos, .. }
            | SemanticError::RecursionUnsupported { pos, .. }
            | SemanticError::ArityMismatch { pos, .. }
            | SemanticError::OracleCalledAsFunction { pos, .. }
            | SemanticError::Redeclared { pos, .. }
            | SemanticError::WidthMismatch { pos, .. }
            | SemanticError::OverlappingOperands { pos }
            | SemanticError::ConditionOperandWritten { pos, .. }
            | SemanticError::InvalidAngle { pos }
            | SemanticError::NegativeOperand { pos } => *pos,
        }
    }
}

impl fmt::Display for QExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QExpr::Sym(s) => write!(f, "${}", s.0),
            QExpr::Const(c) => write!(f, "{c}"),
            QExpr::Bin(op, a, b) => {
                let sym = match op {
                    ArithOp::Add => "+",
                    ArithOp::Sub => "-",
                    ArithOp::Mul => "*",
                };
                write!(f, "({a} {sym} {b})")
            }
        }
    }
}
