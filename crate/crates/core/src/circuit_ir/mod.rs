//! Instruction tape: registers, gates, and scoped uncomputation.

mod angle;
mod gate;
mod tape;

use thiserror::Error;

pub use angle::PhaseAngle;
pub use gate::{invert, CregId, GateInstr, Opcode, Qubit, RegId};
pub use tape::{required_work_qubits, CReg, QReg, RegKind, RegLayout, ScopeMarker, Tape};
pub(crate) use tape::RegEntry;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IrError {
    #[error("gate references unknown register #{0}")]
    UnknownRegister(usize),
    #[error("gate references unknown classical register #{0}")]
    UnknownClassicalRegister(usize),
    #[error("register `{register}` was uncomputed and released but is referenced again")]
    EscapeViolation { register: String },
    #[error("qubit {index} is outside register `{register}`")]
    QubitOutOfRange { register: String, index: usize },
    #[error("gate operands overlap")]
    OverlappingOperands,
    #[error("malformed gate: {0}")]
    MalformedGate(String),
    #[error("segment contains a measurement and cannot be inverted")]
    NonInvertible,
    #[error("uncomputation scopes are not properly nested")]
    ScopeNesting,
    #[error("register `{0}` already exists")]
    DuplicateRegister(String),
    #[error("tape is sealed")]
    Sealed,
}
