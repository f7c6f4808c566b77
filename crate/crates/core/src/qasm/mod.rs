//! OpenQASM 2.0 output.

mod decompose;
mod emit;
pub(crate) mod reader;
mod roundtrip;

use thiserror::Error;

use crate::circuit_ir::IrError;

pub use decompose::{ccp, decompose, toffoli};
pub use emit::{emit, format_angle};
pub use reader::{read, QubitRef, ReadError, Statement};
pub use roundtrip::validate_roundtrip;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QasmError {
    #[error("tape must be sealed before emission")]
    UnsealedTape,
    #[error("QASM text does not round-trip at line {line}: {message}")]
    ParseMismatch { line: usize, message: String },
    #[error(transparent)]
    Ir(#[from] IrError),
}

impl QasmError {
    pub fn code(&self) -> &'static str {
        match self {
            QasmError::UnsealedTape => "UnsealedTape",
            QasmError::ParseMismatch { .. } => "ParseMismatch",
            QasmError::Ir(_) => "IrError",
        }
    }
}
