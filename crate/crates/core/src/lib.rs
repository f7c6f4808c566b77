//! Compiler for HODL, a C-style language for describing quantum oracles.
//!
//! The pipeline runs source text through [`frontend`] (tokens and syntax
//! tree), [`semantics`] (type rules, compile-time evaluation, inlining and
//! register sizing), [`synth`] (circuit construction on a [`circuit_ir::Tape`])
//! and [`qasm`] (OpenQASM 2.0 output). [`simulator`] runs the emitted QASM on
//! a statevector so compiled circuits can be checked.
//!
//! [`compile`] wires the stages together.

pub mod circuit_ir;
mod diagnostic;
mod driver;
pub mod frontend;
pub mod qasm;
pub mod semantics;
pub mod simulator;
pub mod synth;

pub use circuit_ir::{GateInstr, Opcode, PhaseAngle, QReg, RegKind, Tape};
pub use diagnostic::{Diagnostic, Severity};
pub use driver::{compile, Compilation, CompileOptions, Error};
pub use frontend::{dump_ast, dump_tokens, parse, tokenize, Pos, Token, TokenKind};
pub use semantics::{analyze, estimate_resources, LoweredProgram, ResourcePlan, SemanticError};
pub use simulator::{Circuit, Distribution, StateVector};
pub use synth::SynthOptions;
