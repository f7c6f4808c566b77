use thiserror::Error;

use crate::circuit_ir::{IrError, Tape};
use crate::diagnostic::Diagnostic;
use crate::frontend::ast::Program;
use crate::frontend::{parse, tokenize, LexError, ParseError, Pos, Token};
use crate::qasm::{emit, QasmError};
use crate::semantics::{analyze, estimate_resources_with, LoweredProgram, ResourcePlan, SemanticError};
use crate::synth::{synthesize, SynthOptions};

/// Grover parameters forwarded to circuit construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CompileOptions {
    pub synth: SynthOptions,
}

/// Every intermediate product of one compilation.
#[derive(Debug, Clone)]
pub struct Compilation {
    pub tokens: Vec<Token>,
    pub program: Program,
    pub lowered: LoweredProgram,
    pub plan: ResourcePlan,
    pub tape: Tape,
    pub qasm: String,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error(transparent)]
    Qasm(#[from] QasmError),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Lex(_) => "LexError",
            Error::Parse(e) => e.code(),
            Error::Semantic(e) => e.code(),
            Error::Ir(_) => "IrError",
            Error::Qasm(e) => e.code(),
        }
    }

    pub fn pos(&self) -> Option<Pos> {
        match self {
            Error::Lex(e) => Some(e.pos()),
            Error::Parse(e) => e.pos(),
            Error::Semantic(e) => Some(e.pos()),
            Error::Ir(_) | Error::Qasm(_) => None,
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(self.code(), self.to_string(), self.pos())
    }
}

/// Runs the whole pipeline on `source`.
pub fn compile(source: &str, options: &CompileOptions) -> Result<Compilation, Error> {
    let tokens = tokenize(source)?;
    let program = parse(&tokens)?;
    let lowered = analyze(&program)?;
    let plan = estimate_resources_with(&lowered, &options.synth);
    let tape = synthesize(&lowered, &options.synth)?;
    let qasm = emit(&tape)?;
    let mut warnings: Vec<Diagnostic> = program
        .warnings
        .iter()
        .map(|(pos, msg)| Diagnostic::warning("ForHeaderComma", msg.clone(), Some(*pos)))
        .collect();
    warnings.extend(lowered.warnings.iter().cloned());
    Ok(Compilation {
        tokens,
        program,
        lowered,
        plan,
        tape,
        qasm,
        warnings,
    })
}
