use std::fmt;

use crate::frontend::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A rendered compiler message: `error[CODE]: message (line:col)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub pos: Option<Pos>,
}

impl Diagnostic {
    pub fn warning(code: &'static str, message: impl Into<String>, pos: Option<Pos>) -> Self {
        Self {
            severity: Severity::Warning,
            code,
            message: message.into(),
            pos,
        }
    }

    pub fn error(code: &'static str, message: impl Into<String>, pos: Option<Pos>) -> Self {
        Self {
            severity: Severity::Error,
            code,
            message: message.into(),
            pos,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{level}[{}]: {}", self.code, self.message)?;
        if let Some(pos) = self.pos {
            write!(f, " ({pos})")?;
        }
        Ok(())
    }
}
