//! Source text to syntax tree.

pub mod ast;
mod dump;
mod lexer;
mod parser;

pub use dump::{dump_ast, dump_tokens};
pub use lexer::{tokenize, LexError, Pos, Token, TokenKind, INTRINSICS, KEYWORDS};
pub use parser::{parse, ParseError};
