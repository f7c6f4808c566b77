use std::fmt;

use thiserror::Error;

/// A 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Self { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

pub const KEYWORDS: [&str; 11] = [
    "else", "elsif", "for", "function", "if", "int", "measure", "oracle", "return", "super",
    "while",
];

pub const INTRINSICS: [&str; 2] = ["mark", "filter"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword,
    Intrinsic,
    Identifier,
    Number,
    Operator,
    Punct,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Keyword => "keyword",
            TokenKind::Intrinsic => "intrinsic",
            TokenKind::Identifier => "identifier",
            TokenKind::Number => "number",
            TokenKind::Operator => "operator",
            TokenKind::Punct => "punct",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub pos: Pos,
    /// Byte offset of the lexeme in the source.
    pub offset: usize,
}

impl Token {
    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("unknown character {ch:?}")]
    UnknownCharacter { ch: char, pos: Pos },
}

impl LexError {
    pub fn pos(&self) -> Pos {
        match self {
            LexError::UnknownCharacter { pos, .. } => *pos,
        }
    }
}

// Longest operators first so that maximal munch falls out of the scan order.
const OPERATORS: [&str; 15] = [
    "+=", "-=", "*=", "<=", ">=", "==", "!=", "+", "-", "*", "<", ">", "=", "&", "|",
];
const PUNCT: [char; 6] = ['(', ')', '{', '}', ';', ','];

struct Cursor<'a> {
    src: &'a str,
    offset: usize,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.offset..]
    }

    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    fn bump(&mut self, len: usize) {
        for ch in self.src[self.offset..self.offset + len].chars() {
            if ch == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
        self.offset += len;
    }
}

/// Splits HODL source into tokens. `#` starts a comment that runs to the end
/// of the line; comments and whitespace produce no tokens.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor {
        src: source,
        offset: 0,
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();

    while let Some(ch) = cur.rest().chars().next() {
        if ch.is_whitespace() {
            cur.bump(ch.len_utf8());
            continue;
        }
        if ch == '#' {
            let len = cur.rest().find('\n').unwrap_or(cur.rest().len());
            cur.bump(len);
            continue;
        }

        let start = cur.offset;
        let pos = cur.pos();
        let (kind, len) = if ch.is_ascii_alphabetic() {
            let len = cur
                .rest()
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .unwrap_or(cur.rest().len());
            let word = &cur.rest()[..len];
            let kind = if KEYWORDS.contains(&word) {
                TokenKind::Keyword
            } else if INTRINSICS.contains(&word) {
                TokenKind::Intrinsic
            } else {
                TokenKind::Identifier
            };
            (kind, len)
        } else if ch.is_ascii_digit() {
            let len = cur
                .rest()
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(cur.rest().len());
            (TokenKind::Number, len)
        } else if let Some(op) = OPERATORS.iter().find(|op| cur.rest().starts_with(*op)) {
            (TokenKind::Operator, op.len())
        } else if PUNCT.contains(&ch) {
            (TokenKind::Punct, 1)
        } else {
            return Err(LexError::UnknownCharacter { ch, pos });
        };

        cur.bump(len);
        tokens.push(Token {
            kind,
            lexeme: source[start..start + len].to_string(),
            pos,
            offset: start,
        });
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src)
            .unwrap()
            .into_iter()
            .map(|t| (t.kind, t.lexeme))
            .collect()
    }

    #[test]
    fn declaration() {
        use TokenKind::*;
        let expected = [
            (Keyword, "super"),
            (Identifier, "a"),
            (Operator, "="),
            (Number, "4"),
            (Punct, ";"),
        ];
        let got = kinds("super a = 4;");
        assert_eq!(got.len(), expected.len());
        for ((k, l), (ek, el)) in got.iter().zip(expected) {
            assert_eq!((*k, l.as_str()), (ek, el));
        }
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").unwrap().is_empty());
        assert!(tokenize("  # only a comment\n\t").unwrap().is_empty());
    }

    #[test]
    fn keyword_prefix_is_identifier() {
        assert_eq!(kinds("iffy"), vec![(TokenKind::Identifier, "iffy".into())]);
        assert_eq!(kinds("superb"), vec![(TokenKind::Identifier, "superb".into())]);
        assert_eq!(kinds("mark_x"), vec![(TokenKind::Identifier, "mark_x".into())]);
    }

    #[test]
    fn intrinsics() {
        assert_eq!(kinds("mark")[0].0, TokenKind::Intrinsic);
        assert_eq!(kinds("filter")[0].0, TokenKind::Intrinsic);
    }

    #[test]
    fn maximal_munch() {
        for op in ["+=", "-=", "*=", "<=", ">=", "==", "!="] {
            let toks = tokenize(op).unwrap();
            assert_eq!(toks.len(), 1, "{op}");
            assert_eq!(toks[0].kind, TokenKind::Operator);
            assert_eq!(toks[0].lexeme, op);
        }
        assert_eq!(kinds("< =").len(), 2);
    }

    #[test]
    fn positions() {
        let toks = tokenize("function main() {\n  super a = 4;\n}").unwrap();
        let a = toks.iter().find(|t| t.lexeme == "a").unwrap();
        assert_eq!(a.pos, Pos::new(2, 9));
        let close = toks.last().unwrap();
        assert_eq!(close.pos, Pos::new(3, 1));
    }

    #[test]
    fn unknown_character() {
        let err = tokenize("int a = 1;\nint b = a / 2;").unwrap_err();
        assert_eq!(
            err,
            LexError::UnknownCharacter {
                ch: '/',
                pos: Pos::new(2, 11)
            }
        );
        assert!(tokenize("_x").is_err());
        assert!(tokenize("a ! b").is_err());
        assert!(tokenize("λ").is_err());
    }

    #[test]
    fn lexemes_and_gaps_rebuild_source() {
        let src = "oracle o(super v) { # c\n if(v*4<=4){mark(v,pi);} }\n";
        let toks = tokenize(src).unwrap();
        let mut rebuilt = String::new();
        let mut at = 0;
        for t in &toks {
            let gap = &src[at..t.offset];
            assert!(gap.trim().is_empty() || gap.trim_start().starts_with('#'));
            rebuilt.push_str(gap);
            rebuilt.push_str(&t.lexeme);
            at = t.offset + t.lexeme.len();
        }
        rebuilt.push_str(&src[at..]);
        assert_eq!(rebuilt, src);
    }
}
