//! Recursive-descent parser over the token stream.
//!
//! The grammar follows the HODL EBNF, widened where the language's own
//! listings go further than the EBNF does: `measure`, gate calls and the
//! intrinsics are statements, compound assignment works on declared
//! variables, and `for` headers accept `;` (or, with a warning, `,`).
//!
//! Binary operator precedence, loosest first: `|`, `&`, `== !=`,
//! `< > <= >=`, `+ -`, `*`. All are left-associative.

use std::collections::HashSet;

use thiserror::Error;

use super::ast::*;
use super::lexer::{Pos, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("expected {expected}, found {found}")]
    Syntax {
        expected: String,
        found: String,
        pos: Pos,
    },
    #[error("integer literal `{lexeme}` does not fit in 64 bits")]
    NumberOutOfRange { lexeme: String, pos: Pos },
    #[error("subroutine `{name}` is defined more than once")]
    DuplicateSubroutine { name: String, pos: Pos },
    #[error("program has no `main` function")]
    MissingMain,
}

impl ParseError {
    pub fn pos(&self) -> Option<Pos> {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::NumberOutOfRange { pos, .. }
            | ParseError::DuplicateSubroutine { pos, .. } => Some(*pos),
            ParseError::MissingMain => None,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "SyntaxError",
            ParseError::NumberOutOfRange { .. } => "NumberOutOfRange",
            ParseError::DuplicateSubroutine { .. } => "DuplicateSubroutine",
            ParseError::MissingMain => "MissingMain",
        }
    }
}

type Result<T> = std::result::Result<T, ParseError>;

/// Parses a token list into a program. Requires a subroutine named `main`.
pub fn parse(tokens: &[Token]) -> Result<Program> {
    let mut p = Parser {
        tokens,
        at: 0,
        in_oracle: false,
        warnings: Vec::new(),
    };
    let mut subroutines = Vec::new();
    while !p.at_end() {
        subroutines.push(p.subroutine()?);
    }

    let mut seen = HashSet::new();
    for s in &subroutines {
        if !seen.insert(s.name.name.clone()) {
            return Err(ParseError::DuplicateSubroutine {
                name: s.name.name.clone(),
                pos: s.name.pos,
            });
        }
    }
    if !seen.contains("main") {
        return Err(ParseError::MissingMain);
    }

    let oracles: HashSet<String> = subroutines
        .iter()
        .filter(|s| s.kind == SubroutineKind::Oracle)
        .map(|s| s.name.name.clone())
        .collect();
    for s in &mut subroutines {
        resolve_block(&mut s.body, &oracles);
    }

    Ok(Program {
        subroutines,
        warnings: p.warnings,
    })
}

fn resolve_block(body: &mut [Stmt], oracles: &HashSet<String>) {
    for stmt in body {
        match stmt {
            Stmt::Declare { value, .. } | Stmt::Assign { value, .. } => {
                resolve_expr(value, oracles)
            }
            Stmt::Call(call) => resolve_call(call, oracles),
            Stmt::Measure(_) | Stmt::Return(_) => {}
            Stmt::For {
                init,
                cond,
                step,
                body,
                ..
            } => {
                resolve_block(std::slice::from_mut(init.as_mut()), oracles);
                resolve_expr(cond, oracles);
                resolve_block(std::slice::from_mut(step.as_mut()), oracles);
                resolve_block(body, oracles);
            }
            Stmt::While { cond, body, .. } => {
                resolve_expr(cond, oracles);
                resolve_block(body, oracles);
            }
            Stmt::If { arms, otherwise } => {
                for arm in arms {
                    resolve_expr(&mut arm.cond, oracles);
                    resolve_block(&mut arm.body, oracles);
                }
                if let Some(body) = otherwise {
                    resolve_block(body, oracles);
                }
            }
        }
    }
}

fn resolve_call(call: &mut Call, oracles: &HashSet<String>) {
    if let Callee::User { oracle } = &mut call.callee {
        *oracle = oracles.contains(&call.name.name);
    }
    for arg in &mut call.args {
        resolve_expr(arg, oracles);
    }
}

fn resolve_expr(expr: &mut Expr, oracles: &HashSet<String>) {
    match expr {
        Expr::Int { .. } | Expr::Var(_) => {}
        Expr::Call(call) => resolve_call(call, oracles),
        Expr::Binary { lhs, rhs, .. } => {
            resolve_expr(lhs, oracles);
            resolve_expr(rhs, oracles);
        }
    }
}

struct Parser<'t> {
    tokens: &'t [Token],
    at: usize,
    in_oracle: bool,
    warnings: Vec<(Pos, String)>,
}

impl<'t> Parser<'t> {
    fn at_end(&self) -> bool {
        self.at >= self.tokens.len()
    }

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.at)
    }

    fn peek_at(&self, ahead: usize) -> Option<&'t Token> {
        self.tokens.get(self.at + ahead)
    }

    fn end_pos(&self) -> Pos {
        match self.tokens.last() {
            Some(t) => Pos::new(t.pos.line, t.pos.col + t.lexeme.chars().count() as u32),
            None => Pos::new(1, 1),
        }
    }

    fn error<T>(&self, expected: impl Into<String>) -> Result<T> {
        let (found, pos) = match self.peek() {
            Some(t) => (format!("{} `{}`", t.kind, t.lexeme), t.pos),
            None => ("end of input".to_string(), self.end_pos()),
        };
        Err(ParseError::Syntax {
            expected: expected.into(),
            found,
            pos,
        })
    }

    fn check(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.peek().is_some_and(|t| t.is(kind, lexeme))
    }

    fn eat(&mut self, kind: TokenKind, lexeme: &str) -> bool {
        if self.check(kind, lexeme) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind, lexeme: &str) -> Result<&'t Token> {
        if self.check(kind, lexeme) {
            self.at += 1;
            Ok(&self.tokens[self.at - 1])
        } else {
            self.error(format!("`{lexeme}`"))
        }
    }

    fn punct(&mut self, p: &str) -> Result<&'t Token> {
        self.expect(TokenKind::Punct, p)
    }

    fn ident(&mut self) -> Result<Ident> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                self.at += 1;
                Ok(Ident {
                    name: t.lexeme.clone(),
                    pos: t.pos,
                })
            }
            _ => self.error("identifier"),
        }
    }

    fn peek_type(&self) -> Option<Type> {
        match self.peek() {
            Some(t) if t.is(TokenKind::Keyword, "int") => Some(Type::Int),
            Some(t) if t.is(TokenKind::Keyword, "super") => Some(Type::Super),
            _ => None,
        }
    }

    fn subroutine(&mut self) -> Result<Subroutine> {
        let kind = if self.eat(TokenKind::Keyword, "oracle") {
            SubroutineKind::Oracle
        } else {
            let ret = self.peek_type();
            if ret.is_some() {
                self.at += 1;
            }
            if !self.eat(TokenKind::Keyword, "function") {
                return self.error("`function` or `oracle`");
            }
            SubroutineKind::Function(ret)
        };
        let name = self.ident()?;
        let params = self.params()?;
        self.in_oracle = kind == SubroutineKind::Oracle;
        let body = self.block()?;
        self.in_oracle = false;
        Ok(Subroutine {
            kind,
            name,
            params,
            body,
        })
    }

    fn params(&mut self) -> Result<Vec<Param>> {
        self.punct("(")?;
        let mut params = Vec::new();
        loop {
            if self.eat(TokenKind::Punct, ")") {
                return Ok(params);
            }
            let Some(ty) = self.peek_type() else {
                return self.error("parameter type or `)`");
            };
            self.at += 1;
            params.push(Param {
                ty,
                name: self.ident()?,
            });
            if !self.eat(TokenKind::Punct, ",") && !self.check(TokenKind::Punct, ")") {
                return self.error("`,` or `)`");
            }
        }
    }

    fn block(&mut self) -> Result<Vec<Stmt>> {
        self.punct("{")?;
        let mut body = Vec::new();
        while !self.eat(TokenKind::Punct, "}") {
            if self.at_end() {
                return self.error("`}`");
            }
            body.push(self.statement()?);
        }
        Ok(body)
    }

    fn statement(&mut self) -> Result<Stmt> {
        let Some(tok) = self.peek() else {
            return self.error("statement");
        };
        match (tok.kind, tok.lexeme.as_str()) {
            (TokenKind::Keyword, "int" | "super") => {
                let stmt = self.declaration()?;
                self.punct(";")?;
                Ok(stmt)
            }
            (TokenKind::Keyword, "measure") => {
                self.at += 1;
                let id = self.ident()?;
                self.punct(";")?;
                Ok(Stmt::Measure(id))
            }
            (TokenKind::Keyword, "return") if !self.in_oracle => {
                self.at += 1;
                let id = self.ident()?;
                self.punct(";")?;
                Ok(Stmt::Return(id))
            }
            (TokenKind::Keyword, "for") => self.for_loop(),
            (TokenKind::Keyword, "while") => {
                self.at += 1;
                self.punct("(")?;
                let cond = self.expr()?;
                self.punct(")")?;
                let body = self.block()?;
                Ok(Stmt::While {
                    pos: tok.pos,
                    cond,
                    body,
                })
            }
            (TokenKind::Keyword, "if") => self.conditional(),
            (TokenKind::Identifier | TokenKind::Intrinsic, _)
                if self.peek_at(1).is_some_and(|t| t.is(TokenKind::Punct, "(")) =>
            {
                let call = self.call()?;
                self.punct(";")?;
                Ok(Stmt::Call(call))
            }
            (TokenKind::Identifier, _) => {
                let stmt = self.assignment()?;
                self.punct(";")?;
                Ok(stmt)
            }
            _ => self.error("statement"),
        }
    }

    fn declaration(&mut self) -> Result<Stmt> {
        let ty = self.peek_type().expect("caller checked for a type");
        self.at += 1;
        let name = self.ident()?;
        self.expect(TokenKind::Operator, "=")?;
        let value = self.expr()?;
        Ok(Stmt::Declare { ty, name, value })
    }

    fn assignment(&mut self) -> Result<Stmt> {
        let name = self.ident()?;
        let op = match self.peek().map(|t| (t.kind, t.lexeme.as_str())) {
            Some((TokenKind::Operator, "=")) => AssignOp::Set,
            Some((TokenKind::Operator, "+=")) => AssignOp::Add,
            Some((TokenKind::Operator, "-=")) => AssignOp::Sub,
            Some((TokenKind::Operator, "*=")) => AssignOp::Mul,
            _ => return self.error("assignment operator"),
        };
        self.at += 1;
        let value = self.expr()?;
        Ok(Stmt::Assign { name, op, value })
    }

    fn simple_statement(&mut self) -> Result<Stmt> {
        if self.peek_type().is_some() {
            self.declaration()
        } else {
            self.assignment()
        }
    }

    fn for_separator(&mut self) -> Result<()> {
        if self.eat(TokenKind::Punct, ";") {
            return Ok(());
        }
        if let Some(t) = self.peek().filter(|t| t.is(TokenKind::Punct, ",")) {
            self.warnings
                .push((t.pos, "`for` header parts should be separated by `;`".into()));
            self.at += 1;
            return Ok(());
        }
        self.error("`;`")
    }

    fn for_loop(&mut self) -> Result<Stmt> {
        let pos = self.expect(TokenKind::Keyword, "for")?.pos;
        self.punct("(")?;
        let init = self.simple_statement()?;
        self.for_separator()?;
        let cond = self.expr()?;
        self.for_separator()?;
        let step = self.simple_statement()?;
        self.punct(")")?;
        let body = self.block()?;
        Ok(Stmt::For {
            pos,
            init: Box::new(init),
            cond,
            step: Box::new(step),
            body,
        })
    }

    fn conditional(&mut self) -> Result<Stmt> {
        let mut arms = Vec::new();
        let mut keyword = "if";
        loop {
            let pos = self.expect(TokenKind::Keyword, keyword)?.pos;
            self.punct("(")?;
            let cond = self.expr()?;
            self.punct(")")?;
            let body = self.block()?;
            arms.push(CondArm { pos, cond, body });
            if !self.check(TokenKind::Keyword, "elsif") {
                break;
            }
            keyword = "elsif";
        }
        let otherwise = if self.eat(TokenKind::Keyword, "else") {
            Some(self.block()?)
        } else {
            None
        };
        Ok(Stmt::If { arms, otherwise })
    }

    fn call(&mut self) -> Result<Call> {
        let tok = self.peek().expect("caller checked for a name");
        self.at += 1;
        let callee = match (tok.kind, tok.lexeme.as_str()) {
            (TokenKind::Intrinsic, "mark") => Callee::Intrinsic(Intrinsic::Mark),
            (TokenKind::Intrinsic, _) => Callee::Intrinsic(Intrinsic::Filter),
            (_, name) => match GateName::from_name(name) {
                Some(g) => Callee::Gate(g),
                None => Callee::User { oracle: false },
            },
        };
        let name = Ident {
            name: tok.lexeme.clone(),
            pos: tok.pos,
        };
        self.punct("(")?;
        let mut args = Vec::new();
        if !self.eat(TokenKind::Punct, ")") {
            loop {
                args.push(self.expr()?);
                if self.eat(TokenKind::Punct, ")") {
                    break;
                }
                self.punct(",")?;
            }
        }
        Ok(Call { name, callee, args })
    }

    fn expr(&mut self) -> Result<Expr> {
        self.binary(0)
    }

    fn binary(&mut self, level: usize) -> Result<Expr> {
        const LEVELS: [&[(&str, BinOp)]; 6] = [
            &[("|", BinOp::Or)],
            &[("&", BinOp::And)],
            &[("==", BinOp::Eq), ("!=", BinOp::Ne)],
            &[
                ("<", BinOp::Lt),
                (">", BinOp::Gt),
                ("<=", BinOp::Le),
                (">=", BinOp::Ge),
            ],
            &[("+", BinOp::Add), ("-", BinOp::Sub)],
            &[("*", BinOp::Mul)],
        ];
        if level == LEVELS.len() {
            return self.primary();
        }
        let mut lhs = self.binary(level + 1)?;
        while let Some(tok) = self.peek().filter(|t| t.kind == TokenKind::Operator) {
            let Some(&(_, op)) = LEVELS[level].iter().find(|(s, _)| *s == tok.lexeme) else {
                break;
            };
            self.at += 1;
            let rhs = self.binary(level + 1)?;
            lhs = Expr::Binary {
                op,
                pos: tok.pos,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> Result<Expr> {
        let Some(tok) = self.peek() else {
            return self.error("expression");
        };
        match tok.kind {
            TokenKind::Number => {
                self.at += 1;
                let value = tok
                    .lexeme
                    .parse::<i64>()
                    .map_err(|_| ParseError::NumberOutOfRange {
                        lexeme: tok.lexeme.clone(),
                        pos: tok.pos,
                    })?;
                Ok(Expr::Int {
                    value,
                    pos: tok.pos,
                })
            }
            TokenKind::Identifier
                if self.peek_at(1).is_some_and(|t| t.is(TokenKind::Punct, "(")) =>
            {
                Ok(Expr::Call(self.call()?))
            }
            TokenKind::Identifier => Ok(Expr::Var(self.ident()?)),
            TokenKind::Punct if tok.lexeme == "(" => {
                self.at += 1;
                let e = self.expr()?;
                self.punct(")")?;
                Ok(e)
            }
            _ => self.error("expression"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::lexer::{tokenize, KEYWORDS};

    fn parse_src(src: &str) -> Result<Program> {
        parse(&tokenize(src).unwrap())
    }

    #[test]
    fn minimal_program() {
        let p = parse_src("function main() { }").unwrap();
        assert_eq!(p.subroutines.len(), 1);
        assert!(p.subroutines[0].body.is_empty());
        assert_eq!(p.subroutines[0].kind, SubroutineKind::Function(None));
    }

    #[test]
    fn grover_listing_shape() {
        let src = "oracle some_oracle(super var) {\n if(var * 4 < 4) { mark(var,pi); }\n}\n\
                   function main() { super variable = 8; filter(some_oracle(variable), variable); measure variable; }";
        let p = parse_src(src).unwrap();
        let oracle = &p.subroutines[0];
        assert_eq!(oracle.kind, SubroutineKind::Oracle);
        assert_eq!(oracle.params[0].ty, Type::Super);
        assert!(matches!(oracle.body[0], Stmt::If { .. }));
        let main = p.subroutine("main").unwrap();
        assert!(matches!(main.body[0], Stmt::Declare { ty: Type::Super, .. }));
        let Stmt::Call(filter) = &main.body[1] else {
            panic!("expected call");
        };
        assert_eq!(filter.callee, Callee::Intrinsic(Intrinsic::Filter));
        let Expr::Call(inner) = &filter.args[0] else {
            panic!("expected oracle call argument");
        };
        assert_eq!(inner.callee, Callee::User { oracle: true });
        assert!(matches!(main.body[2], Stmt::Measure(_)));
    }

    #[test]
    fn oracle_cannot_return() {
        let err = parse_src("oracle o() { return x; } function main() {}").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { pos, .. } if pos == Pos::new(1, 14)));
        assert!(parse_src("super function f() { super x = 2; return x; } function main() {}").is_ok());
    }

    #[test]
    fn missing_main() {
        assert_eq!(parse_src("function helper() {}"), Err(ParseError::MissingMain));
    }

    #[test]
    fn keywords_are_not_identifiers() {
        for k in KEYWORDS {
            let src = format!("function main() {{ int {k} = 1; }}");
            assert!(parse_src(&src).is_err(), "{k} accepted as identifier");
        }
    }

    #[test]
    fn precedence() {
        let p = parse_src("function main() { int a = 1 + 2 * 3 < 4 & 5 == 6 | 7; }").unwrap();
        let Stmt::Declare { value, .. } = &p.subroutines[0].body[0] else {
            panic!()
        };
        let Expr::Binary { op, lhs, .. } = value else {
            panic!()
        };
        assert_eq!(*op, BinOp::Or);
        let Expr::Binary { op, lhs, rhs, .. } = lhs.as_ref() else {
            panic!()
        };
        assert_eq!(*op, BinOp::And);
        assert!(matches!(rhs.as_ref(), Expr::Binary { op: BinOp::Eq, .. }));
        let Expr::Binary { op, lhs, .. } = lhs.as_ref() else {
            panic!()
        };
        assert_eq!(*op, BinOp::Lt);
        assert!(matches!(lhs.as_ref(), Expr::Binary { op: BinOp::Add, .. }));
    }

    #[test]
    fn left_associative() {
        let p = parse_src("function main() { int a = 8 - 2 - 1; }").unwrap();
        let Stmt::Declare { value, .. } = &p.subroutines[0].body[0] else {
            panic!()
        };
        let Expr::Binary { lhs, .. } = value else {
            panic!()
        };
        assert!(matches!(lhs.as_ref(), Expr::Binary { op: BinOp::Sub, .. }));
    }

    #[test]
    fn for_header_separators() {
        let p = parse_src("function main() { for(int i = 0; i < 5; i += 1) { } }").unwrap();
        assert!(p.warnings.is_empty());
        let p = parse_src("function main() { for(int i = 0, i < 5, i += 1) { } }").unwrap();
        assert_eq!(p.warnings.len(), 2);
    }

    #[test]
    fn elsif_without_if() {
        assert!(parse_src("function main() { elsif(1) { } }").is_err());
        assert!(parse_src("function main() { else { } }").is_err());
    }

    #[test]
    fn conditional_chain() {
        let p = parse_src("function main() { if(1){} elsif(2){} elsif(3){} else{} }").unwrap();
        let Stmt::If { arms, otherwise } = &p.subroutines[0].body[0] else {
            panic!()
        };
        assert_eq!(arms.len(), 3);
        assert!(otherwise.is_some());
    }

    #[test]
    fn error_position_points_at_offending_token() {
        let err = parse_src("function main() {\n  super a = 4\n  int b = 2;\n}").unwrap_err();
        match err {
            ParseError::Syntax { pos, found, .. } => {
                assert_eq!(pos, Pos::new(3, 3));
                assert!(found.contains("int"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oversized_literal() {
        let err = parse_src("function main() { int a = 99999999999999999999; }").unwrap_err();
        assert!(matches!(err, ParseError::NumberOutOfRange { .. }));
    }
}
