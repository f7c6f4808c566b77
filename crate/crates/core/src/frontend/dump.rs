use std::fmt::Write;

use super::ast::*;
use super::lexer::Token;

/// One token per line: `line:col kind lexeme`.
pub fn dump_tokens(tokens: &[Token]) -> String {
    let mut out = String::new();
    for t in tokens {
        let _ = writeln!(out, "{} {} {}", t.pos, t.kind, t.lexeme);
    }
    out
}

/// Renders the tree one node per line, indented two spaces per depth.
pub fn dump_ast(program: &Program) -> String {
    let mut d = Dumper::default();
    d.line("program");
    d.depth += 1;
    for s in &program.subroutines {
        d.subroutine(s);
    }
    d.out
}

#[derive(Default)]
struct Dumper {
    out: String,
    depth: usize,
}

impl Dumper {
    fn line(&mut self, text: impl AsRef<str>) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        self.out.push_str(text.as_ref());
        self.out.push('\n');
    }

    fn nested(&mut self, f: impl FnOnce(&mut Self)) {
        self.depth += 1;
        f(self);
        self.depth -= 1;
    }

    fn subroutine(&mut self, s: &Subroutine) {
        let header = match s.kind {
            SubroutineKind::Function(Some(ty)) => format!("function {} -> {ty}", s.name.name),
            SubroutineKind::Function(None) => format!("function {}", s.name.name),
            SubroutineKind::Oracle => format!("oracle {}", s.name.name),
        };
        self.line(header);
        self.nested(|d| {
            let mut params = String::from("params");
            for p in &s.params {
                let _ = write!(params, " {} {}", p.ty, p.name.name);
            }
            d.line(params);
            d.body(&s.body);
        });
    }

    fn body(&mut self, body: &[Stmt]) {
        if body.is_empty() {
            self.line("body (empty)");
            return;
        }
        self.line("body");
        self.nested(|d| body.iter().for_each(|s| d.stmt(s)));
    }

    fn stmt(&mut self, stmt: &Stmt) {
        match stmt {
            Stmt::Declare { ty, name, value } => {
                self.line(format!("assignment {ty} {}", name.name));
                self.nested(|d| d.expr(value));
            }
            Stmt::Assign { name, op, value } => {
                self.line(format!("assignment {} {}", name.name, op.symbol()));
                self.nested(|d| d.expr(value));
            }
            Stmt::Call(call) => self.call(call),
            Stmt::Measure(id) => self.line(format!("measure {}", id.name)),
            Stmt::Return(id) => self.line(format!("return {}", id.name)),
            Stmt::For {
                init,
                cond,
                step,
                body,
                ..
            } => {
                self.line("for");
                self.nested(|d| {
                    d.stmt(init);
                    d.expr(cond);
                    d.stmt(step);
                    d.body(body);
                });
            }
            Stmt::While { cond, body, .. } => {
                self.line("while");
                self.nested(|d| {
                    d.expr(cond);
                    d.body(body);
                });
            }
            Stmt::If { arms, otherwise } => {
                for (i, arm) in arms.iter().enumerate() {
                    self.line(if i == 0 { "if" } else { "elsif" });
                    self.nested(|d| {
                        d.expr(&arm.cond);
                        d.body(&arm.body);
                    });
                }
                if let Some(body) = otherwise {
                    self.line("else");
                    self.nested(|d| d.body(body));
                }
            }
        }
    }

    fn call(&mut self, call: &Call) {
        let kind = match call.callee {
            Callee::Gate(_) => "gate-call",
            Callee::User { oracle: true } => "ocall",
            Callee::User { oracle: false } | Callee::Intrinsic(_) => "fcall",
        };
        self.line(format!("{kind} {}", call.name.name));
        self.nested(|d| call.args.iter().for_each(|a| d.expr(a)));
    }

    fn expr(&mut self, expr: &Expr) {
        match expr {
            Expr::Int { value, .. } => self.line(format!("integer {value}")),
            Expr::Var(id) => self.line(format!("identifier {}", id.name)),
            Expr::Call(call) => self.call(call),
            Expr::Binary { op, lhs, rhs, .. } => {
                self.line(format!("operation {}", op.symbol()));
                self.nested(|d| {
                    d.expr(lhs);
                    d.expr(rhs);
                });
            }
        }
    }
}
