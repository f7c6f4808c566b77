use std::collections::HashMap;

use super::SemanticError;
use crate::frontend::ast::{BinOp, Expr};
use crate::frontend::Pos;

/// Applies a binary operator to 64-bit signed integers. Relational and
/// boolean operators yield 0 or 1; any nonzero operand counts as true.
pub fn apply_binop(op: BinOp, a: i64, b: i64, pos: Pos) -> Result<i64, SemanticError> {
    let overflow = || SemanticError::Overflow { pos };
    Ok(match op {
        BinOp::Add => a.checked_add(b).ok_or_else(overflow)?,
        BinOp::Sub => a.checked_sub(b).ok_or_else(overflow)?,
        BinOp::Mul => a.checked_mul(b).ok_or_else(overflow)?,
        BinOp::Lt => (a < b) as i64,
        BinOp::Gt => (a > b) as i64,
        BinOp::Le => (a <= b) as i64,
        BinOp::Ge => (a >= b) as i64,
        BinOp::Eq => (a == b) as i64,
        BinOp::Ne => (a != b) as i64,
        BinOp::And => (a != 0 && b != 0) as i64,
        BinOp::Or => (a != 0 || b != 0) as i64,
    })
}

/// Evaluates a purely classical expression against `env`.
pub fn eval_classical(expr: &Expr, env: &HashMap<String, i64>) -> Result<i64, SemanticError> {
    match expr {
        Expr::Int { value, .. } => Ok(*value),
        Expr::Var(id) => env
            .get(&id.name)
            .copied()
            .ok_or_else(|| SemanticError::UndefinedIdentifier {
                name: id.name.clone(),
                pos: id.pos,
            }),
        Expr::Call(call) => Err(SemanticError::TypeError {
            message: format!("call to `{}` is not a constant expression", call.name.name),
            pos: call.name.pos,
        }),
        Expr::Binary { op, pos, lhs, rhs } => {
            let a = eval_classical(lhs, env)?;
            let b = eval_classical(rhs, env)?;
            apply_binop(*op, a, b, *pos)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse, tokenize};
    use crate::frontend::ast::Stmt;
    use proptest::prelude::*;

    fn expr(src: &str) -> Expr {
        let program = parse(&tokenize(&format!("function main() {{ int x = {src}; }}")).unwrap()).unwrap();
        match &program.subroutines[0].body[0] {
            Stmt::Declare { value, .. } => value.clone(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn arithmetic_and_relations() {
        let empty = HashMap::new();
        assert_eq!(eval_classical(&expr("2 * 3 + 1"), &empty), Ok(7));
        let env = HashMap::from([("i".to_string(), 5)]);
        assert_eq!(eval_classical(&expr("i < 5"), &env), Ok(0));
        let env = HashMap::from([("b".to_string(), 2)]);
        assert_eq!(eval_classical(&expr("b * 8"), &env), Ok(16));
        assert_eq!(eval_classical(&expr("1 & 0 | 1"), &empty), Ok(1));
        assert_eq!(eval_classical(&expr("3 - 5"), &empty), Ok(-2));
    }

    #[test]
    fn overflow() {
        let env = HashMap::from([("m".to_string(), i64::MAX)]);
        assert!(matches!(
            eval_classical(&expr("m + 1"), &env),
            Err(SemanticError::Overflow { .. })
        ));
    }

    #[test]
    fn undefined() {
        assert!(matches!(
            eval_classical(&expr("y + 1"), &HashMap::new()),
            Err(SemanticError::UndefinedIdentifier { .. })
        ));
    }

    #[derive(Debug, Clone)]
    enum Tree {
        Leaf(i64),
        Node(BinOp, Box<Tree>, Box<Tree>),
    }

    impl Tree {
        fn source(&self) -> String {
            match self {
                // Literals are nonnegative, so negatives are written as 0 - n.
                Tree::Leaf(v) if *v < 0 => format!("(0 - {})", -v),
                Tree::Leaf(v) => v.to_string(),
                Tree::Node(op, a, b) => format!("({} {} {})", a.source(), op.symbol(), b.source()),
            }
        }

        // Reference interpreter written directly against i128 to spot overflow.
        fn interpret(&self) -> Option<i64> {
            match self {
                Tree::Leaf(v) => Some(*v),
                Tree::Node(op, a, b) => {
                    let (x, y) = (a.interpret()? as i128, b.interpret()? as i128);
                    let v: i128 = match op {
                        BinOp::Add => x + y,
                        BinOp::Sub => x - y,
                        BinOp::Mul => x * y,
                        BinOp::Lt => (x < y).into(),
                        BinOp::Gt => (x > y).into(),
                        BinOp::Le => (x <= y).into(),
                        BinOp::Ge => (x >= y).into(),
                        BinOp::Eq => (x == y).into(),
                        BinOp::Ne => (x != y).into(),
                        BinOp::And => (x != 0 && y != 0).into(),
                        BinOp::Or => (x != 0 || y != 0).into(),
                    };
                    i64::try_from(v).ok()
                }
            }
        }
    }

    fn tree() -> impl Strategy<Value = Tree> {
        let leaf = (-100i64..=100).prop_map(Tree::Leaf);
        leaf.prop_recursive(6, 64, 2, |inner| {
            let ops = prop::sample::select(vec![
                BinOp::Add,
                BinOp::Sub,
                BinOp::Mul,
                BinOp::Lt,
                BinOp::Gt,
                BinOp::Le,
                BinOp::Ge,
                BinOp::Eq,
                BinOp::Ne,
                BinOp::And,
                BinOp::Or,
            ]);
            (ops, inner.clone(), inner).prop_map(|(op, a, b)| Tree::Node(op, Box::new(a), Box::new(b)))
        })
    }

    proptest! {
        #[test]
        fn fold_matches_interpreter(t in tree()) {
            let folded = eval_classical(&expr(&t.source()), &HashMap::new());
            match t.interpret() {
                Some(v) => prop_assert_eq!(folded, Ok(v)),
                None => prop_assert!(matches!(folded, Err(SemanticError::Overflow { .. })), "expected overflow"),
            }
        }
    }
}
