use std::fmt;

use super::lexer::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Type {
    Int,
    Super,
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Type::Int => "int",
            Type::Super => "super",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub subroutines: Vec<Subroutine>,
    /// Non-fatal parser notes, e.g. `for` headers separated by commas.
    pub warnings: Vec<(Pos, String)>,
}

impl Program {
    pub fn subroutine(&self, name: &str) -> Option<&Subroutine> {
        self.subroutines.iter().find(|s| s.name.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubroutineKind {
    /// `[type] function`; `None` when the function returns nothing.
    Function(Option<Type>),
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub ty: Type,
    pub name: Ident,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subroutine {
    pub kind: SubroutineKind,
    pub name: Ident,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
    Mul,
}

impl AssignOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AssignOp::Set => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    /// `type name = value;`
    Declare {
        ty: Type,
        name: Ident,
        value: Expr,
    },
    /// `name op value;` on an existing variable.
    Assign {
        name: Ident,
        op: AssignOp,
        value: Expr,
    },
    Call(Call),
    Measure(Ident),
    Return(Ident),
    For {
        pos: Pos,
        init: Box<Stmt>,
        cond: Expr,
        step: Box<Stmt>,
        body: Vec<Stmt>,
    },
    While {
        pos: Pos,
        cond: Expr,
        body: Vec<Stmt>,
    },
    /// An `if` with its trailing `elsif` arms and optional `else`.
    If {
        arms: Vec<CondArm>,
        otherwise: Option<Vec<Stmt>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondArm {
    pub pos: Pos,
    pub cond: Expr,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateName {
    H,
    X,
    Y,
    Z,
    RX,
    RY,
    RZ,
    P,
    S,
    T,
    CX,
    CZ,
    CP,
}

impl GateName {
    pub const ALL: [GateName; 13] = [
        GateName::H,
        GateName::X,
        GateName::Y,
        GateName::Z,
        GateName::RX,
        GateName::RY,
        GateName::RZ,
        GateName::P,
        GateName::S,
        GateName::T,
        GateName::CX,
        GateName::CZ,
        GateName::CP,
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.as_str() == name)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GateName::H => "H",
            GateName::X => "X",
            GateName::Y => "Y",
            GateName::Z => "Z",
            GateName::RX => "RX",
            GateName::RY => "RY",
            GateName::RZ => "RZ",
            GateName::P => "P",
            GateName::S => "S",
            GateName::T => "T",
            GateName::CX => "CX",
            GateName::CZ => "CZ",
            GateName::CP => "CP",
        }
    }

    /// Number of register operands before the optional angle.
    pub fn register_arity(self) -> usize {
        match self {
            GateName::CX | GateName::CZ | GateName::CP => 2,
            _ => 1,
        }
    }

    pub fn takes_angle(self) -> bool {
        matches!(
            self,
            GateName::RX | GateName::RY | GateName::RZ | GateName::P | GateName::CP
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Intrinsic {
    Mark,
    Filter,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Callee {
    Gate(GateName),
    Intrinsic(Intrinsic),
    /// User subroutine; `oracle` is resolved once every subroutine is known.
    User { oracle: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Call {
    pub name: Ident,
    pub callee: Callee,
    pub args: Vec<Expr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&",
            BinOp::Or => "|",
        }
    }

    pub fn is_relational(self) -> bool {
        matches!(
            self,
            BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge | BinOp::Eq | BinOp::Ne
        )
    }

    pub fn is_boolean(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int { value: i64, pos: Pos },
    Var(Ident),
    Call(Call),
    Binary {
        op: BinOp,
        pos: Pos,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

impl Expr {
    pub fn pos(&self) -> Pos {
        match self {
            Expr::Int { pos, .. } | Expr::Binary { pos, .. } => *pos,
            Expr::Var(id) => id.pos,
            Expr::Call(c) => c.name.pos,
        }
    }
}
