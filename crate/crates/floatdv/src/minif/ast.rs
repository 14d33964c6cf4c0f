//! Untyped MiniF AST with source positions. Literal spellings are kept
//! verbatim so printing round-trips byte-identically and encoding stays
//! bit-exact.

use super::token::Pos;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub records: Vec<RecordDecl>,
    pub consts: Vec<ConstDecl>,
    pub methods: Vec<MethodDecl>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordDecl {
    pub name: String,
    /// Field name and scalar FP type; records hold FP fields only.
    pub fields: Vec<(String, FpScalar)>,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpScalar {
    Double,
    Float,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstDecl {
    pub name: String,
    /// Literal spelling, optionally with a leading minus.
    pub value: String,
    pub scalar: FpScalar,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeRef {
    Double,
    Float,
    Bool,
    Int,
    Record(String),
    /// Fixed-length array of float64; length statically known, >= 1.
    Array(usize),
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeRef::Double => write!(f, "double"),
            TypeRef::Float => write!(f, "float"),
            TypeRef::Bool => write!(f, "bool"),
            TypeRef::Int => write!(f, "int"),
            TypeRef::Record(n) => write!(f, "{n}"),
            TypeRef::Array(n) => write!(f, "double[{n}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub return_type: TypeRef,
    pub contracts: Vec<Contract>,
    pub body: Vec<Stmt>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: TypeRef,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contract {
    pub label: String,
    pub requires: Expr,
    pub ensures: Expr,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    VarDecl {
        name: String,
        ty: TypeRef,
        init: Expr,
        pos: Pos,
    },
    Assign {
        name: String,
        value: Expr,
        pos: Pos,
    },
    If {
        cond: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
        pos: Pos,
    },
    While {
        cond: Expr,
        invariant: Option<Expr>,
        body: Vec<Stmt>,
        pos: Pos,
    },
    Return {
        value: Expr,
        pos: Pos,
    },
}

impl Stmt {
    pub fn pos(&self) -> Pos {
        match self {
            Stmt::VarDecl { pos, .. }
            | Stmt::Assign { pos, .. }
            | Stmt::If { pos, .. }
            | Stmt::While { pos, .. }
            | Stmt::Return { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
    Implies,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Implies => "==>",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// FP literal, spelling preserved (no sign).
    FpLit { text: String, pos: Pos },
    IntLit { text: String, pos: Pos },
    BoolLit { value: bool, pos: Pos },
    Var { name: String, pos: Pos },
    Field { base: Box<Expr>, field: String, pos: Pos },
    /// `expr.length` on arrays; statically resolved during typechecking.
    Length { base: Box<Expr>, pos: Pos },
    Index { base: Box<Expr>, index: Box<Expr>, pos: Pos },
    Unary { op: UnOp, operand: Box<Expr>, pos: Pos },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr>, pos: Pos },
    Call { name: String, args: Vec<Expr>, pos: Pos },
    NewRecord { name: String, args: Vec<Expr>, pos: Pos },
    NewArray { elems: Vec<Expr>, pos: Pos },
    /// `\result`, only in ensures clauses.
    Result { pos: Pos },
    /// `(\forall int i; range; body)`, only in contracts.
    Forall {
        var: String,
        range: Box<Expr>,
        body: Box<Expr>,
        pos: Pos,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

impl Expr {
    pub fn pos(&self) -> Pos {
        match self {
            Expr::FpLit { pos, .. }
            | Expr::IntLit { pos, .. }
            | Expr::BoolLit { pos, .. }
            | Expr::Var { pos, .. }
            | Expr::Field { pos, .. }
            | Expr::Length { pos, .. }
            | Expr::Index { pos, .. }
            | Expr::Unary { pos, .. }
            | Expr::Binary { pos, .. }
            | Expr::Call { pos, .. }
            | Expr::NewRecord { pos, .. }
            | Expr::NewArray { pos, .. }
            | Expr::Result { pos }
            | Expr::Forall { pos, .. } => *pos,
        }
    }
}

/// The builtin library functions (resolved during typechecking).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Sin,
    Cos,
    Atan,
    Sqrt,
    Abs,
}

impl Builtin {
    pub fn from_name(name: &str) -> Option<Builtin> {
        match name {
            "sin" => Some(Builtin::Sin),
            "cos" => Some(Builtin::Cos),
            "atan" => Some(Builtin::Atan),
            "sqrt" => Some(Builtin::Sqrt),
            "abs" => Some(Builtin::Abs),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Sin => "sin",
            Builtin::Cos => "cos",
            Builtin::Atan => "atan",
            Builtin::Sqrt => "sqrt",
            Builtin::Abs => "abs",
        }
    }
}

pub const SPEC_PREDICATES: &[&str] = &[
    "fp_nan",
    "fp_infinite",
    "fp_nice",
    "fp_normal",
    "fp_zero",
    "fp_bitEq",
];
