//! Type checking: annotates every expression with exactly one type,
//! resolves calls and constants, and enforces the strict FP typing rules
//! (no implicit float/double mixing, fp_* predicates on FP operands only,
//! `\result` only in ensures).

use super::ast::*;
use super::token::Pos;
use crate::formula::{encode_decimal, FpFormat, FpLiteral};
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq)]
pub enum MfType {
    Double,
    Float,
    Bool,
    Int,
    Record(String),
    Array(usize),
}

impl MfType {
    pub fn from_ref(t: &TypeRef) -> MfType {
        match t {
            TypeRef::Double => MfType::Double,
            TypeRef::Float => MfType::Float,
            TypeRef::Bool => MfType::Bool,
            TypeRef::Int => MfType::Int,
            TypeRef::Record(n) => MfType::Record(n.clone()),
            TypeRef::Array(n) => MfType::Array(*n),
        }
    }

    pub fn is_fp(&self) -> bool {
        matches!(self, MfType::Double | MfType::Float)
    }

    pub fn fp_format(&self) -> Option<FpFormat> {
        match self {
            MfType::Double => Some(FpFormat::Float64),
            MfType::Float => Some(FpFormat::Float32),
            _ => None,
        }
    }
}

impl std::fmt::Display for MfType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MfType::Double => write!(f, "double"),
            MfType::Float => write!(f, "float"),
            MfType::Bool => write!(f, "bool"),
            MfType::Int => write!(f, "int"),
            MfType::Record(n) => write!(f, "{n}"),
            MfType::Array(n) => write!(f, "double[{n}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TExpr {
    pub kind: TExprKind,
    pub ty: MfType,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TExprKind {
    FpLit(FpLiteral),
    IntLit(i64),
    BoolLit(bool),
    Var(String),
    Field(Box<TExpr>, String),
    Index(Box<TExpr>, Box<TExpr>),
    Unary(UnOp, Box<TExpr>),
    Binary(BinOp, Box<TExpr>, Box<TExpr>),
    CallMethod(String, Vec<TExpr>),
    CallBuiltin(Builtin, Vec<TExpr>),
    SpecPred(String, Vec<TExpr>),
    NewRecord(String, Vec<TExpr>),
    NewArray(Vec<TExpr>),
    Result,
    Forall {
        var: String,
        range: Box<TExpr>,
        body: Box<TExpr>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypedContract {
    pub label: String,
    pub requires: TExpr,
    pub ensures: TExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TStmt {
    VarDecl {
        name: String,
        ty: MfType,
        init: TExpr,
        pos: Pos,
    },
    Assign {
        name: String,
        ty: MfType,
        value: TExpr,
        pos: Pos,
    },
    If {
        cond: TExpr,
        then_branch: Vec<TStmt>,
        else_branch: Vec<TStmt>,
        pos: Pos,
    },
    While {
        cond: TExpr,
        invariant: Option<TExpr>,
        body: Vec<TStmt>,
        pos: Pos,
    },
    Return {
        value: TExpr,
        pos: Pos,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypedMethod {
    pub name: String,
    pub params: Vec<(String, MfType)>,
    pub return_type: MfType,
    pub contracts: Vec<TypedContract>,
    pub body: Vec<TStmt>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypedProgram {
    pub records: Vec<RecordDecl>,
    pub methods: Vec<TypedMethod>,
}

impl TypedProgram {
    pub fn record(&self, name: &str) -> Option<&RecordDecl> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn method(&self, name: &str) -> Option<&TypedMethod> {
        self.methods.iter().find(|m| m.name == name)
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum TypeError {
    #[error("{pos}: unknown identifier `{name}`")]
    UnknownIdent { name: String, pos: Pos },
    #[error("{pos}: unknown type `{name}`")]
    UnknownType { name: String, pos: Pos },
    #[error("{pos}: type mismatch: expected {expected}, got {got}")]
    Mismatch { expected: String, got: String, pos: Pos },
    #[error("{pos}: operator `{op}` cannot be applied to {lhs} and {rhs}")]
    BadOperands { op: String, lhs: String, rhs: String, pos: Pos },
    #[error("{pos}: `\\result` outside an ensures clause")]
    ResultOutsideEnsures { pos: Pos },
    #[error("{pos}: `{pred}` applied to a non-floating-point operand of type {got}")]
    SpecPredOnNonFp { pred: String, got: String, pos: Pos },
    #[error("{pos}: `{what}` is only allowed in contracts")]
    SpecOnlyConstruct { what: String, pos: Pos },
    #[error("{pos}: wrong number of arguments to `{name}`: expected {expected}, got {got}")]
    Arity { name: String, expected: usize, got: usize, pos: Pos },
    #[error("{pos}: duplicate variable `{name}`")]
    DuplicateVar { name: String, pos: Pos },
    #[error("{pos}: assignment to `{name}` which is not a local variable")]
    AssignToNonLocal { name: String, pos: Pos },
    #[error("{pos}: array index must be an integer expression")]
    BadIndex { pos: Pos },
    #[error("{pos}: `.length` on a non-array value")]
    LengthOnNonArray { pos: Pos },
    #[error("{pos}: field access on a non-record value of type {got}")]
    FieldOnNonRecord { got: String, pos: Pos },
    #[error("{pos}: record `{record}` has no field `{field}`")]
    NoSuchField { record: String, field: String, pos: Pos },
    #[error("{pos}: malformed floating-point literal `{text}`")]
    BadLiteral { text: String, pos: Pos },
    #[error("{pos}: method `{name}` does not end in a return on every path")]
    MissingReturn { name: String, pos: Pos },
    #[error("{pos}: recursive record type `{name}`")]
    RecursiveRecord { name: String, pos: Pos },
    #[error("{pos}: integer division is not supported")]
    IntDivision { pos: Pos },
}

impl TypeError {
    pub fn pos(&self) -> Pos {
        match self {
            TypeError::UnknownIdent { pos, .. }
            | TypeError::UnknownType { pos, .. }
            | TypeError::Mismatch { pos, .. }
            | TypeError::BadOperands { pos, .. }
            | TypeError::ResultOutsideEnsures { pos }
            | TypeError::SpecPredOnNonFp { pos, .. }
            | TypeError::SpecOnlyConstruct { pos, .. }
            | TypeError::Arity { pos, .. }
            | TypeError::DuplicateVar { pos, .. }
            | TypeError::AssignToNonLocal { pos, .. }
            | TypeError::BadIndex { pos }
            | TypeError::LengthOnNonArray { pos }
            | TypeError::FieldOnNonRecord { pos, .. }
            | TypeError::NoSuchField { pos, .. }
            | TypeError::BadLiteral { pos, .. }
            | TypeError::MissingReturn { pos, .. }
            | TypeError::RecursiveRecord { pos, .. }
            | TypeError::IntDivision { pos } => *pos,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum SpecCtx {
    Program,
    Requires,
    Ensures,
}

pub fn typecheck(program: &Program) -> Result<TypedProgram, Vec<TypeError>> {
    let mut errors = Vec::new();
    let mut consts: HashMap<String, (FpLiteral, MfType)> = HashMap::new();
    for c in &program.consts {
        let format = match c.scalar {
            FpScalar::Double => FpFormat::Float64,
            FpScalar::Float => FpFormat::Float32,
        };
        match encode_decimal(&c.value, format) {
            Some(lit) => {
                let ty = match c.scalar {
                    FpScalar::Double => MfType::Double,
                    FpScalar::Float => MfType::Float,
                };
                consts.insert(c.name.clone(), (lit, ty));
            }
            None => errors.push(TypeError::BadLiteral {
                text: c.value.clone(),
                pos: c.pos,
            }),
        }
    }

    let mut methods = Vec::new();
    for m in &program.methods {
        let mut ck = Checker {
            program,
            consts: &consts,
            errors: Vec::new(),
            locals: HashMap::new(),
            params: m
                .params
                .iter()
                .map(|p| (p.name.clone(), MfType::from_ref(&p.ty)))
                .collect(),
            quantified: Vec::new(),
            return_type: MfType::from_ref(&m.return_type),
        };
        for p in &m.params {
            if let TypeRef::Record(name) = &p.ty {
                if program.records.iter().all(|r| r.name != *name) {
                    ck.errors.push(TypeError::UnknownType {
                        name: name.clone(),
                        pos: p.pos,
                    });
                }
            }
        }
        let tm = ck.method(m);
        errors.extend(ck.errors);
        methods.push(tm);
    }

    if errors.is_empty() {
        Ok(TypedProgram {
            records: program.records.clone(),
            methods,
        })
    } else {
        Err(errors)
    }
}

struct Checker<'a> {
    program: &'a Program,
    consts: &'a HashMap<String, (FpLiteral, MfType)>,
    errors: Vec<TypeError>,
    locals: HashMap<String, MfType>,
    params: HashMap<String, MfType>,
    quantified: Vec<String>,
    return_type: MfType,
}

impl<'a> Checker<'a> {
    fn method(&mut self, m: &MethodDecl) -> TypedMethod {
        let mut contracts = Vec::new();
        for c in &m.contracts {
            let requires = self.expr(&c.requires, SpecCtx::Requires);
            let ensures = self.expr(&c.ensures, SpecCtx::Ensures);
            for (e, what) in [(&requires, "requires"), (&ensures, "ensures")] {
                if e.ty != MfType::Bool {
                    self.errors.push(TypeError::Mismatch {
                        expected: "bool".into(),
                        got: format!("{} ({what} clause)", e.ty),
                        pos: e.pos,
                    });
                }
            }
            contracts.push(TypedContract {
                label: c.label.clone(),
                requires,
                ensures,
            });
        }
        let body = self.block(&m.body);
        if !always_returns(&body) {
            self.errors.push(TypeError::MissingReturn {
                name: m.name.clone(),
                pos: m.pos,
            });
        }
        TypedMethod {
            name: m.name.clone(),
            params: m
                .params
                .iter()
                .map(|p| (p.name.clone(), MfType::from_ref(&p.ty)))
                .collect(),
            return_type: MfType::from_ref(&m.return_type),
            contracts,
            body,
            pos: m.pos,
        }
    }

    fn block(&mut self, stmts: &[Stmt]) -> Vec<TStmt> {
        stmts.iter().map(|s| self.stmt(s)).collect()
    }

    fn stmt(&mut self, s: &Stmt) -> TStmt {
        match s {
            Stmt::VarDecl {
                name,
                ty,
                init,
                pos,
            } => {
                let declared = MfType::from_ref(ty);
                if let TypeRef::Record(rn) = ty {
                    if self.program.records.iter().all(|r| r.name != *rn) {
                        self.errors.push(TypeError::UnknownType {
                            name: rn.clone(),
                            pos: *pos,
                        });
                    }
                }
                let init = self.expr(init, SpecCtx::Program);
                if init.ty != declared {
                    self.errors.push(TypeError::Mismatch {
                        expected: declared.to_string(),
                        got: init.ty.to_string(),
                        pos: init.pos,
                    });
                }
                if self.locals.contains_key(name) || self.params.contains_key(name) {
                    self.errors.push(TypeError::DuplicateVar {
                        name: name.clone(),
                        pos: *pos,
                    });
                }
                self.locals.insert(name.clone(), declared.clone());
                TStmt::VarDecl {
                    name: name.clone(),
                    ty: declared,
                    init,
                    pos: *pos,
                }
            }
            Stmt::Assign { name, value, pos } => {
                let value = self.expr(value, SpecCtx::Program);
                let ty = match self.locals.get(name) {
                    Some(t) => t.clone(),
                    None => {
                        self.errors.push(TypeError::AssignToNonLocal {
                            name: name.clone(),
                            pos: *pos,
                        });
                        value.ty.clone()
                    }
                };
                if value.ty != ty {
                    self.errors.push(TypeError::Mismatch {
                        expected: ty.to_string(),
                        got: value.ty.to_string(),
                        pos: value.pos,
                    });
                }
                TStmt::Assign {
                    name: name.clone(),
                    ty,
                    value,
                    pos: *pos,
                }
            }
            Stmt::If {
                cond,
                then_branch,
                else_branch,
                pos,
            } => {
                let cond = self.expr(cond, SpecCtx::Program);
                if cond.ty != MfType::Bool {
                    self.errors.push(TypeError::Mismatch {
                        expected: "bool".into(),
                        got: cond.ty.to_string(),
                        pos: cond.pos,
                    });
                }
                TStmt::If {
                    cond,
                    then_branch: self.block(then_branch),
                    else_branch: self.block(else_branch),
                    pos: *pos,
                }
            }
            Stmt::While {
                cond,
                invariant,
                body,
                pos,
            } => {
                let cond = self.expr(cond, SpecCtx::Program);
                if cond.ty != MfType::Bool {
                    self.errors.push(TypeError::Mismatch {
                        expected: "bool".into(),
                        got: cond.ty.to_string(),
                        pos: cond.pos,
                    });
                }
                let invariant = invariant.as_ref().map(|inv| {
                    let t = self.expr(inv, SpecCtx::Requires);
                    if t.ty != MfType::Bool {
                        self.errors.push(TypeError::Mismatch {
                            expected: "bool".into(),
                            got: t.ty.to_string(),
                            pos: t.pos,
                        });
                    }
                    t
                });
                TStmt::While {
                    cond,
                    invariant,
                    body: self.block(body),
                    pos: *pos,
                }
            }
            Stmt::Return { value, pos } => {
                let value = self.expr(value, SpecCtx::Program);
                if value.ty != self.return_type {
                    self.errors.push(TypeError::Mismatch {
                        expected: self.return_type.to_string(),
                        got: value.ty.to_string(),
                        pos: value.pos,
                    });
                }
                TStmt::Return { value, pos: *pos }
            }
        }
    }

    fn lookup(&self, name: &str) -> Option<MfType> {
        if self.quantified.iter().any(|q| q == name) {
            return Some(MfType::Int);
        }
        self.locals
            .get(name)
            .or_else(|| self.params.get(name))
            .cloned()
            .or_else(|| self.consts.get(name).map(|(_, t)| t.clone()))
    }

    fn err_expr(&mut self, e: TypeError, pos: Pos) -> TExpr {
        self.errors.push(e);
        TExpr {
            kind: TExprKind::BoolLit(false),
            ty: MfType::Bool,
            pos,
        }
    }

    fn expr(&mut self, e: &Expr, ctx: SpecCtx) -> TExpr {
        let pos = e.pos();
        match e {
            Expr::FpLit { text, .. } => {
                let (clean, format, ty) = if let Some(s) = text.strip_suffix('f') {
                    (s, FpFormat::Float32, MfType::Float)
                } else {
                    (text.as_str(), FpFormat::Float64, MfType::Double)
                };
                match encode_decimal(clean, format) {
                    Some(lit) => TExpr {
                        kind: TExprKind::FpLit(lit),
                        ty,
                        pos,
                    },
                    None => self.err_expr(
                        TypeError::BadLiteral {
                            text: text.clone(),
                            pos,
                        },
                        pos,
                    ),
                }
            }
            Expr::IntLit { text, .. } => match text.parse::<i64>() {
                Ok(v) => TExpr {
                    kind: TExprKind::IntLit(v),
                    ty: MfType::Int,
                    pos,
                },
                Err(_) => self.err_expr(
                    TypeError::BadLiteral {
                        text: text.clone(),
                        pos,
                    },
                    pos,
                ),
            },
            Expr::BoolLit { value, .. } => TExpr {
                kind: TExprKind::BoolLit(*value),
                ty: MfType::Bool,
                pos,
            },
            Expr::Var { name, .. } => {
                if let Some((lit, ty)) = self.consts.get(name) {
                    if !self.locals.contains_key(name) && !self.params.contains_key(name) {
                        return TExpr {
                            kind: TExprKind::FpLit(*lit),
                            ty: ty.clone(),
                            pos,
                        };
                    }
                }
                match self.lookup(name) {
                    Some(ty) => TExpr {
                        kind: TExprKind::Var(name.clone()),
                        ty,
                        pos,
                    },
                    None => self.err_expr(
                        TypeError::UnknownIdent {
                            name: name.clone(),
                            pos,
                        },
                        pos,
                    ),
                }
            }
            Expr::Field { base, field, .. } => {
                let base = self.expr(base, ctx);
                let rec_name = match &base.ty {
                    MfType::Record(n) => n.clone(),
                    other => {
                        let got = other.to_string();
                        return self.err_expr(TypeError::FieldOnNonRecord { got, pos }, pos);
                    }
                };
                let rec = self
                    .program
                    .records
                    .iter()
                    .find(|r| r.name == rec_name)
                    .cloned();
                match rec.and_then(|r| r.fields.iter().find(|(n, _)| n == field).cloned()) {
                    Some((_, scalar)) => {
                        let ty = match scalar {
                            FpScalar::Double => MfType::Double,
                            FpScalar::Float => MfType::Float,
                        };
                        TExpr {
                            kind: TExprKind::Field(Box::new(base), field.clone()),
                            ty,
                            pos,
                        }
                    }
                    None => self.err_expr(
                        TypeError::NoSuchField {
                            record: rec_name,
                            field: field.clone(),
                            pos,
                        },
                        pos,
                    ),
                }
            }
            Expr::Length { base, .. } => {
                let base = self.expr(base, ctx);
                match base.ty {
                    MfType::Array(n) => TExpr {
                        kind: TExprKind::IntLit(n as i64),
                        ty: MfType::Int,
                        pos,
                    },
                    _ => self.err_expr(TypeError::LengthOnNonArray { pos }, pos),
                }
            }
            Expr::Index { base, index, .. } => {
                let base = self.expr(base, ctx);
                let index = self.expr(index, ctx);
                if !matches!(base.ty, MfType::Array(_)) {
                    return self.err_expr(TypeError::BadIndex { pos }, pos);
                }
                if index.ty != MfType::Int {
                    return self.err_expr(TypeError::BadIndex { pos }, pos);
                }
                TExpr {
                    kind: TExprKind::Index(Box::new(base), Box::new(index)),
                    ty: MfType::Double,
                    pos,
                }
            }
            Expr::Unary { op, operand, .. } => {
                let operand = self.expr(operand, ctx);
                match op {
                    UnOp::Neg => {
                        if !operand.ty.is_fp() && operand.ty != MfType::Int {
                            return self.err_expr(
                                TypeError::BadOperands {
                                    op: "-".into(),
                                    lhs: operand.ty.to_string(),
                                    rhs: "-".into(),
                                    pos,
                                },
                                pos,
                            );
                        }
                        let ty = operand.ty.clone();
                        TExpr {
                            kind: TExprKind::Unary(UnOp::Neg, Box::new(operand)),
                            ty,
                            pos,
                        }
                    }
                    UnOp::Not => {
                        if operand.ty != MfType::Bool {
                            return self.err_expr(
                                TypeError::Mismatch {
                                    expected: "bool".into(),
                                    got: operand.ty.to_string(),
                                    pos,
                                },
                                pos,
                            );
                        }
                        TExpr {
                            kind: TExprKind::Unary(UnOp::Not, Box::new(operand)),
                            ty: MfType::Bool,
                            pos,
                        }
                    }
                }
            }
            Expr::Binary { op, lhs, rhs, .. } => self.binary(*op, lhs, rhs, ctx, pos),
            Expr::Call { name, args, .. } => self.call(name, args, ctx, pos),
            Expr::NewRecord { name, args, .. } => {
                let Some(rec) = self.program.records.iter().find(|r| r.name == *name).cloned()
                else {
                    return self.err_expr(
                        TypeError::UnknownType {
                            name: name.clone(),
                            pos,
                        },
                        pos,
                    );
                };
                if args.len() != rec.fields.len() {
                    return self.err_expr(
                        TypeError::Arity {
                            name: name.clone(),
                            expected: rec.fields.len(),
                            got: args.len(),
                            pos,
                        },
                        pos,
                    );
                }
                let mut targs = Vec::new();
                for (a, (fname, scalar)) in args.iter().zip(&rec.fields) {
                    let ta = self.expr(a, ctx);
                    let expected = match scalar {
                        FpScalar::Double => MfType::Double,
                        FpScalar::Float => MfType::Float,
                    };
                    if ta.ty != expected {
                        self.errors.push(TypeError::Mismatch {
                            expected: format!("{expected} (field `{fname}`)"),
                            got: ta.ty.to_string(),
                            pos: ta.pos,
                        });
                    }
                    targs.push(ta);
                }
                TExpr {
                    kind: TExprKind::NewRecord(name.clone(), targs),
                    ty: MfType::Record(name.clone()),
                    pos,
                }
            }
            Expr::NewArray { elems, .. } => {
                let mut telems = Vec::new();
                for e in elems {
                    let te = self.expr(e, ctx);
                    if te.ty != MfType::Double {
                        self.errors.push(TypeError::Mismatch {
                            expected: "double".into(),
                            got: te.ty.to_string(),
                            pos: te.pos,
                        });
                    }
                    telems.push(te);
                }
                let n = telems.len();
                TExpr {
                    kind: TExprKind::NewArray(telems),
                    ty: MfType::Array(n),
                    pos,
                }
            }
            Expr::Result { .. } => {
                if ctx != SpecCtx::Ensures {
                    return self.err_expr(TypeError::ResultOutsideEnsures { pos }, pos);
                }
                TExpr {
                    kind: TExprKind::Result,
                    ty: self.return_type.clone(),
                    pos,
                }
            }
            Expr::Forall {
                var, range, body, ..
            } => {
                if ctx == SpecCtx::Program {
                    return self.err_expr(
                        TypeError::SpecOnlyConstruct {
                            what: "\\forall".into(),
                            pos,
                        },
                        pos,
                    );
                }
                self.quantified.push(var.clone());
                let range = self.expr(range, ctx);
                let body = self.expr(body, ctx);
                self.quantified.pop();
                for part in [&range, &body] {
                    if part.ty != MfType::Bool {
                        self.errors.push(TypeError::Mismatch {
                            expected: "bool".into(),
                            got: part.ty.to_string(),
                            pos: part.pos,
                        });
                    }
                }
                TExpr {
                    kind: TExprKind::Forall {
                        var: var.clone(),
                        range: Box::new(range),
                        body: Box::new(body),
                    },
                    ty: MfType::Bool,
                    pos,
                }
            }
        }
    }

    fn binary(&mut self, op: BinOp, lhs: &Expr, rhs: &Expr, ctx: SpecCtx, pos: Pos) -> TExpr {
        let lhs = self.expr(lhs, ctx);
        let rhs = self.expr(rhs, ctx);
        let bad = |ck: &mut Self, lhs: &TExpr, rhs: &TExpr| {
            let e = TypeError::BadOperands {
                op: op.symbol().into(),
                lhs: lhs.ty.to_string(),
                rhs: rhs.ty.to_string(),
                pos,
            };
            ck.err_expr(e, pos)
        };
        match op {
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => {
                if lhs.ty != rhs.ty {
                    return bad(self, &lhs, &rhs);
                }
                if lhs.ty == MfType::Int {
                    if op == BinOp::Div {
                        return self.err_expr(TypeError::IntDivision { pos }, pos);
                    }
                } else if !lhs.ty.is_fp() {
                    return bad(self, &lhs, &rhs);
                }
                let ty = lhs.ty.clone();
                TExpr {
                    kind: TExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                    ty,
                    pos,
                }
            }
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                if lhs.ty != rhs.ty || !(lhs.ty.is_fp() || lhs.ty == MfType::Int) {
                    return bad(self, &lhs, &rhs);
                }
                TExpr {
                    kind: TExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                    ty: MfType::Bool,
                    pos,
                }
            }
            BinOp::Eq | BinOp::Ne => {
                if lhs.ty != rhs.ty || !(lhs.ty.is_fp() || lhs.ty == MfType::Int) {
                    return bad(self, &lhs, &rhs);
                }
                TExpr {
                    kind: TExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                    ty: MfType::Bool,
                    pos,
                }
            }
            BinOp::And | BinOp::Or => {
                if lhs.ty != MfType::Bool || rhs.ty != MfType::Bool {
                    return bad(self, &lhs, &rhs);
                }
                TExpr {
                    kind: TExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                    ty: MfType::Bool,
                    pos,
                }
            }
            BinOp::Implies => {
                if ctx == SpecCtx::Program {
                    return self.err_expr(
                        TypeError::SpecOnlyConstruct {
                            what: "==>".into(),
                            pos,
                        },
                        pos,
                    );
                }
                if lhs.ty != MfType::Bool || rhs.ty != MfType::Bool {
                    return bad(self, &lhs, &rhs);
                }
                TExpr {
                    kind: TExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                    ty: MfType::Bool,
                    pos,
                }
            }
        }
    }

    fn call(&mut self, name: &str, args: &[Expr], ctx: SpecCtx, pos: Pos) -> TExpr {
        // fp_* spec predicates
        if SPEC_PREDICATES.contains(&name) {
            if ctx == SpecCtx::Program {
                return self.err_expr(
                    TypeError::SpecOnlyConstruct {
                        what: name.into(),
                        pos,
                    },
                    pos,
                );
            }
            let expected = if name == "fp_bitEq" { 2 } else { 1 };
            if args.len() != expected {
                return self.err_expr(
                    TypeError::Arity {
                        name: name.into(),
                        expected,
                        got: args.len(),
                        pos,
                    },
                    pos,
                );
            }
            let targs: Vec<TExpr> = args.iter().map(|a| self.expr(a, ctx)).collect();
            for a in &targs {
                if !a.ty.is_fp() {
                    return self.err_expr(
                        TypeError::SpecPredOnNonFp {
                            pred: name.into(),
                            got: a.ty.to_string(),
                            pos,
                        },
                        pos,
                    );
                }
            }
            if name == "fp_bitEq" && targs[0].ty != targs[1].ty {
                return self.err_expr(
                    TypeError::BadOperands {
                        op: name.into(),
                        lhs: targs[0].ty.to_string(),
                        rhs: targs[1].ty.to_string(),
                        pos,
                    },
                    pos,
                );
            }
            return TExpr {
                kind: TExprKind::SpecPred(name.to_string(), targs),
                ty: MfType::Bool,
                pos,
            };
        }

        if let Some(b) = Builtin::from_name(name) {
            if args.len() != 1 {
                return self.err_expr(
                    TypeError::Arity {
                        name: name.into(),
                        expected: 1,
                        got: args.len(),
                        pos,
                    },
                    pos,
                );
            }
            let ta = self.expr(&args[0], ctx);
            if ta.ty != MfType::Double {
                return self.err_expr(
                    TypeError::Mismatch {
                        expected: "double".into(),
                        got: ta.ty.to_string(),
                        pos: ta.pos,
                    },
                    pos,
                );
            }
            return TExpr {
                kind: TExprKind::CallBuiltin(b, vec![ta]),
                ty: MfType::Double,
                pos,
            };
        }

        let Some(m) = self.program.methods.iter().find(|m| m.name == name) else {
            return self.err_expr(
                TypeError::UnknownIdent {
                    name: name.into(),
                    pos,
                },
                pos,
            );
        };
        if args.len() != m.params.len() {
            return self.err_expr(
                TypeError::Arity {
                    name: name.into(),
                    expected: m.params.len(),
                    got: args.len(),
                    pos,
                },
                pos,
            );
        }
        let expected_tys: Vec<MfType> = m.params.iter().map(|p| MfType::from_ref(&p.ty)).collect();
        let ret = MfType::from_ref(&m.return_type);
        let mut targs = Vec::new();
        for (a, expected) in args.iter().zip(&expected_tys) {
            let ta = self.expr(a, ctx);
            if ta.ty != *expected {
                self.errors.push(TypeError::Mismatch {
                    expected: expected.to_string(),
                    got: ta.ty.to_string(),
                    pos: ta.pos,
                });
            }
            targs.push(ta);
        }
        TExpr {
            kind: TExprKind::CallMethod(name.to_string(), targs),
            ty: ret,
            pos,
        }
    }
}

fn always_returns(stmts: &[TStmt]) -> bool {
    match stmts.last() {
        Some(TStmt::Return { .. }) => true,
        Some(TStmt::If {
            then_branch,
            else_branch,
            ..
        }) => always_returns(then_branch) && always_returns(else_branch),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minif::parser::parse_program;

    fn check(src: &str) -> Result<TypedProgram, Vec<TypeError>> {
        typecheck(&parse_program(src).expect("parse"))
    }

    #[test]
    fn annotates_fp_addition() {
        let p = check("method f(x: double): double { return x + 1.0; }").unwrap();
        match &p.methods[0].body[0] {
            TStmt::Return { value, .. } => assert_eq!(value.ty, MfType::Double),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_fp_predicate_on_bool() {
        let errs = check(
            r#"/*@ requires fp_nan(true); ensures true; @*/
method f(): double { return 1.0; }"#,
        )
        .unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, TypeError::SpecPredOnNonFp { .. })));
    }

    #[test]
    fn rejects_result_in_requires() {
        let errs = check(
            r#"/*@ requires \result == 1.0; ensures true; @*/
method f(): double { return 1.0; }"#,
        )
        .unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, TypeError::ResultOutsideEnsures { .. })));
    }

    #[test]
    fn rejects_mixed_precision_arithmetic() {
        let errs =
            check("method f(x: double, y: float): double { return x + y; }").unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, TypeError::BadOperands { .. })));
    }

    #[test]
    fn array_length_resolves_statically() {
        let p = check(
            r#"/*@ requires (\forall int i; 0 <= i && i < vec.length; vec[i] > 1.0); ensures true; @*/
method f(vec: double[2]): double { return vec[0]; }"#,
        )
        .unwrap();
        // the `vec.length` inside the contract became the literal 2
        let c = &p.methods[0].contracts[0];
        fn find_lit2(e: &TExpr) -> bool {
            match &e.kind {
                TExprKind::IntLit(2) => true,
                TExprKind::Forall { range, body, .. } => find_lit2(range) || find_lit2(body),
                TExprKind::Binary(_, l, r) => find_lit2(l) || find_lit2(r),
                _ => false,
            }
        }
        assert!(find_lit2(&c.requires));
    }

    #[test]
    fn typecheck_is_idempotent_on_source() {
        let src = r#"/*@ requires fp_nice(x); ensures !fp_nan(\result); @*/
method f(x: double): double { return x / 2.0; }"#;
        let p1 = check(src).unwrap();
        let p2 = check(src).unwrap();
        assert_eq!(p1, p2);
    }

    #[test]
    fn unknown_identifier_is_reported() {
        let errs = check("method f(): double { return y; }").unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, TypeError::UnknownIdent { .. })));
    }
}
