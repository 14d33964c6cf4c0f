//! Replaces bounded `\forall int` quantifiers in contracts by finite
//! conjunctions. After this pass no integer quantifier remains anywhere
//! in a contract.

use super::ast::BinOp;
use super::token::Pos;
use super::typecheck::{MfType, TExpr, TExprKind, TStmt, TypedContract, TypedMethod, TypedProgram};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum UnrollError {
    #[error("{pos}: quantified range over `{var}` is not statically bounded")]
    Unbounded { var: String, pos: Pos },
}

pub fn unroll_spec_quantifiers(p: &TypedProgram) -> Result<TypedProgram, UnrollError> {
    let mut methods = Vec::new();
    for m in &p.methods {
        let mut contracts = Vec::new();
        for c in &m.contracts {
            contracts.push(TypedContract {
                label: c.label.clone(),
                requires: unroll_expr(&c.requires)?,
                ensures: unroll_expr(&c.ensures)?,
            });
        }
        let body = unroll_stmts(&m.body)?;
        methods.push(TypedMethod {
            name: m.name.clone(),
            params: m.params.clone(),
            return_type: m.return_type.clone(),
            contracts,
            body,
            pos: m.pos,
        });
    }
    Ok(TypedProgram {
        records: p.records.clone(),
        methods,
    })
}

fn unroll_stmts(stmts: &[TStmt]) -> Result<Vec<TStmt>, UnrollError> {
    let mut out = Vec::new();
    for s in stmts {
        out.push(match s {
            TStmt::While {
                cond,
                invariant,
                body,
                pos,
            } => TStmt::While {
                cond: cond.clone(),
                invariant: invariant.as_ref().map(unroll_expr).transpose()?,
                body: unroll_stmts(body)?,
                pos: *pos,
            },
            TStmt::If {
                cond,
                then_branch,
                else_branch,
                pos,
            } => TStmt::If {
                cond: cond.clone(),
                then_branch: unroll_stmts(then_branch)?,
                else_branch: unroll_stmts(else_branch)?,
                pos: *pos,
            },
            other => other.clone(),
        });
    }
    Ok(out)
}

fn unroll_expr(e: &TExpr) -> Result<TExpr, UnrollError> {
    let kind = match &e.kind {
        TExprKind::Forall { var, range, body } => {
            let range = unroll_expr(range)?;
            let body = unroll_expr(body)?;
            let (lo, hi_exclusive) =
                extract_bounds(var, &range).ok_or_else(|| UnrollError::Unbounded {
                    var: var.clone(),
                    pos: e.pos,
                })?;
            let mut conjuncts = Vec::new();
            for k in lo..hi_exclusive {
                conjuncts.push(subst_int_var(&body, var, k));
            }
            return Ok(conjoin(conjuncts, e.pos));
        }
        TExprKind::Unary(op, t) => TExprKind::Unary(*op, Box::new(unroll_expr(t)?)),
        TExprKind::Binary(op, l, r) => TExprKind::Binary(
            *op,
            Box::new(unroll_expr(l)?),
            Box::new(unroll_expr(r)?),
        ),
        TExprKind::SpecPred(p, args) => TExprKind::SpecPred(
            p.clone(),
            args.iter().map(unroll_expr).collect::<Result<_, _>>()?,
        ),
        TExprKind::Field(b, f) => TExprKind::Field(Box::new(unroll_expr(b)?), f.clone()),
        TExprKind::Index(b, i) => {
            TExprKind::Index(Box::new(unroll_expr(b)?), Box::new(unroll_expr(i)?))
        }
        TExprKind::CallMethod(n, args) => TExprKind::CallMethod(
            n.clone(),
            args.iter().map(unroll_expr).collect::<Result<_, _>>()?,
        ),
        TExprKind::CallBuiltin(b, args) => TExprKind::CallBuiltin(
            *b,
            args.iter().map(unroll_expr).collect::<Result<_, _>>()?,
        ),
        TExprKind::NewRecord(n, args) => TExprKind::NewRecord(
            n.clone(),
            args.iter().map(unroll_expr).collect::<Result<_, _>>()?,
        ),
        TExprKind::NewArray(args) => {
            TExprKind::NewArray(args.iter().map(unroll_expr).collect::<Result<_, _>>()?)
        }
        other => other.clone(),
    };
    Ok(TExpr {
        kind,
        ty: e.ty.clone(),
        pos: e.pos,
    })
}

/// Match `lo <= i && i < hi` (and the `<`/`<=` variants) with constant
/// integer bounds. Returns the inclusive lower and exclusive upper bound.
fn extract_bounds(var: &str, range: &TExpr) -> Option<(i64, i64)> {
    let TExprKind::Binary(BinOp::And, l, r) = &range.kind else {
        return None;
    };
    let lo = lower_bound(var, l)?;
    let hi = upper_bound(var, r)?;
    Some((lo, hi))
}

fn int_const(e: &TExpr) -> Option<i64> {
    match &e.kind {
        TExprKind::IntLit(v) => Some(*v),
        TExprKind::Unary(super::ast::UnOp::Neg, inner) => int_const(inner).map(|v| -v),
        _ => None,
    }
}

fn is_var(e: &TExpr, var: &str) -> bool {
    matches!(&e.kind, TExprKind::Var(n) if n == var)
}

fn lower_bound(var: &str, e: &TExpr) -> Option<i64> {
    let TExprKind::Binary(op, l, r) = &e.kind else {
        return None;
    };
    match op {
        // lo <= i  |  lo < i
        BinOp::Le if is_var(r, var) => int_const(l),
        BinOp::Lt if is_var(r, var) => int_const(l).map(|v| v + 1),
        // i >= lo  |  i > lo
        BinOp::Ge if is_var(l, var) => int_const(r),
        BinOp::Gt if is_var(l, var) => int_const(r).map(|v| v + 1),
        _ => None,
    }
}

fn upper_bound(var: &str, e: &TExpr) -> Option<i64> {
    let TExprKind::Binary(op, l, r) = &e.kind else {
        return None;
    };
    match op {
        // i < hi  |  i <= hi
        BinOp::Lt if is_var(l, var) => int_const(r),
        BinOp::Le if is_var(l, var) => int_const(r).map(|v| v + 1),
        // hi > i  |  hi >= i
        BinOp::Gt if is_var(r, var) => int_const(l),
        BinOp::Ge if is_var(r, var) => int_const(l).map(|v| v + 1),
        _ => None,
    }
}

fn conjoin(mut parts: Vec<TExpr>, pos: Pos) -> TExpr {
    if parts.is_empty() {
        return TExpr {
            kind: TExprKind::BoolLit(true),
            ty: MfType::Bool,
            pos,
        };
    }
    let mut acc = parts.remove(0);
    for p in parts {
        acc = TExpr {
            kind: TExprKind::Binary(BinOp::And, Box::new(acc), Box::new(p)),
            ty: MfType::Bool,
            pos,
        };
    }
    acc
}

fn subst_int_var(e: &TExpr, var: &str, value: i64) -> TExpr {
    let kind = match &e.kind {
        TExprKind::Var(n) if n == var => TExprKind::IntLit(value),
        TExprKind::Unary(op, t) => TExprKind::Unary(*op, Box::new(subst_int_var(t, var, value))),
        TExprKind::Binary(op, l, r) => TExprKind::Binary(
            *op,
            Box::new(subst_int_var(l, var, value)),
            Box::new(subst_int_var(r, var, value)),
        ),
        TExprKind::SpecPred(p, args) => TExprKind::SpecPred(
            p.clone(),
            args.iter().map(|a| subst_int_var(a, var, value)).collect(),
        ),
        TExprKind::Field(b, f) => {
            TExprKind::Field(Box::new(subst_int_var(b, var, value)), f.clone())
        }
        TExprKind::Index(b, i) => TExprKind::Index(
            Box::new(subst_int_var(b, var, value)),
            Box::new(subst_int_var(i, var, value)),
        ),
        TExprKind::CallMethod(n, args) => TExprKind::CallMethod(
            n.clone(),
            args.iter().map(|a| subst_int_var(a, var, value)).collect(),
        ),
        TExprKind::CallBuiltin(b, args) => TExprKind::CallBuiltin(
            *b,
            args.iter().map(|a| subst_int_var(a, var, value)).collect(),
        ),
        TExprKind::NewRecord(n, args) => TExprKind::NewRecord(
            n.clone(),
            args.iter().map(|a| subst_int_var(a, var, value)).collect(),
        ),
        TExprKind::NewArray(args) => {
            TExprKind::NewArray(args.iter().map(|a| subst_int_var(a, var, value)).collect())
        }
        TExprKind::Forall {
            var: qvar,
            range,
            body,
        } if qvar != var => TExprKind::Forall {
            var: qvar.clone(),
            range: Box::new(subst_int_var(range, var, value)),
            body: Box::new(subst_int_var(body, var, value)),
        },
        other => other.clone(),
    };
    TExpr {
        kind,
        ty: e.ty.clone(),
        pos: e.pos,
    }
}

/// Syntactic scan for any remaining quantifier (test support).
pub fn contains_forall(p: &TypedProgram) -> bool {
    fn in_expr(e: &TExpr) -> bool {
        match &e.kind {
            TExprKind::Forall { .. } => true,
            TExprKind::Unary(_, t) => in_expr(t),
            TExprKind::Binary(_, l, r) => in_expr(l) || in_expr(r),
            TExprKind::SpecPred(_, args)
            | TExprKind::CallMethod(_, args)
            | TExprKind::CallBuiltin(_, args)
            | TExprKind::NewRecord(_, args)
            | TExprKind::NewArray(args) => args.iter().any(in_expr),
            TExprKind::Field(b, _) => in_expr(b),
            TExprKind::Index(b, i) => in_expr(b) || in_expr(i),
            _ => false,
        }
    }
    p.methods.iter().any(|m| {
        m.contracts
            .iter()
            .any(|c| in_expr(&c.requires) || in_expr(&c.ensures))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minif::parser::parse_program;
    use crate::minif::typecheck::typecheck;

    fn pipeline(src: &str) -> Result<TypedProgram, UnrollError> {
        unroll_spec_quantifiers(&typecheck(&parse_program(src).unwrap()).unwrap())
    }

    #[test]
    fn bounded_forall_becomes_conjunction() {
        let p = pipeline(
            r#"/*@ requires (\forall int i; 0 <= i && i < 2; vec[i] > 1.0); ensures true; @*/
method f(vec: double[2]): double { return vec[0]; }"#,
        )
        .unwrap();
        assert!(!contains_forall(&p));
        let req = &p.methods[0].contracts[0].requires;
        // vec[0] > 1.0 && vec[1] > 1.0
        match &req.kind {
            TExprKind::Binary(BinOp::And, l, r) => {
                assert!(matches!(l.kind, TExprKind::Binary(BinOp::Gt, ..)));
                assert!(matches!(r.kind, TExprKind::Binary(BinOp::Gt, ..)));
            }
            other => panic!("expected conjunction, got {other:?}"),
        }
    }

    #[test]
    fn empty_range_is_true() {
        let p = pipeline(
            r#"/*@ requires (\forall int i; 0 <= i && i < 0; vec[i] > 1.0); ensures true; @*/
method f(vec: double[2]): double { return vec[0]; }"#,
        )
        .unwrap();
        let req = &p.methods[0].contracts[0].requires;
        assert_eq!(req.kind, TExprKind::BoolLit(true));
    }

    #[test]
    fn symbolic_bound_is_an_error() {
        let err = pipeline(
            r#"/*@ requires (\forall int i; 0 <= i && i < n; vec[i] > 1.0); ensures true; @*/
method f(vec: double[2], n: int): double { return vec[0]; }"#,
        )
        .unwrap_err();
        assert!(matches!(err, UnrollError::Unbounded { .. }));
    }
}
