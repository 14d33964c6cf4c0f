//! Method-call inlining. User calls are resolved by splicing the callee
//! body with freshly renamed locals; library builtins stay as primitive
//! calls. Callees must be loop-free with a single trailing return, which
//! covers helper-method style programs; anything else is reported.

use crate::minif::{TExpr, TExprKind, TStmt, TypedMethod, TypedProgram};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum InlineError {
    #[error("recursion detected while inlining `{0}`")]
    Recursion(String),
    #[error("inline depth {0} exceeded")]
    DepthExceeded(usize),
    #[error("cannot inline `{method}`: {reason}")]
    Unsupported { method: String, reason: String },
}

/// Returns `method` with every user-method call spliced in. Fresh local
/// names carry a `!i<n>` suffix so they cannot capture source names.
pub fn inline_calls(
    program: &TypedProgram,
    method: &TypedMethod,
    depth: usize,
) -> Result<TypedMethod, InlineError> {
    let mut ctx = Inliner {
        program,
        depth,
        counter: 0,
        stack: vec![method.name.clone()],
    };
    let body = ctx.stmts(&method.body)?;
    Ok(TypedMethod {
        name: method.name.clone(),
        params: method.params.clone(),
        return_type: method.return_type.clone(),
        contracts: method.contracts.clone(),
        body,
        pos: method.pos,
    })
}

/// True when no user-method call remains anywhere in the body.
pub fn is_call_free(body: &[TStmt]) -> bool {
    fn expr_free(e: &TExpr) -> bool {
        match &e.kind {
            TExprKind::CallMethod(..) => false,
            TExprKind::Unary(_, t) => expr_free(t),
            TExprKind::Binary(_, l, r) => expr_free(l) && expr_free(r),
            TExprKind::Field(b, _) => expr_free(b),
            TExprKind::Index(b, i) => expr_free(b) && expr_free(i),
            TExprKind::CallBuiltin(_, args)
            | TExprKind::SpecPred(_, args)
            | TExprKind::NewRecord(_, args)
            | TExprKind::NewArray(args) => args.iter().all(expr_free),
            TExprKind::Forall { range, body, .. } => expr_free(range) && expr_free(body),
            _ => true,
        }
    }
    body.iter().all(|s| match s {
        TStmt::VarDecl { init, .. } => expr_free(init),
        TStmt::Assign { value, .. } => expr_free(value),
        TStmt::If {
            cond,
            then_branch,
            else_branch,
            ..
        } => expr_free(cond) && is_call_free(then_branch) && is_call_free(else_branch),
        TStmt::While { cond, body, .. } => expr_free(cond) && is_call_free(body),
        TStmt::Return { value, .. } => expr_free(value),
    })
}

struct Inliner<'p> {
    program: &'p TypedProgram,
    depth: usize,
    counter: u64,
    stack: Vec<String>,
}

impl<'p> Inliner<'p> {
    fn stmts(&mut self, stmts: &[TStmt]) -> Result<Vec<TStmt>, InlineError> {
        let mut out = Vec::new();
        for s in stmts {
            self.stmt(s, &mut out)?;
        }
        Ok(out)
    }

    fn stmt(&mut self, s: &TStmt, out: &mut Vec<TStmt>) -> Result<(), InlineError> {
        match s {
            TStmt::VarDecl {
                name,
                ty,
                init,
                pos,
            } => {
                let init = self.expr(init, out)?;
                out.push(TStmt::VarDecl {
                    name: name.clone(),
                    ty: ty.clone(),
                    init,
                    pos: *pos,
                });
            }
            TStmt::Assign {
                name,
                ty,
                value,
                pos,
            } => {
                let value = self.expr(value, out)?;
                out.push(TStmt::Assign {
                    name: name.clone(),
                    ty: ty.clone(),
                    value,
                    pos: *pos,
                });
            }
            TStmt::If {
                cond,
                then_branch,
                else_branch,
                pos,
            } => {
                let cond = self.expr(cond, out)?;
                out.push(TStmt::If {
                    cond,
                    then_branch: self.stmts(then_branch)?,
                    else_branch: self.stmts(else_branch)?,
                    pos: *pos,
                });
            }
            TStmt::While {
                cond,
                invariant,
                body,
                pos,
            } => {
                // Calls in loop guards would need hoisting into the body;
                // none of the supported programs do this.
                let mut guard_hoist = Vec::new();
                let cond = self.expr(cond, &mut guard_hoist)?;
                if !guard_hoist.is_empty() {
                    return Err(InlineError::Unsupported {
                        method: self.stack.last().cloned().unwrap_or_default(),
                        reason: "method call in loop guard".into(),
                    });
                }
                out.push(TStmt::While {
                    cond,
                    invariant: invariant.clone(),
                    body: self.stmts(body)?,
                    pos: *pos,
                });
            }
            TStmt::Return { value, pos } => {
                let value = self.expr(value, out)?;
                out.push(TStmt::Return {
                    value,
                    pos: *pos,
                });
            }
        }
        Ok(())
    }

    /// Rewrites an expression, hoisting any user-method call into `out`
    /// as a fresh temp declaration (post-order, so argument calls are
    /// hoisted first and evaluation order is preserved).
    fn expr(&mut self, e: &TExpr, out: &mut Vec<TStmt>) -> Result<TExpr, InlineError> {
        let kind = match &e.kind {
            TExprKind::CallMethod(name, args) => {
                let args: Vec<TExpr> = args
                    .iter()
                    .map(|a| self.expr(a, out))
                    .collect::<Result<_, _>>()?;
                let temp = self.splice_call(name, &args, out, e.pos)?;
                TExprKind::Var(temp)
            }
            TExprKind::Unary(op, t) => TExprKind::Unary(*op, Box::new(self.expr(t, out)?)),
            TExprKind::Binary(op, l, r) => TExprKind::Binary(
                *op,
                Box::new(self.expr(l, out)?),
                Box::new(self.expr(r, out)?),
            ),
            TExprKind::Field(b, f) => {
                TExprKind::Field(Box::new(self.expr(b, out)?), f.clone())
            }
            TExprKind::Index(b, i) => TExprKind::Index(
                Box::new(self.expr(b, out)?),
                Box::new(self.expr(i, out)?),
            ),
            TExprKind::CallBuiltin(b, args) => TExprKind::CallBuiltin(
                *b,
                args.iter()
                    .map(|a| self.expr(a, out))
                    .collect::<Result<_, _>>()?,
            ),
            TExprKind::SpecPred(p, args) => TExprKind::SpecPred(
                p.clone(),
                args.iter()
                    .map(|a| self.expr(a, out))
                    .collect::<Result<_, _>>()?,
            ),
            TExprKind::NewRecord(n, args) => TExprKind::NewRecord(
                n.clone(),
                args.iter()
                    .map(|a| self.expr(a, out))
                    .collect::<Result<_, _>>()?,
            ),
            TExprKind::NewArray(args) => TExprKind::NewArray(
                args.iter()
                    .map(|a| self.expr(a, out))
                    .collect::<Result<_, _>>()?,
            ),
            other => other.clone(),
        };
        Ok(TExpr {
            kind,
            ty: e.ty.clone(),
            pos: e.pos,
        })
    }

    /// Splices `callee(args...)` into `out` and returns the name of a
    /// fresh temp holding the call's value.
    fn splice_call(
        &mut self,
        callee_name: &str,
        args: &[TExpr],
        out: &mut Vec<TStmt>,
        pos: crate::minif::token::Pos,
    ) -> Result<String, InlineError> {
        if self.stack.iter().any(|n| n == callee_name) {
            return Err(InlineError::Recursion(callee_name.to_string()));
        }
        if self.stack.len() > self.depth {
            return Err(InlineError::DepthExceeded(self.depth));
        }
        let callee = self
            .program
            .method(callee_name)
            .expect("typechecked call resolves");

        let (straight, ret) = split_trailing_return(&callee.body).ok_or_else(|| {
            InlineError::Unsupported {
                method: callee_name.to_string(),
                reason: "body is not straight-line with a trailing return".into(),
            }
        })?;

        self.counter += 1;
        let suffix = format!("!i{}", self.counter);

        // Bind parameters to the (already rewritten) argument expressions.
        for ((pname, pty), arg) in callee.params.iter().zip(args) {
            out.push(TStmt::VarDecl {
                name: format!("{pname}{suffix}"),
                ty: pty.clone(),
                init: arg.clone(),
                pos,
            });
        }

        // Splice the callee body with renamed locals, recursively inlining
        // calls inside it.
        self.stack.push(callee_name.to_string());
        for s in straight {
            let renamed = rename_stmt(s, &suffix);
            self.stmt(&renamed, out)?;
        }
        let ret_renamed = rename_expr(ret, &suffix);
        let ret_rewritten = self.expr(&ret_renamed, out)?;
        self.stack.pop();

        let temp = format!("t{suffix}");
        out.push(TStmt::VarDecl {
            name: temp.clone(),
            ty: callee.return_type.clone(),
            init: ret_rewritten,
            pos,
        });
        Ok(temp)
    }
}

/// A body of the form `stmts...; return e;` where no statement is a loop
/// or a return.
fn split_trailing_return(body: &[TStmt]) -> Option<(&[TStmt], &TExpr)> {
    let (last, rest) = body.split_last()?;
    let TStmt::Return { value, .. } = last else {
        return None;
    };
    fn ok(stmts: &[TStmt]) -> bool {
        stmts.iter().all(|s| match s {
            TStmt::VarDecl { .. } | TStmt::Assign { .. } => true,
            TStmt::If {
                then_branch,
                else_branch,
                ..
            } => ok(then_branch) && ok(else_branch),
            TStmt::While { .. } | TStmt::Return { .. } => false,
        })
    }
    if ok(rest) {
        Some((rest, value))
    } else {
        None
    }
}

fn rename_stmt(s: &TStmt, suffix: &str) -> TStmt {
    match s {
        TStmt::VarDecl {
            name,
            ty,
            init,
            pos,
        } => TStmt::VarDecl {
            name: format!("{name}{suffix}"),
            ty: ty.clone(),
            init: rename_expr(init, suffix),
            pos: *pos,
        },
        TStmt::Assign {
            name,
            ty,
            value,
            pos,
        } => TStmt::Assign {
            name: format!("{name}{suffix}"),
            ty: ty.clone(),
            value: rename_expr(value, suffix),
            pos: *pos,
        },
        TStmt::If {
            cond,
            then_branch,
            else_branch,
            pos,
        } => TStmt::If {
            cond: rename_expr(cond, suffix),
            then_branch: then_branch.iter().map(|t| rename_stmt(t, suffix)).collect(),
            else_branch: else_branch.iter().map(|t| rename_stmt(t, suffix)).collect(),
            pos: *pos,
        },
        TStmt::While {
            cond,
            invariant,
            body,
            pos,
        } => TStmt::While {
            cond: rename_expr(cond, suffix),
            invariant: invariant.as_ref().map(|i| rename_expr(i, suffix)),
            body: body.iter().map(|t| rename_stmt(t, suffix)).collect(),
            pos: *pos,
        },
        TStmt::Return { value, pos } => TStmt::Return {
            value: rename_expr(value, suffix),
            pos: *pos,
        },
    }
}

/// Renames every variable reference; parameters and locals of the callee
/// all receive the suffix, and nothing else can occur free in its body.
fn rename_expr(e: &TExpr, suffix: &str) -> TExpr {
    let kind = match &e.kind {
        TExprKind::Var(n) => TExprKind::Var(format!("{n}{suffix}")),
        TExprKind::Unary(op, t) => TExprKind::Unary(*op, Box::new(rename_expr(t, suffix))),
        TExprKind::Binary(op, l, r) => TExprKind::Binary(
            *op,
            Box::new(rename_expr(l, suffix)),
            Box::new(rename_expr(r, suffix)),
        ),
        TExprKind::Field(b, f) => TExprKind::Field(Box::new(rename_expr(b, suffix)), f.clone()),
        TExprKind::Index(b, i) => TExprKind::Index(
            Box::new(rename_expr(b, suffix)),
            Box::new(rename_expr(i, suffix)),
        ),
        TExprKind::CallMethod(n, args) => TExprKind::CallMethod(
            n.clone(),
            args.iter().map(|a| rename_expr(a, suffix)).collect(),
        ),
        TExprKind::CallBuiltin(b, args) => TExprKind::CallBuiltin(
            *b,
            args.iter().map(|a| rename_expr(a, suffix)).collect(),
        ),
        TExprKind::SpecPred(p, args) => TExprKind::SpecPred(
            p.clone(),
            args.iter().map(|a| rename_expr(a, suffix)).collect(),
        ),
        TExprKind::NewRecord(n, args) => TExprKind::NewRecord(
            n.clone(),
            args.iter().map(|a| rename_expr(a, suffix)).collect(),
        ),
        TExprKind::NewArray(args) => {
            TExprKind::NewArray(args.iter().map(|a| rename_expr(a, suffix)).collect())
        }
        other => other.clone(),
    };
    TExpr {
        kind,
        ty: e.ty.clone(),
        pos: e.pos,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minif::load_program;

    #[test]
    fn call_free_method_is_unchanged() {
        let p = load_program("method f(x: double): double { return x + 1.0; }").unwrap();
        let m = p.method("f").unwrap();
        let inlined = inline_calls(&p, m, 8).unwrap();
        assert_eq!(inlined.body, m.body);
    }

    #[test]
    fn single_call_is_spliced_with_renamed_locals() {
        let src = r#"record M { a: double, b: double }
method det(m: M): double { var d: double = m.a * m.b; return d; }
method f(m: M): double { return det(m); }"#;
        let p = load_program(src).unwrap();
        let inlined = inline_calls(&p, p.method("f").unwrap(), 8).unwrap();
        assert!(is_call_free(&inlined.body));
        // the callee local `d` must have been renamed
        let names: Vec<String> = inlined
            .body
            .iter()
            .filter_map(|s| match s {
                TStmt::VarDecl { name, .. } => Some(name.clone()),
                _ => None,
            })
            .collect();
        assert!(names.iter().any(|n| n.starts_with("d!i")), "{names:?}");
    }

    #[test]
    fn nested_calls_flatten_fully() {
        let src = r#"method rot(x: double): double { return x * 2.0; }
method f(x: double): double { return rot(rot(rot(rot(x)))); }"#;
        let p = load_program(src).unwrap();
        let inlined = inline_calls(&p, p.method("f").unwrap(), 8).unwrap();
        assert!(is_call_free(&inlined.body));
        // interpreter agreement: original and inlined compute the same value
        use crate::interp::{eval_method, ConcreteValue};
        use std::collections::HashMap;
        let mut inputs = HashMap::new();
        inputs.insert("x".to_string(), ConcreteValue::f64(1.25));
        let a = eval_method(&p, p.method("f").unwrap(), &inputs).unwrap();
        let b = eval_method(&p, &inlined, &inputs).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn recursion_is_detected() {
        let src = "method f(x: double): double { return f(x); }";
        let p = load_program(src).unwrap();
        let err = inline_calls(&p, p.method("f").unwrap(), 8).unwrap_err();
        assert!(matches!(err, InlineError::Recursion(_)));
    }
}
