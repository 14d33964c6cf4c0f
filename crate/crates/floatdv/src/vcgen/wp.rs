//! Expression encoding and weakest-precondition computation.
//!
//! Record and array values are flattened to scalar slots: a parameter
//! `a: Complex` becomes the symbolic constants `a.re` and `a.im`, and
//! `vec: double[2]` becomes `vec[0]` and `vec[1]`. `\result` uses the
//! same scheme and is always substituted away by the `return` rule.
//!
//! Loops contribute three premise families: the invariant must hold on
//! entry (carried by the main wp chain), be preserved by the body, and
//! justify the continuation when the guard fails. Locals assigned in the
//! body are havocked with fresh symbols in the latter two.

use crate::formula::{
    substitute, FpBinOp, FpClass, FpCmpOp, FpLiteral, IntBinOp, IntCmpOp, Sort, SortError, Term,
    UninterpretedFn,
};
use crate::minif::ast::{BinOp, Builtin, FpScalar, UnOp};
use crate::minif::{MfType, TExpr, TExprKind, TStmt, TypedProgram};
use std::collections::HashMap;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum WpError {
    #[error("loop without an invariant at line {0}")]
    UnannotatedLoop(u32),
    #[error("array index is not constant after unrolling")]
    NonConstIndex,
    #[error("unsupported construct: {0}")]
    Unsupported(String),
    #[error("ill-sorted term: {0}")]
    Sort(#[from] SortError),
}

/// A flattened value: scalar terms addressed per field/element.
#[derive(Debug, Clone)]
pub enum Encoded {
    Scalar(Term),
    Record(String, Vec<(String, Term)>),
    Array(Vec<Term>),
}

impl Encoded {
    pub fn scalar(self) -> Result<Term, WpError> {
        match self {
            Encoded::Scalar(t) => Ok(t),
            other => Err(WpError::Unsupported(format!(
                "aggregate used as scalar: {other:?}"
            ))),
        }
    }
}

/// Slot names and sorts for a variable of the given type.
pub fn slots_of(program: &TypedProgram, name: &str, ty: &MfType) -> Vec<(String, Sort)> {
    match ty {
        MfType::Double => vec![(name.to_string(), Sort::Float64)],
        MfType::Float => vec![(name.to_string(), Sort::Float32)],
        MfType::Bool => vec![(name.to_string(), Sort::Bool)],
        MfType::Int => vec![(name.to_string(), Sort::Int)],
        MfType::Record(rec_name) => match program.record(rec_name) {
            Some(rec) => rec
                .fields
                .iter()
                .map(|(f, scalar)| {
                    let sort = match scalar {
                        FpScalar::Double => Sort::Float64,
                        FpScalar::Float => Sort::Float32,
                    };
                    (format!("{name}.{f}"), sort)
                })
                .collect(),
            None => Vec::new(),
        },
        MfType::Array(n) => (0..*n)
            .map(|i| (format!("{name}[{i}]"), Sort::Float64))
            .collect(),
    }
}

/// The symbolic value of a variable: each slot maps to its own symbol.
pub fn symbolic_value(program: &TypedProgram, name: &str, ty: &MfType) -> Encoded {
    match ty {
        MfType::Double => Encoded::Scalar(Term::var(name, Sort::Float64)),
        MfType::Float => Encoded::Scalar(Term::var(name, Sort::Float32)),
        MfType::Bool => Encoded::Scalar(Term::var(name, Sort::Bool)),
        MfType::Int => Encoded::Scalar(Term::var(name, Sort::Int)),
        MfType::Record(rec_name) => {
            let fields = program
                .record(rec_name)
                .map(|rec| {
                    rec.fields
                        .iter()
                        .map(|(f, scalar)| {
                            let sort = match scalar {
                                FpScalar::Double => Sort::Float64,
                                FpScalar::Float => Sort::Float32,
                            };
                            (f.clone(), Term::var(format!("{name}.{f}"), sort))
                        })
                        .collect()
                })
                .unwrap_or_default();
            Encoded::Record(rec_name.clone(), fields)
        }
        MfType::Array(n) => Encoded::Array(
            (0..*n)
                .map(|i| Term::var(format!("{name}[{i}]"), Sort::Float64))
                .collect(),
        ),
    }
}

/// Encode a typed expression. `\result` encodes to its placeholder slots;
/// the return rule substitutes them away.
pub fn encode(program: &TypedProgram, e: &TExpr, result_ty: &MfType) -> Result<Encoded, WpError> {
    Ok(match &e.kind {
        TExprKind::FpLit(lit) => Encoded::Scalar(Term::FpLit(*lit)),
        TExprKind::IntLit(v) => Encoded::Scalar(Term::IntLit(*v)),
        TExprKind::BoolLit(b) => Encoded::Scalar(Term::BoolLit(*b)),
        TExprKind::Var(name) => symbolic_value(program, name, &e.ty),
        TExprKind::Result => symbolic_value(program, "\\result", result_ty),
        TExprKind::Field(base, field) => {
            let b = encode(program, base, result_ty)?;
            match b {
                Encoded::Record(_, fields) => Encoded::Scalar(
                    fields
                        .into_iter()
                        .find(|(f, _)| f == field)
                        .map(|(_, t)| t)
                        .ok_or_else(|| WpError::Unsupported(format!("no field {field}")))?,
                ),
                other => {
                    return Err(WpError::Unsupported(format!(
                        "field access on {other:?}"
                    )))
                }
            }
        }
        TExprKind::Index(base, index) => {
            let b = encode(program, base, result_ty)?;
            let i = match &index.kind {
                TExprKind::IntLit(i) => *i,
                _ => return Err(WpError::NonConstIndex),
            };
            match b {
                Encoded::Array(elems) => {
                    let idx = usize::try_from(i).map_err(|_| WpError::NonConstIndex)?;
                    Encoded::Scalar(
                        elems
                            .get(idx)
                            .cloned()
                            .ok_or_else(|| WpError::Unsupported("index out of bounds".into()))?,
                    )
                }
                other => {
                    return Err(WpError::Unsupported(format!("indexing into {other:?}")))
                }
            }
        }
        TExprKind::Unary(UnOp::Neg, operand) => {
            let t = encode(program, operand, result_ty)?.scalar()?;
            match t {
                // Fold literal negation so bounds print as literal triples.
                Term::FpLit(l) => {
                    let flipped = l.bits() ^ (1u64 << (l.format().total_bits() - 1));
                    Encoded::Scalar(Term::FpLit(FpLiteral::from_bits(l.format(), flipped)))
                }
                Term::IntLit(v) => Encoded::Scalar(Term::IntLit(-v)),
                t if t.sort() == Sort::Int => Encoded::Scalar(Term::int_arith(
                    IntBinOp::Sub,
                    Term::IntLit(0),
                    t,
                )?),
                t => Encoded::Scalar(Term::fp_neg(t)?),
            }
        }
        TExprKind::Unary(UnOp::Not, operand) => {
            let t = encode(program, operand, result_ty)?.scalar()?;
            Encoded::Scalar(Term::not(t)?)
        }
        TExprKind::Binary(op, lhs, rhs) => {
            let l = encode(program, lhs, result_ty)?.scalar()?;
            let r = encode(program, rhs, result_ty)?.scalar()?;
            let int_operands = l.sort() == Sort::Int;
            let t = match op {
                BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => {
                    if int_operands {
                        let iop = match op {
                            BinOp::Add => IntBinOp::Add,
                            BinOp::Sub => IntBinOp::Sub,
                            BinOp::Mul => IntBinOp::Mul,
                            _ => return Err(WpError::Unsupported("int division".into())),
                        };
                        Term::int_arith(iop, l, r)?
                    } else {
                        let fop = match op {
                            BinOp::Add => FpBinOp::Add,
                            BinOp::Sub => FpBinOp::Sub,
                            BinOp::Mul => FpBinOp::Mul,
                            BinOp::Div => FpBinOp::Div,
                            _ => unreachable!(),
                        };
                        Term::fp_arith(fop, l, r)?
                    }
                }
                BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq => {
                    if int_operands {
                        let iop = match op {
                            BinOp::Lt => IntCmpOp::Lt,
                            BinOp::Le => IntCmpOp::Leq,
                            BinOp::Gt => IntCmpOp::Gt,
                            BinOp::Ge => IntCmpOp::Geq,
                            BinOp::Eq => IntCmpOp::Eq,
                            _ => unreachable!(),
                        };
                        Term::int_cmp(iop, l, r)?
                    } else {
                        let fop = match op {
                            BinOp::Lt => FpCmpOp::Lt,
                            BinOp::Le => FpCmpOp::Leq,
                            BinOp::Gt => FpCmpOp::Gt,
                            BinOp::Ge => FpCmpOp::Geq,
                            BinOp::Eq => FpCmpOp::Eq,
                            _ => unreachable!(),
                        };
                        Term::fp_cmp(fop, l, r)?
                    }
                }
                BinOp::Ne => {
                    let eq = if int_operands {
                        Term::int_cmp(IntCmpOp::Eq, l, r)?
                    } else {
                        Term::fp_cmp(FpCmpOp::Eq, l, r)?
                    };
                    Term::not(eq)?
                }
                BinOp::And => Term::and(l, r)?,
                BinOp::Or => Term::bool_op(crate::formula::BoolOp::Or, l, r)?,
                BinOp::Implies => Term::implies(l, r)?,
            };
            Encoded::Scalar(t)
        }
        TExprKind::CallBuiltin(b, args) => {
            let a = encode(program, &args[0], result_ty)?.scalar()?;
            let t = match b {
                Builtin::Sin => Term::app(UninterpretedFn::SinF64, a)?,
                Builtin::Cos => Term::app(UninterpretedFn::CosF64, a)?,
                Builtin::Atan => Term::app(UninterpretedFn::AtanF64, a)?,
                Builtin::Sqrt => Term::app(UninterpretedFn::SqrtF64, a)?,
                Builtin::Abs => Term::fp_abs(a)?,
            };
            Encoded::Scalar(t)
        }
        TExprKind::SpecPred(pred, args) => {
            let terms: Vec<Term> = args
                .iter()
                .map(|a| encode(program, a, result_ty).and_then(Encoded::scalar))
                .collect::<Result<_, _>>()?;
            let t = match pred.as_str() {
                "fp_nan" => Term::classify(FpClass::IsNan, terms[0].clone())?,
                "fp_infinite" => Term::classify(FpClass::IsInfinite, terms[0].clone())?,
                "fp_normal" => Term::classify(FpClass::IsNormal, terms[0].clone())?,
                "fp_zero" => Term::classify(FpClass::IsZero, terms[0].clone())?,
                "fp_nice" => Term::fp_nice(terms[0].clone())?,
                "fp_bitEq" => Term::bit_eq(terms[0].clone(), terms[1].clone())?,
                other => {
                    return Err(WpError::Unsupported(format!("predicate {other}")))
                }
            };
            Encoded::Scalar(t)
        }
        TExprKind::NewRecord(name, args) => {
            let rec = program
                .record(name)
                .ok_or_else(|| WpError::Unsupported(format!("no record {name}")))?;
            let fields = rec
                .fields
                .iter()
                .zip(args)
                .map(|((f, _), a)| {
                    encode(program, a, result_ty)
                        .and_then(Encoded::scalar)
                        .map(|t| (f.clone(), t))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Encoded::Record(name.clone(), fields)
        }
        TExprKind::NewArray(elems) => Encoded::Array(
            elems
                .iter()
                .map(|a| encode(program, a, result_ty).and_then(Encoded::scalar))
                .collect::<Result<_, _>>()?,
        ),
        TExprKind::CallMethod(name, _) => {
            return Err(WpError::Unsupported(format!(
                "user call `{name}` not inlined"
            )))
        }
        TExprKind::Forall { .. } => {
            return Err(WpError::Unsupported("quantifier survived unrolling".into()))
        }
    })
}

/// Binding of a variable's slots to the slots of an encoded value.
fn slot_binding(
    program: &TypedProgram,
    name: &str,
    ty: &MfType,
    value: Encoded,
) -> Result<HashMap<String, Term>, WpError> {
    let mut map = HashMap::new();
    match (ty, value) {
        (MfType::Double | MfType::Float | MfType::Bool | MfType::Int, Encoded::Scalar(t)) => {
            map.insert(name.to_string(), t);
        }
        (MfType::Record(_), Encoded::Record(_, fields)) => {
            for (f, t) in fields {
                map.insert(format!("{name}.{f}"), t);
            }
        }
        (MfType::Array(n), Encoded::Array(elems)) => {
            if elems.len() != *n {
                return Err(WpError::Unsupported("array length mismatch".into()));
            }
            for (i, t) in elems.into_iter().enumerate() {
                map.insert(format!("{name}[{i}]"), t);
            }
        }
        (ty, val) => {
            return Err(WpError::Unsupported(format!(
                "assignment shape mismatch: {ty} vs {val:?}"
            )))
        }
    }
    let _ = program;
    Ok(map)
}

/// A side premise produced by the loop rule.
#[derive(Debug, Clone)]
pub struct LoopPremise {
    /// "preserve" or "use"
    pub kind: &'static str,
    pub loop_index: usize,
    /// Extra hypotheses (invariant and guard polarity under havoc).
    pub hypotheses: Vec<Term>,
    pub goal: Term,
}

pub struct WpOutcome {
    pub formula: Term,
    pub premises: Vec<LoopPremise>,
}

/// wp over a statement list against postcondition `post`.
pub fn wp_block(
    program: &TypedProgram,
    stmts: &[TStmt],
    post: Term,
    result_ty: &MfType,
) -> Result<WpOutcome, WpError> {
    let mut ctx = WpCtx {
        program,
        result_ty,
        premises: Vec::new(),
        fresh: 0,
        loops_seen: 0,
    };
    let formula = ctx.wp(stmts, post)?;
    Ok(WpOutcome {
        formula,
        premises: ctx.premises,
    })
}

struct WpCtx<'p> {
    program: &'p TypedProgram,
    result_ty: &'p MfType,
    premises: Vec<LoopPremise>,
    fresh: u64,
    loops_seen: usize,
}

impl<'p> WpCtx<'p> {
    fn wp(&mut self, stmts: &[TStmt], post: Term) -> Result<Term, WpError> {
        let mut q = post;
        for s in stmts.iter().rev() {
            q = self.wp_stmt(s, q)?;
        }
        Ok(q)
    }

    fn wp_stmt(&mut self, s: &TStmt, q: Term) -> Result<Term, WpError> {
        match s {
            TStmt::VarDecl { name, ty, init, .. } | TStmt::Assign { name, ty, value: init, .. } => {
                let value = encode(self.program, init, self.result_ty)?;
                let binding = slot_binding(self.program, name, ty, value)?;
                Ok(substitute(&q, &binding)?)
            }
            TStmt::Return { value, .. } => {
                let encoded = encode(self.program, value, self.result_ty)?;
                let binding =
                    slot_binding(self.program, "\\result", self.result_ty, encoded)?;
                Ok(substitute(&q, &binding)?)
            }
            TStmt::If {
                cond,
                then_branch,
                else_branch,
                ..
            } => {
                let c = encode(self.program, cond, self.result_ty)?.scalar()?;
                let wt = self.wp(then_branch, q.clone())?;
                let we = self.wp(else_branch, q)?;
                Ok(Term::ite(c, wt, we)?)
            }
            TStmt::While {
                cond,
                invariant,
                body,
                pos,
            } => {
                let inv = invariant
                    .as_ref()
                    .ok_or(WpError::UnannotatedLoop(pos.line))?;
                self.loops_seen += 1;
                let loop_index = self.loops_seen;
                let inv_t = encode(self.program, inv, self.result_ty)?.scalar()?;
                let guard_t = encode(self.program, cond, self.result_ty)?.scalar()?;

                // Havoc the locals assigned inside the body.
                let mods = assigned_vars(body);
                let mut havoc: HashMap<String, Term> = HashMap::new();
                for (name, ty) in &mods {
                    for (slot, sort) in slots_of(self.program, name, ty) {
                        self.fresh += 1;
                        let fresh_name = format!("{slot}!h{}", self.fresh);
                        havoc.insert(slot, Term::var(fresh_name, sort));
                    }
                }

                // preserve: inv && guard (havocked) |- wp(body, inv) (havocked)
                let body_wp = self.wp(body, inv_t.clone())?;
                self.premises.push(LoopPremise {
                    kind: "preserve",
                    loop_index,
                    hypotheses: vec![
                        substitute(&inv_t, &havoc)?,
                        substitute(&guard_t, &havoc)?,
                    ],
                    goal: substitute(&body_wp, &havoc)?,
                });

                // use: inv && !guard (havocked) |- Q (havocked)
                self.premises.push(LoopPremise {
                    kind: "use",
                    loop_index,
                    hypotheses: vec![
                        substitute(&inv_t, &havoc)?,
                        Term::not(substitute(&guard_t, &havoc)?)?,
                    ],
                    goal: substitute(&q, &havoc)?,
                });

                // The chain to the left must establish the invariant.
                Ok(inv_t)
            }
        }
    }
}

/// Variables assigned (or declared) anywhere in a statement list.
fn assigned_vars(stmts: &[TStmt]) -> Vec<(String, MfType)> {
    let mut out: Vec<(String, MfType)> = Vec::new();
    fn go(stmts: &[TStmt], out: &mut Vec<(String, MfType)>) {
        for s in stmts {
            match s {
                TStmt::VarDecl { name, ty, .. } | TStmt::Assign { name, ty, .. } => {
                    if !out.iter().any(|(n, _)| n == name) {
                        out.push((name.clone(), ty.clone()));
                    }
                }
                TStmt::If {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    go(then_branch, out);
                    go(else_branch, out);
                }
                TStmt::While { body, .. } => go(body, out),
                TStmt::Return { .. } => {}
            }
        }
    }
    go(stmts, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minif::load_program;

    fn wp_of(src: &str, method: &str, post_from_ensures: bool) -> (Term, Vec<LoopPremise>) {
        let p = load_program(src).unwrap();
        let m = p.method(method).unwrap();
        let post = if post_from_ensures {
            encode(&p, &m.contracts[0].ensures, &m.return_type)
                .unwrap()
                .scalar()
                .unwrap()
        } else {
            Term::BoolLit(true)
        };
        let out = wp_block(&p, &m.body, post, &m.return_type).unwrap();
        (out.formula, out.premises)
    }

    #[test]
    fn wp_of_division_substitutes_into_fp_nice() {
        let src = r#"/*@ requires true; ensures fp_nice(\result); @*/
method f(a: double, b: double): double { return a / b; }"#;
        let (formula, premises) = wp_of(src, "f", true);
        assert!(premises.is_empty());
        let div = Term::fp_arith(
            FpBinOp::Div,
            Term::var("a", Sort::Float64),
            Term::var("b", Sort::Float64),
        )
        .unwrap();
        assert_eq!(formula, Term::fp_nice(div).unwrap());
    }

    #[test]
    fn wp_of_addition_hits_not_nan() {
        let src = r#"/*@ requires true; ensures !fp_nan(\result); @*/
method f(a: double, b: double): double { return a + b; }"#;
        let (formula, _) = wp_of(src, "f", true);
        let add = Term::fp_arith(
            FpBinOp::Add,
            Term::var("a", Sort::Float64),
            Term::var("b", Sort::Float64),
        )
        .unwrap();
        let expect = Term::not(Term::classify(FpClass::IsNan, add).unwrap()).unwrap();
        assert_eq!(formula, expect);
    }

    #[test]
    fn sequencing_composes_substitutions() {
        let src = r#"/*@ requires true; ensures \result == 4.0; @*/
method f(x: double): double {
  var y: double = x + 1.0;
  var z: double = y * 2.0;
  return z;
}"#;
        let (formula, _) = wp_of(src, "f", true);
        // ((x + 1) * 2) == 4
        let inner = Term::fp_arith(
            FpBinOp::Add,
            Term::var("x", Sort::Float64),
            Term::lit_f64(1.0),
        )
        .unwrap();
        let outer = Term::fp_arith(FpBinOp::Mul, inner, Term::lit_f64(2.0)).unwrap();
        let expect = Term::fp_cmp(FpCmpOp::Eq, outer, Term::lit_f64(4.0)).unwrap();
        assert_eq!(formula, expect);
    }

    #[test]
    fn trivial_loop_produces_three_premise_families() {
        let src = r#"/*@ requires true; ensures true; @*/
method f(): double {
  var x: double = 1.0;
  var i: int = 0;
  /*@ loop_invariant true; @*/
  while (i < 10) { x = x * 0.5; i = i + 1; }
  return x;
}"#;
        let (formula, premises) = wp_of(src, "f", true);
        // main chain establishes the invariant (here literally `true`)
        assert_eq!(formula, Term::BoolLit(true));
        assert_eq!(premises.len(), 2);
        assert_eq!(premises[0].kind, "preserve");
        assert_eq!(premises[1].kind, "use");
        // havocked symbols appear in the premises
        let uses_havoc = premises.iter().any(|p| {
            p.hypotheses
                .iter()
                .chain(std::iter::once(&p.goal))
                .any(|t| t.free_vars().iter().any(|(n, _)| n.contains("!h")))
        });
        assert!(uses_havoc);
    }

    #[test]
    fn record_return_flattens_result_slots() {
        let src = r#"record Complex { re: double, im: double }
/*@ requires true; ensures !fp_nan(\result.re); @*/
method f(a: Complex): Complex { return new Complex(a.re + 1.0, a.im); }"#;
        let (formula, _) = wp_of(src, "f", true);
        let add = Term::fp_arith(
            FpBinOp::Add,
            Term::var("a.re", Sort::Float64),
            Term::lit_f64(1.0),
        )
        .unwrap();
        let expect = Term::not(Term::classify(FpClass::IsNan, add).unwrap()).unwrap();
        assert_eq!(formula, expect);
    }
}
