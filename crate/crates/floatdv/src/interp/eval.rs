//! Strict IEEE-754 evaluator for MiniF. Arithmetic happens in the operand
//! format under round-to-nearest-even (the host's native f32/f64 ops);
//! infinities and NaN propagate instead of raising. Transcendentals
//! delegate to the host math library, which IEEE 754 only loosely
//! specifies, so replay through them is flagged by callers.

use super::value::ConcreteValue;
use crate::minif::ast::{BinOp, Builtin, UnOp};
use crate::minif::{TExpr, TExprKind, TStmt, TypedMethod, TypedProgram};
use std::collections::HashMap;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum EvalError {
    #[error("missing input for parameter `{0}`")]
    MissingInput(String),
    #[error("input for `{param}` has the wrong type (expected {expected})")]
    InputType { param: String, expected: String },
    #[error("array index {index} out of bounds (length {len})")]
    IndexOutOfBounds { index: i64, len: usize },
    #[error("array index is not a constant integer")]
    NonConstIndex,
    #[error("internal: {0}")]
    Internal(String),
}

/// One executed statement for `--trace` output.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub line: u32,
    pub what: String,
    pub value: ConcreteValue,
}

struct Frame<'p> {
    program: &'p TypedProgram,
    env: HashMap<String, ConcreteValue>,
    result_hint: &'p str,
    trace: Option<Vec<TraceEntry>>,
}

/// Run `method` on the given inputs. Inputs must cover every parameter
/// with a matching type.
pub fn eval_method(
    program: &TypedProgram,
    method: &TypedMethod,
    inputs: &HashMap<String, ConcreteValue>,
) -> Result<ConcreteValue, EvalError> {
    eval_method_inner(program, method, inputs, false).map(|(v, _)| v)
}

/// Like `eval_method` but records a per-statement trace.
pub fn eval_method_traced(
    program: &TypedProgram,
    method: &TypedMethod,
    inputs: &HashMap<String, ConcreteValue>,
) -> Result<(ConcreteValue, Vec<TraceEntry>), EvalError> {
    let (v, t) = eval_method_inner(program, method, inputs, true)?;
    Ok((v, t.unwrap_or_default()))
}

fn eval_method_inner(
    program: &TypedProgram,
    method: &TypedMethod,
    inputs: &HashMap<String, ConcreteValue>,
    traced: bool,
) -> Result<(ConcreteValue, Option<Vec<TraceEntry>>), EvalError> {
    let mut env = HashMap::new();
    for (name, ty) in &method.params {
        let v = inputs
            .get(name)
            .ok_or_else(|| EvalError::MissingInput(name.clone()))?;
        if !v.matches_type(ty) {
            return Err(EvalError::InputType {
                param: name.clone(),
                expected: ty.to_string(),
            });
        }
        env.insert(name.clone(), v.clone());
    }
    let mut frame = Frame {
        program,
        env,
        result_hint: &method.name,
        trace: traced.then(Vec::new),
    };
    let out = exec_block(&mut frame, &method.body)?
        .ok_or_else(|| EvalError::Internal("method fell off the end".into()))?;
    Ok((out, frame.trace))
}

/// Evaluate a contract clause. `result` supplies `\result` for ensures.
pub fn eval_spec(
    program: &TypedProgram,
    inputs: &HashMap<String, ConcreteValue>,
    result: Option<&ConcreteValue>,
    clause: &TExpr,
) -> Result<bool, EvalError> {
    let mut frame = Frame {
        program,
        env: inputs.clone(),
        result_hint: "",
        trace: None,
    };
    let v = eval_expr(&mut frame, clause, result)?;
    match v {
        ConcreteValue::Bool(b) => Ok(b),
        other => Err(EvalError::Internal(format!(
            "spec clause evaluated to non-boolean {other}"
        ))),
    }
}

fn exec_block(frame: &mut Frame, stmts: &[TStmt]) -> Result<Option<ConcreteValue>, EvalError> {
    for s in stmts {
        if let Some(ret) = exec_stmt(frame, s)? {
            return Ok(Some(ret));
        }
    }
    Ok(None)
}

fn exec_stmt(frame: &mut Frame, stmt: &TStmt) -> Result<Option<ConcreteValue>, EvalError> {
    match stmt {
        TStmt::VarDecl { name, init, pos, .. } => {
            let v = eval_expr(frame, init, None)?;
            if let Some(trace) = &mut frame.trace {
                trace.push(TraceEntry {
                    line: pos.line,
                    what: format!("var {name}"),
                    value: v.clone(),
                });
            }
            frame.env.insert(name.clone(), v);
            Ok(None)
        }
        TStmt::Assign { name, value, pos, .. } => {
            let v = eval_expr(frame, value, None)?;
            if let Some(trace) = &mut frame.trace {
                trace.push(TraceEntry {
                    line: pos.line,
                    what: format!("{name} ="),
                    value: v.clone(),
                });
            }
            frame.env.insert(name.clone(), v);
            Ok(None)
        }
        TStmt::If {
            cond,
            then_branch,
            else_branch,
            ..
        } => {
            let c = eval_expr(frame, cond, None)?;
            match c {
                ConcreteValue::Bool(true) => exec_block(frame, then_branch),
                ConcreteValue::Bool(false) => exec_block(frame, else_branch),
                other => Err(EvalError::Internal(format!("non-bool condition {other}"))),
            }
        }
        TStmt::While { cond, body, .. } => {
            loop {
                let c = eval_expr(frame, cond, None)?;
                match c {
                    ConcreteValue::Bool(true) => {
                        if let Some(ret) = exec_block(frame, body)? {
                            return Ok(Some(ret));
                        }
                    }
                    ConcreteValue::Bool(false) => break,
                    other => {
                        return Err(EvalError::Internal(format!("non-bool guard {other}")))
                    }
                }
            }
            Ok(None)
        }
        TStmt::Return { value, pos } => {
            let v = eval_expr(frame, value, None)?;
            if let Some(trace) = &mut frame.trace {
                trace.push(TraceEntry {
                    line: pos.line,
                    what: format!("return from {}", frame.result_hint),
                    value: v.clone(),
                });
            }
            Ok(Some(v))
        }
    }
}

fn eval_expr(
    frame: &mut Frame,
    e: &TExpr,
    result: Option<&ConcreteValue>,
) -> Result<ConcreteValue, EvalError> {
    match &e.kind {
        TExprKind::FpLit(lit) => Ok(match lit.format() {
            crate::formula::FpFormat::Float64 => ConcreteValue::F64(lit.bits()),
            crate::formula::FpFormat::Float32 => ConcreteValue::F32(lit.bits() as u32),
        }),
        TExprKind::IntLit(v) => Ok(ConcreteValue::Int(*v)),
        TExprKind::BoolLit(b) => Ok(ConcreteValue::Bool(*b)),
        TExprKind::Var(name) => frame
            .env
            .get(name)
            .cloned()
            .ok_or_else(|| EvalError::Internal(format!("unbound variable {name}"))),
        TExprKind::Field(base, field) => {
            let b = eval_expr(frame, base, result)?;
            match b {
                ConcreteValue::Record(rec_name, fields) => {
                    let rec = frame
                        .program
                        .record(&rec_name)
                        .ok_or_else(|| EvalError::Internal(format!("no record {rec_name}")))?;
                    let idx = rec
                        .fields
                        .iter()
                        .position(|(n, _)| n == field)
                        .ok_or_else(|| EvalError::Internal(format!("no field {field}")))?;
                    Ok(fields[idx].clone())
                }
                other => Err(EvalError::Internal(format!("field access on {other}"))),
            }
        }
        TExprKind::Index(base, index) => {
            let b = eval_expr(frame, base, result)?;
            let i = eval_expr(frame, index, result)?;
            match (b, i) {
                (ConcreteValue::Array(vs), ConcreteValue::Int(i)) => {
                    if i < 0 || i as usize >= vs.len() {
                        Err(EvalError::IndexOutOfBounds {
                            index: i,
                            len: vs.len(),
                        })
                    } else {
                        Ok(vs[i as usize].clone())
                    }
                }
                _ => Err(EvalError::NonConstIndex),
            }
        }
        TExprKind::Unary(op, operand) => {
            let v = eval_expr(frame, operand, result)?;
            match (op, v) {
                (UnOp::Neg, ConcreteValue::F64(b)) => {
                    Ok(ConcreteValue::F64((-f64::from_bits(b)).to_bits()))
                }
                (UnOp::Neg, ConcreteValue::F32(b)) => {
                    Ok(ConcreteValue::F32((-f32::from_bits(b)).to_bits()))
                }
                (UnOp::Neg, ConcreteValue::Int(i)) => Ok(ConcreteValue::Int(i.wrapping_neg())),
                (UnOp::Not, ConcreteValue::Bool(b)) => Ok(ConcreteValue::Bool(!b)),
                (op, v) => Err(EvalError::Internal(format!("bad unary {op:?} on {v}"))),
            }
        }
        TExprKind::Binary(op, lhs, rhs) => {
            let l = eval_expr(frame, lhs, result)?;
            let r = eval_expr(frame, rhs, result)?;
            eval_binary(*op, l, r)
        }
        TExprKind::CallBuiltin(b, args) => {
            let a = eval_expr(frame, &args[0], result)?;
            let x = a
                .as_f64()
                .ok_or_else(|| EvalError::Internal("builtin on non-double".into()))?;
            let y = match b {
                Builtin::Sin => x.sin(),
                Builtin::Cos => x.cos(),
                Builtin::Atan => x.atan(),
                Builtin::Sqrt => x.sqrt(),
                Builtin::Abs => x.abs(),
            };
            Ok(ConcreteValue::f64(y))
        }
        TExprKind::CallMethod(name, args) => {
            let callee = frame
                .program
                .method(name)
                .ok_or_else(|| EvalError::Internal(format!("no method {name}")))?;
            let mut inputs = HashMap::new();
            for ((pname, _), arg) in callee.params.iter().zip(args) {
                let v = eval_expr(frame, arg, result)?;
                inputs.insert(pname.clone(), v);
            }
            eval_method(frame.program, callee, &inputs)
        }
        TExprKind::SpecPred(pred, args) => {
            let vals: Vec<ConcreteValue> = args
                .iter()
                .map(|a| eval_expr(frame, a, result))
                .collect::<Result<_, _>>()?;
            eval_spec_pred(pred, &vals)
        }
        TExprKind::NewRecord(name, args) => {
            let vals: Vec<ConcreteValue> = args
                .iter()
                .map(|a| eval_expr(frame, a, result))
                .collect::<Result<_, _>>()?;
            Ok(ConcreteValue::Record(name.clone(), vals))
        }
        TExprKind::NewArray(elems) => {
            let vals: Vec<ConcreteValue> = elems
                .iter()
                .map(|a| eval_expr(frame, a, result))
                .collect::<Result<_, _>>()?;
            Ok(ConcreteValue::Array(vals))
        }
        TExprKind::Result => result
            .cloned()
            .ok_or_else(|| EvalError::Internal("\\result outside ensures evaluation".into())),
        TExprKind::Forall { .. } => Err(EvalError::Internal(
            "quantifier survived unrolling".into(),
        )),
    }
}

fn eval_binary(op: BinOp, l: ConcreteValue, r: ConcreteValue) -> Result<ConcreteValue, EvalError> {
    use ConcreteValue::*;
    Ok(match (op, l, r) {
        (BinOp::Add, F64(a), F64(b)) => f64op(a, b, |x, y| x + y),
        (BinOp::Sub, F64(a), F64(b)) => f64op(a, b, |x, y| x - y),
        (BinOp::Mul, F64(a), F64(b)) => f64op(a, b, |x, y| x * y),
        (BinOp::Div, F64(a), F64(b)) => f64op(a, b, |x, y| x / y),
        (BinOp::Add, F32(a), F32(b)) => f32op(a, b, |x, y| x + y),
        (BinOp::Sub, F32(a), F32(b)) => f32op(a, b, |x, y| x - y),
        (BinOp::Mul, F32(a), F32(b)) => f32op(a, b, |x, y| x * y),
        (BinOp::Div, F32(a), F32(b)) => f32op(a, b, |x, y| x / y),
        (BinOp::Add, Int(a), Int(b)) => Int(a.wrapping_add(b)),
        (BinOp::Sub, Int(a), Int(b)) => Int(a.wrapping_sub(b)),
        (BinOp::Mul, Int(a), Int(b)) => Int(a.wrapping_mul(b)),
        (BinOp::Lt, F64(a), F64(b)) => Bool(f64::from_bits(a) < f64::from_bits(b)),
        (BinOp::Le, F64(a), F64(b)) => Bool(f64::from_bits(a) <= f64::from_bits(b)),
        (BinOp::Gt, F64(a), F64(b)) => Bool(f64::from_bits(a) > f64::from_bits(b)),
        (BinOp::Ge, F64(a), F64(b)) => Bool(f64::from_bits(a) >= f64::from_bits(b)),
        (BinOp::Eq, F64(a), F64(b)) => Bool(f64::from_bits(a) == f64::from_bits(b)),
        (BinOp::Ne, F64(a), F64(b)) => Bool(f64::from_bits(a) != f64::from_bits(b)),
        (BinOp::Lt, F32(a), F32(b)) => Bool(f32::from_bits(a) < f32::from_bits(b)),
        (BinOp::Le, F32(a), F32(b)) => Bool(f32::from_bits(a) <= f32::from_bits(b)),
        (BinOp::Gt, F32(a), F32(b)) => Bool(f32::from_bits(a) > f32::from_bits(b)),
        (BinOp::Ge, F32(a), F32(b)) => Bool(f32::from_bits(a) >= f32::from_bits(b)),
        (BinOp::Eq, F32(a), F32(b)) => Bool(f32::from_bits(a) == f32::from_bits(b)),
        (BinOp::Ne, F32(a), F32(b)) => Bool(f32::from_bits(a) != f32::from_bits(b)),
        (BinOp::Lt, Int(a), Int(b)) => Bool(a < b),
        (BinOp::Le, Int(a), Int(b)) => Bool(a <= b),
        (BinOp::Gt, Int(a), Int(b)) => Bool(a > b),
        (BinOp::Ge, Int(a), Int(b)) => Bool(a >= b),
        (BinOp::Eq, Int(a), Int(b)) => Bool(a == b),
        (BinOp::Ne, Int(a), Int(b)) => Bool(a != b),
        (BinOp::And, Bool(a), Bool(b)) => Bool(a && b),
        (BinOp::Or, Bool(a), Bool(b)) => Bool(a || b),
        (BinOp::Implies, Bool(a), Bool(b)) => Bool(!a || b),
        (op, l, r) => {
            return Err(EvalError::Internal(format!(
                "bad binary {op:?} on {l} and {r}"
            )))
        }
    })
}

fn f64op(a: u64, b: u64, f: impl Fn(f64, f64) -> f64) -> ConcreteValue {
    ConcreteValue::F64(f(f64::from_bits(a), f64::from_bits(b)).to_bits())
}

fn f32op(a: u32, b: u32, f: impl Fn(f32, f32) -> f32) -> ConcreteValue {
    ConcreteValue::F32(f(f32::from_bits(a), f32::from_bits(b)).to_bits())
}

fn eval_spec_pred(pred: &str, args: &[ConcreteValue]) -> Result<ConcreteValue, EvalError> {
    let as_f64 = |v: &ConcreteValue| -> Result<f64, EvalError> {
        match v {
            ConcreteValue::F64(b) => Ok(f64::from_bits(*b)),
            ConcreteValue::F32(b) => Ok(f32::from_bits(*b) as f64),
            other => Err(EvalError::Internal(format!("fp predicate on {other}"))),
        }
    };
    let b = match pred {
        "fp_nan" => as_f64(&args[0])?.is_nan(),
        "fp_infinite" => as_f64(&args[0])?.is_infinite(),
        "fp_nice" => {
            let x = as_f64(&args[0])?;
            !x.is_nan() && !x.is_infinite()
        }
        "fp_normal" => as_f64(&args[0])?.is_normal(),
        "fp_zero" => as_f64(&args[0])? == 0.0,
        "fp_bitEq" => match (&args[0], &args[1]) {
            (ConcreteValue::F64(a), ConcreteValue::F64(b)) => a == b,
            (ConcreteValue::F32(a), ConcreteValue::F32(b)) => a == b,
            _ => return Err(EvalError::Internal("fp_bitEq on mixed formats".into())),
        },
        other => return Err(EvalError::Internal(format!("unknown predicate {other}"))),
    };
    Ok(ConcreteValue::Bool(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minif::load_program;

    fn run(src: &str, method: &str, inputs: &[(&str, ConcreteValue)]) -> ConcreteValue {
        let p = load_program(src).unwrap();
        let m = p.method(method).unwrap();
        let inputs: HashMap<String, ConcreteValue> = inputs
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect();
        eval_method(&p, m, &inputs).unwrap()
    }

    #[test]
    fn overflow_rounds_to_infinity() {
        let v = run(
            "method f(x: double): double { return x * 10.0; }",
            "f",
            &[("x", ConcreteValue::f64(1e308))],
        );
        assert_eq!(v, ConcreteValue::f64(f64::INFINITY));
    }

    #[test]
    fn division_by_positive_zero_gives_infinity() {
        let v = run(
            "method f(): double { return 7.13 / 0.0; }",
            "f",
            &[],
        );
        assert_eq!(v, ConcreteValue::f64(f64::INFINITY));
    }

    #[test]
    fn infinity_minus_infinity_is_nan() {
        let v = run(
            "method f(x: double): double { return x - x; }",
            "f",
            &[("x", ConcreteValue::f64(f64::INFINITY))],
        );
        assert!(v.as_f64().unwrap().is_nan());
    }

    #[test]
    fn loops_execute_concretely() {
        let v = run(
            r#"method f(x0: double): double {
  var x: double = x0;
  var i: int = 0;
  /*@ loop_invariant 0.0 <= x; @*/
  while (i < 10) { x = x * 0.5; i = i + 1; }
  return x;
}"#,
            "f",
            &[("x0", ConcreteValue::f64(1.0))],
        );
        assert_eq!(v.as_f64().unwrap(), 1.0 / 1024.0);
    }

    #[test]
    fn subnormal_halving_hits_zero() {
        let v = run(
            "method f(x: double): double { return x * 0.5; }",
            "f",
            &[("x", ConcreteValue::F64(1))], // smallest subnormal
        );
        assert_eq!(v.as_f64().unwrap(), 0.0);
    }

    #[test]
    fn records_and_calls_evaluate() {
        let src = r#"record Complex { re: double, im: double }
method add(a: Complex, b: Complex): Complex {
  return new Complex(a.re + b.re, a.im + b.im);
}
method f(): double {
  var c: Complex = add(new Complex(1.5, 2.0), new Complex(0.25, -1.0));
  return c.re + c.im;
}"#;
        let v = run(src, "f", &[]);
        assert_eq!(v.as_f64().unwrap(), 1.75 + 1.0);
    }

    #[test]
    fn spec_clause_evaluation_handles_result() {
        let src = r#"/*@ requires true; ensures \result == \result; @*/
method f(x: double): double { return x; }"#;
        let p = load_program(src).unwrap();
        let m = p.method("f").unwrap();
        let ens = &m.contracts[0].ensures;
        let inputs = HashMap::new();
        let nan = ConcreteValue::f64(f64::NAN);
        let ok = eval_spec(&p, &inputs, Some(&nan), ens).unwrap();
        assert!(!ok, "NaN != NaN under IEEE equality");
    }
}
