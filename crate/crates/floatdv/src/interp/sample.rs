//! Precondition-directed random input generation and contract
//! falsification. Sampling is rejection-based: literal range bounds found
//! in the precondition shape the proposal distribution, FP specials are
//! injected at a fixed rate, and candidates that fail the precondition
//! are discarded. Deterministic per seed; trials are independent and
//! merge by trial index.

use super::eval::{eval_method, eval_spec, EvalError};
use super::value::ConcreteValue;
use crate::minif::ast::BinOp;
use crate::minif::{MfType, TExpr, TExprKind, TypedContract, TypedMethod, TypedProgram};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Proportion of proposals that are FP special values.
const SPECIAL_RATE: f64 = 0.05;
/// Proposals per trial before sampling gives up.
const MAX_PROPOSALS_PER_TRIAL: usize = 1000;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum SampleError {
    #[error("gave up sampling: no precondition-satisfying input in {0} proposals")]
    GiveUp(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A found counterexample: inputs satisfying the precondition whose run
/// violates the postcondition.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub trial: usize,
    pub inputs: HashMap<String, ConcreteValue>,
    pub result: ConcreteValue,
}

/// Draw `n` precondition-satisfying input maps. Each trial index draws
/// from its own deterministic stream, so results do not depend on
/// scheduling.
pub fn random_inputs(
    program: &TypedProgram,
    method: &TypedMethod,
    pre: &TExpr,
    n: usize,
    seed: u64,
) -> Result<Vec<HashMap<String, ConcreteValue>>, SampleError> {
    let ranges = extract_ranges(pre);
    (0..n)
        .map(|trial| sample_one(program, method, pre, &ranges, seed, trial))
        .collect()
}

fn sample_one(
    program: &TypedProgram,
    method: &TypedMethod,
    pre: &TExpr,
    ranges: &HashMap<String, (f64, f64)>,
    seed: u64,
    trial: usize,
) -> Result<HashMap<String, ConcreteValue>, SampleError> {
    let mut rng = trial_rng(seed, trial);
    for _ in 0..MAX_PROPOSALS_PER_TRIAL {
        let candidate = propose(program, method, ranges, &mut rng);
        if eval_spec(program, &candidate, None, pre)? {
            return Ok(candidate);
        }
    }
    Err(SampleError::GiveUp(MAX_PROPOSALS_PER_TRIAL))
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn propose(
    program: &TypedProgram,
    method: &TypedMethod,
    ranges: &HashMap<String, (f64, f64)>,
    rng: &mut ChaCha8Rng,
) -> HashMap<String, ConcreteValue> {
    let mut out = HashMap::new();
    for (name, ty) in &method.params {
        out.insert(name.clone(), propose_value(program, name, ty, ranges, rng));
    }
    out
}

fn propose_value(
    program: &TypedProgram,
    path: &str,
    ty: &MfType,
    ranges: &HashMap<String, (f64, f64)>,
    rng: &mut ChaCha8Rng,
) -> ConcreteValue {
    match ty {
        MfType::Double => ConcreteValue::F64(propose_f64(path, ranges, rng).to_bits()),
        MfType::Float => {
            ConcreteValue::F32((propose_f64(path, ranges, rng) as f32).to_bits())
        }
        MfType::Bool => ConcreteValue::Bool(rng.gen()),
        MfType::Int => ConcreteValue::Int(rng.gen_range(-100..=100)),
        MfType::Record(name) => {
            // Field slots are addressed as `param.field`.
            let fields = match program.record(name) {
                Some(rec) => rec
                    .fields
                    .iter()
                    .map(|(fname, scalar)| {
                        let slot = format!("{path}.{fname}");
                        match scalar {
                            crate::minif::ast::FpScalar::Double => {
                                ConcreteValue::F64(propose_f64(&slot, ranges, rng).to_bits())
                            }
                            crate::minif::ast::FpScalar::Float => ConcreteValue::F32(
                                (propose_f64(&slot, ranges, rng) as f32).to_bits(),
                            ),
                        }
                    })
                    .collect(),
                None => Vec::new(),
            };
            ConcreteValue::Record(name.clone(), fields)
        }
        MfType::Array(n) => {
            let elems = (0..*n)
                .map(|i| {
                    let slot = format!("{path}[{i}]");
                    ConcreteValue::F64(propose_f64(&slot, ranges, rng).to_bits())
                })
                .collect();
            ConcreteValue::Array(elems)
        }
    }
}

fn propose_f64(path: &str, ranges: &HashMap<String, (f64, f64)>, rng: &mut ChaCha8Rng) -> f64 {
    let roll: f64 = rng.gen();
    if roll < SPECIAL_RATE {
        let specials = [
            f64::NAN,
            f64::INFINITY,
            f64::NEG_INFINITY,
            0.0,
            -0.0,
            f64::MIN_POSITIVE, // smallest normal
            f64::from_bits(1), // smallest subnormal
            f64::MAX,
            f64::MIN,
        ];
        return specials[rng.gen_range(0..specials.len())];
    }
    match ranges.get(path) {
        Some((lo, hi)) if lo.is_finite() && hi.is_finite() && lo < hi => {
            if roll < SPECIAL_RATE + 0.10 {
                // occasionally aim at the endpoints where rounding bites
                if rng.gen() {
                    *lo
                } else {
                    *hi
                }
            } else {
                rng.gen_range(*lo..=*hi)
            }
        }
        _ => {
            if roll < 0.30 {
                // uniform over bit patterns covers subnormals and extremes
                f64::from_bits(rng.gen())
            } else {
                rng.gen_range(-1.0e6..=1.0e6)
            }
        }
    }
}

/// Literal bounds on scalar slots mentioned in the precondition, used to
/// guide proposals. `x`, `a.re`, and `vec[0]` style paths are recognized.
fn extract_ranges(pre: &TExpr) -> HashMap<String, (f64, f64)> {
    let mut out: HashMap<String, (f64, f64)> = HashMap::new();
    walk_conjuncts(pre, &mut |conj| {
        let TExprKind::Binary(op, l, r) = &conj.kind else {
            return;
        };
        let (path, lo, hi) = match (slot_path(l), fp_const(r), fp_const(l), slot_path(r)) {
            // path OP lit
            (Some(p), Some(c), _, _) => match op {
                BinOp::Lt | BinOp::Le => (p, f64::NEG_INFINITY, c),
                BinOp::Gt | BinOp::Ge => (p, c, f64::INFINITY),
                _ => return,
            },
            // lit OP path
            (_, _, Some(c), Some(p)) => match op {
                BinOp::Lt | BinOp::Le => (p, c, f64::INFINITY),
                BinOp::Gt | BinOp::Ge => (p, f64::NEG_INFINITY, c),
                _ => return,
            },
            _ => return,
        };
        let entry = out
            .entry(path)
            .or_insert((f64::NEG_INFINITY, f64::INFINITY));
        entry.0 = entry.0.max(lo);
        entry.1 = entry.1.min(hi);
    });
    out
}

fn walk_conjuncts(e: &TExpr, f: &mut impl FnMut(&TExpr)) {
    if let TExprKind::Binary(BinOp::And, l, r) = &e.kind {
        walk_conjuncts(l, f);
        walk_conjuncts(r, f);
    } else {
        f(e);
    }
}

fn slot_path(e: &TExpr) -> Option<String> {
    match &e.kind {
        TExprKind::Var(n) => Some(n.clone()),
        TExprKind::Field(base, field) => Some(format!("{}.{field}", slot_path(base)?)),
        TExprKind::Index(base, idx) => match &idx.kind {
            TExprKind::IntLit(i) => Some(format!("{}[{i}]", slot_path(base)?)),
            _ => None,
        },
        _ => None,
    }
}

fn fp_const(e: &TExpr) -> Option<f64> {
    match &e.kind {
        TExprKind::FpLit(l) => Some(l.to_f64()),
        TExprKind::Unary(crate::minif::ast::UnOp::Neg, inner) => fp_const(inner).map(|v| -v),
        _ => None,
    }
}

/// Search for an input that satisfies `requires` but violates `ensures`.
/// Returns the counterexample with the smallest trial index, or `None`.
pub fn falsify(
    program: &TypedProgram,
    method: &TypedMethod,
    contract: &TypedContract,
    trials: usize,
    seed: u64,
) -> Result<Option<Counterexample>, SampleError> {
    let ranges = extract_ranges(&contract.requires);

    let run_trial = |trial: usize| -> Result<Option<Counterexample>, SampleError> {
        let inputs = sample_one(program, method, &contract.requires, &ranges, seed, trial)?;
        let result = eval_method(program, method, &inputs)?;
        let holds = eval_spec(program, &inputs, Some(&result), &contract.ensures)?;
        Ok(if holds {
            None
        } else {
            Some(Counterexample {
                trial,
                inputs,
                result,
            })
        })
    };

    #[cfg(feature = "parallel")]
    {
        // find_first preserves the lowest-index hit, matching the
        // sequential result exactly.
        let found = (0..trials)
            .into_par_iter()
            .map(run_trial)
            .find_first(|r| !matches!(r, Ok(None)));
        match found {
            None => Ok(None),
            Some(r) => r,
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        for trial in 0..trials {
            if let Some(ce) = run_trial(trial)? {
                return Ok(Some(ce));
            }
        }
        Ok(None)
    }
}

/// Sequential variant used by the benchmark suite for comparison and by
/// callers that need to stay off the global thread pool.
pub fn falsify_sequential(
    program: &TypedProgram,
    method: &TypedMethod,
    contract: &TypedContract,
    trials: usize,
    seed: u64,
) -> Result<Option<Counterexample>, SampleError> {
    let ranges = extract_ranges(&contract.requires);
    for trial in 0..trials {
        let inputs = sample_one(program, method, &contract.requires, &ranges, seed, trial)?;
        let result = eval_method(program, method, &inputs)?;
        let holds = eval_spec(program, &inputs, Some(&result), &contract.ensures)?;
        if !holds {
            return Ok(Some(Counterexample {
                trial,
                inputs,
                result,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minif::load_program;

    #[test]
    fn bounded_precondition_keeps_samples_inside() {
        let src = r#"/*@ requires 1.0 < v && v < 12.0; ensures true; @*/
method f(v: double): double { return v; }"#;
        let p = load_program(src).unwrap();
        let m = p.method("f").unwrap();
        let samples = random_inputs(&p, m, &m.contracts[0].requires, 100, 7).unwrap();
        assert_eq!(samples.len(), 100);
        for s in samples {
            let v = s["v"].as_f64().unwrap();
            assert!(v > 1.0 && v < 12.0, "sample {v} escaped the range");
        }
    }

    #[test]
    fn false_precondition_gives_up() {
        let src = r#"/*@ requires false; ensures true; @*/
method f(v: double): double { return v; }"#;
        let p = load_program(src).unwrap();
        let m = p.method("f").unwrap();
        let err = random_inputs(&p, m, &m.contracts[0].requires, 1, 7).unwrap_err();
        assert!(matches!(err, SampleError::GiveUp(_)));
    }

    #[test]
    fn nice_precondition_excludes_specials() {
        let src = r#"/*@ requires fp_nice(x); ensures true; @*/
method f(x: double): double { return x; }"#;
        let p = load_program(src).unwrap();
        let m = p.method("f").unwrap();
        let samples = random_inputs(&p, m, &m.contracts[0].requires, 200, 3).unwrap();
        for s in samples {
            let v = s["x"].as_f64().unwrap();
            assert!(!v.is_nan() && !v.is_infinite());
        }
    }

    #[test]
    fn nan_input_falsifies_reflexive_equality() {
        let src = r#"/*@ requires true; ensures \result == \result; @*/
method f(x: double): double { return x; }"#;
        let p = load_program(src).unwrap();
        let m = p.method("f").unwrap();
        let ce = falsify(&p, m, &m.contracts[0], 10_000, 1)
            .unwrap()
            .expect("NaN should be found");
        assert!(ce.inputs["x"].as_f64().unwrap().is_nan());
    }

    #[test]
    fn identical_seed_gives_identical_outcome() {
        let src = r#"/*@ requires true; ensures !fp_infinite(\result); @*/
method f(x: double, y: double): double { return x * y; }"#;
        let p = load_program(src).unwrap();
        let m = p.method("f").unwrap();
        let a = falsify(&p, m, &m.contracts[0], 500, 42).unwrap();
        let b = falsify_sequential(&p, m, &m.contracts[0], 500, 42).unwrap();
        match (a, b) {
            (Some(x), Some(y)) => {
                assert_eq!(x.trial, y.trial);
                assert_eq!(x.inputs, y.inputs);
            }
            (None, None) => {}
            other => panic!("parallel and sequential disagree: {other:?}"),
        }
    }
}
