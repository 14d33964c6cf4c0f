//! Counterexample replay: rebuild method inputs from a model, execute
//! concretely, and classify the result.
//!
//! A violation observed under the host library is a real violation, so
//! replay Confirms even for transcendental methods. When the
//! postcondition holds concretely, the verdict depends on whether the
//! goal involved axiomatized symbols: a model for those picks function
//! values a real library may not produce, so the replay is Inconclusive
//! rather than Spurious.

use super::model::{Model, ModelValue};
use crate::interp::{eval_method, eval_spec, ConcreteValue, EvalError};
use crate::minif::ast::FpScalar;
use crate::minif::{MfType, TypedProgram};
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq)]
pub enum ReplayOutcome {
    /// Precondition holds and postcondition fails: genuine counterexample.
    Confirmed,
    /// Precondition holds and postcondition holds on an axiom-free path:
    /// the model cannot be realized by any execution.
    Spurious,
    /// The goal involves axiomatized library functions whose model values
    /// the host library need not reproduce. Carries whether the host run
    /// violated the contract.
    Inconclusive { host_violation: bool },
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum ReplayError {
    #[error("no method/contract {0}#{1}")]
    NoSuchContract(String, usize),
    #[error("model does not assign input slot `{0}`")]
    MissingInput(String),
    #[error("model assigns `{slot}` a value of the wrong kind")]
    WrongKind { slot: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Replay `model` against (method, 1-based contract index).
/// `axiomatized_involved` says whether the discharged goal carried any
/// axiomatized (uninterpreted) library symbols.
pub fn replay(
    program: &TypedProgram,
    method_name: &str,
    contract_index: usize,
    model: &Model,
    axiomatized_involved: bool,
) -> Result<ReplayOutcome, ReplayError> {
    let method = program
        .method(method_name)
        .ok_or_else(|| ReplayError::NoSuchContract(method_name.into(), contract_index))?;
    let contract = method
        .contracts
        .get(contract_index.wrapping_sub(1))
        .ok_or_else(|| ReplayError::NoSuchContract(method_name.into(), contract_index))?;

    let mut inputs: HashMap<String, ConcreteValue> = HashMap::new();
    for (pname, pty) in &method.params {
        inputs.insert(pname.clone(), value_from_model(program, model, pname, pty)?);
    }

    let pre_holds = eval_spec(program, &inputs, None, &contract.requires)?;
    if !pre_holds {
        // The solver's model satisfied the emitted hypotheses, so a
        // failing precondition here means the model constrains havoc
        // symbols rather than a reachable start state.
        return Ok(if axiomatized_involved {
            ReplayOutcome::Inconclusive {
                host_violation: false,
            }
        } else {
            ReplayOutcome::Spurious
        });
    }
    let result = eval_method(program, method, &inputs)?;
    let post_holds = eval_spec(program, &inputs, Some(&result), &contract.ensures)?;

    Ok(if !post_holds {
        ReplayOutcome::Confirmed
    } else if axiomatized_involved {
        ReplayOutcome::Inconclusive {
            host_violation: false,
        }
    } else {
        ReplayOutcome::Spurious
    })
}

fn value_from_model(
    program: &TypedProgram,
    model: &Model,
    path: &str,
    ty: &MfType,
) -> Result<ConcreteValue, ReplayError> {
    match ty {
        MfType::Double => scalar_fp(model, path, false),
        MfType::Float => scalar_fp(model, path, true),
        MfType::Bool => match model.assignments.get(path) {
            Some(ModelValue::Bool(b)) => Ok(ConcreteValue::Bool(*b)),
            Some(_) => Err(ReplayError::WrongKind { slot: path.into() }),
            None => Err(ReplayError::MissingInput(path.into())),
        },
        MfType::Int => match model.assignments.get(path) {
            Some(ModelValue::Int(i)) => Ok(ConcreteValue::Int(*i)),
            Some(_) => Err(ReplayError::WrongKind { slot: path.into() }),
            None => Err(ReplayError::MissingInput(path.into())),
        },
        MfType::Record(rec_name) => {
            let rec = program
                .record(rec_name)
                .ok_or_else(|| ReplayError::MissingInput(path.into()))?;
            let mut fields = Vec::new();
            for (fname, scalar) in &rec.fields {
                let slot = format!("{path}.{fname}");
                fields.push(scalar_fp(model, &slot, *scalar == FpScalar::Float)?);
            }
            Ok(ConcreteValue::Record(rec_name.clone(), fields))
        }
        MfType::Array(n) => {
            let mut elems = Vec::new();
            for i in 0..*n {
                let slot = format!("{path}[{i}]");
                elems.push(scalar_fp(model, &slot, false)?);
            }
            Ok(ConcreteValue::Array(elems))
        }
    }
}

fn scalar_fp(model: &Model, slot: &str, single: bool) -> Result<ConcreteValue, ReplayError> {
    match model.assignments.get(slot) {
        Some(ModelValue::Fp(lit)) => Ok(if single {
            ConcreteValue::F32(lit.bits() as u32)
        } else {
            ConcreteValue::F64(lit.bits())
        }),
        Some(_) => Err(ReplayError::WrongKind { slot: slot.into() }),
        None => Err(ReplayError::MissingInput(slot.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{FpFormat, FpLiteral};
    use crate::minif::load_program;

    fn model_with(entries: &[(&str, ModelValue)]) -> Model {
        let mut m = Model::default();
        for (k, v) in entries {
            m.assignments.insert(k.to_string(), v.clone());
        }
        m
    }

    #[test]
    fn nan_model_confirms_reflexive_equality_violation() {
        let src = r#"/*@ requires true; ensures \result == x; @*/
method f(x: double): double { return x; }"#;
        let p = load_program(src).unwrap();
        let m = model_with(&[(
            "x",
            ModelValue::Fp(FpLiteral::nan(FpFormat::Float64)),
        )]);
        let out = replay(&p, "f", 1, &m, false).unwrap();
        assert_eq!(out, ReplayOutcome::Confirmed);
    }

    #[test]
    fn satisfying_model_on_arith_goal_is_spurious() {
        let src = r#"/*@ requires true; ensures \result == x; @*/
method f(x: double): double { return x; }"#;
        let p = load_program(src).unwrap();
        let m = model_with(&[(
            "x",
            ModelValue::Fp(FpLiteral::from_f64(1.5)),
        )]);
        let out = replay(&p, "f", 1, &m, false).unwrap();
        assert_eq!(out, ReplayOutcome::Spurious);
    }

    #[test]
    fn transcendental_goal_with_passing_replay_is_inconclusive() {
        let src = r#"/*@ requires fp_nice(x); ensures !fp_nan(\result); @*/
method f(x: double): double { return sin(x); }"#;
        let p = load_program(src).unwrap();
        let m = model_with(&[(
            "x",
            ModelValue::Fp(FpLiteral::from_f64(0.5)),
        )]);
        let out = replay(&p, "f", 1, &m, true).unwrap();
        assert!(matches!(out, ReplayOutcome::Inconclusive { .. }));
    }

    #[test]
    fn record_inputs_are_rebuilt_from_slots() {
        let src = r#"record Complex { re: double, im: double }
/*@ requires fp_nice(a.re) && fp_nice(a.im); ensures !fp_infinite(\result); @*/
method f(a: Complex): double { return a.re + a.im; }"#;
        let p = load_program(src).unwrap();
        let m = model_with(&[
            ("a.re", ModelValue::Fp(FpLiteral::from_f64(f64::MAX))),
            ("a.im", ModelValue::Fp(FpLiteral::from_f64(f64::MAX))),
        ]);
        let out = replay(&p, "f", 1, &m, false).unwrap();
        assert_eq!(out, ReplayOutcome::Confirmed);
    }

    #[test]
    fn missing_slot_is_an_error() {
        let src = r#"/*@ requires true; ensures true; @*/
method f(x: double): double { return x; }"#;
        let p = load_program(src).unwrap();
        let out = replay(&p, "f", 1, &Model::default(), false);
        assert!(matches!(out, Err(ReplayError::MissingInput(_))));
    }
}
