//! Verification-condition generation: inline user calls, compute weakest
//! preconditions per ensures conjunct, and apply the loop-invariant rule.

mod inline;
mod wp;

pub use inline::{inline_calls, is_call_free, InlineError};
pub use wp::{encode, slots_of, symbolic_value, Encoded, LoopPremise, WpError};

use crate::formula::{ProofObligation, Provenance, Term};
use crate::minif::ast::BinOp;
use crate::minif::{TExpr, TExprKind, TypedMethod, TypedProgram};

#[derive(Debug, Clone)]
pub struct VcOptions {
    pub inline_depth: usize,
    /// One obligation per ensures conjunct and per loop-rule premise.
    pub split_goals: bool,
}

impl Default for VcOptions {
    fn default() -> Self {
        VcOptions {
            inline_depth: 8,
            split_goals: true,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum VcError {
    #[error("no method named `{0}`")]
    NoSuchMethod(String),
    #[error("method `{method}` has no contract #{index}")]
    NoSuchContract { method: String, index: usize },
    #[error(transparent)]
    Inline(#[from] InlineError),
    #[error(transparent)]
    Wp(#[from] WpError),
}

/// Generate the proof obligations for (method, 1-based contract index).
pub fn generate_obligations(
    program: &TypedProgram,
    method_name: &str,
    contract_index: usize,
    opts: &VcOptions,
) -> Result<Vec<ProofObligation>, VcError> {
    let method = program
        .method(method_name)
        .ok_or_else(|| VcError::NoSuchMethod(method_name.to_string()))?;
    if contract_index == 0 || contract_index > method.contracts.len() {
        return Err(VcError::NoSuchContract {
            method: method_name.to_string(),
            index: contract_index,
        });
    }
    let contract = &method.contracts[contract_index - 1];
    let inlined = inline_calls(program, method, opts.inline_depth)?;

    // Hypotheses: the requires clause, split on top-level conjunction.
    let hypotheses: Vec<Term> = split_conjuncts(&contract.requires)
        .into_iter()
        .map(|c| {
            wp::encode(program, c, &method.return_type)
                .and_then(|e| e.scalar().map_err(Into::into))
        })
        .collect::<Result<_, WpError>>()?;

    let ensures_parts: Vec<&TExpr> = if opts.split_goals {
        split_conjuncts(&contract.ensures)
    } else {
        vec![&contract.ensures]
    };

    let mut obligations = Vec::new();
    let mut seen_premises: Vec<(usize, &'static str, String)> = Vec::new();

    for (k, part) in ensures_parts.iter().enumerate() {
        let post = wp::encode(program, part, &method.return_type)?.scalar()?;
        let outcome = wp::wp_block(program, &inlined.body, post, &method.return_type)?;

        let goal_name = format!(
            "{method_name}.c{contract_index}.g{}",
            k + 1
        );
        obligations.push(ProofObligation::new(
            goal_name,
            hypotheses.clone(),
            outcome.formula,
            Provenance {
                method: method_name.to_string(),
                contract_index,
                path: format!("ensures#{}", k + 1),
            },
        ));

        for premise in outcome.premises {
            // The preserve premise does not depend on the postcondition;
            // generating per conjunct would duplicate it.
            let key = (premise.loop_index, premise.kind, premise.goal.pretty());
            if seen_premises.contains(&key) {
                continue;
            }
            seen_premises.push(key);
            let mut hyps = hypotheses.clone();
            hyps.extend(premise.hypotheses.clone());
            let name = match premise.kind {
                "use" => format!(
                    "{method_name}.c{contract_index}.loop{}.use.g{}",
                    premise.loop_index,
                    k + 1
                ),
                _ => format!(
                    "{method_name}.c{contract_index}.loop{}.{}",
                    premise.loop_index, premise.kind
                ),
            };
            obligations.push(ProofObligation::new(
                name,
                hyps,
                premise.goal,
                Provenance {
                    method: method_name.to_string(),
                    contract_index,
                    path: format!("loop#{} {}", premise.loop_index, premise.kind),
                },
            ));
        }
    }

    Ok(obligations)
}

/// Obligations for every contract of every method, in source order.
pub fn generate_all(
    program: &TypedProgram,
    opts: &VcOptions,
) -> Result<Vec<ProofObligation>, VcError> {
    let mut out = Vec::new();
    for m in &program.methods {
        for idx in 1..=m.contracts.len() {
            out.extend(generate_obligations(program, &m.name, idx, opts)?);
        }
    }
    Ok(out)
}

fn split_conjuncts(e: &TExpr) -> Vec<&TExpr> {
    let mut out = Vec::new();
    fn go<'a>(e: &'a TExpr, out: &mut Vec<&'a TExpr>) {
        if let TExprKind::Binary(BinOp::And, l, r) = &e.kind {
            go(l, out);
            go(r, out);
        } else {
            out.push(e);
        }
    }
    go(e, &mut out);
    out
}

/// Resolve a method reference for replay: the typed method plus contract.
pub fn lookup_contract<'p>(
    program: &'p TypedProgram,
    method: &str,
    contract_index: usize,
) -> Option<(&'p TypedMethod, &'p crate::minif::TypedContract)> {
    let m = program.method(method)?;
    let c = m.contracts.get(contract_index.checked_sub(1)?)?;
    Some((m, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{FpCmpOp, Sort};
    use crate::minif::load_program;

    #[test]
    fn reflexive_equality_goal_is_ieee_eq() {
        // return x; ensures \result == x  -> goal fp.eq(x, x)
        let src = r#"/*@ requires true; ensures \result == x; @*/
method f(x: double): double { return x; }"#;
        let p = load_program(src).unwrap();
        let obs = generate_obligations(&p, "f", 1, &VcOptions::default()).unwrap();
        assert_eq!(obs.len(), 1);
        let expect = Term::fp_cmp(
            FpCmpOp::Eq,
            Term::var("x", Sort::Float64),
            Term::var("x", Sort::Float64),
        )
        .unwrap();
        assert_eq!(obs[0].goal, expect);
    }

    #[test]
    fn ensures_conjuncts_split_into_goals() {
        let src = r#"/*@ requires true; ensures !fp_nan(\result) && !fp_infinite(\result); @*/
method f(x: double): double { return x + 1.0; }"#;
        let p = load_program(src).unwrap();
        let obs = generate_obligations(&p, "f", 1, &VcOptions::default()).unwrap();
        assert_eq!(obs.len(), 2);
        assert_eq!(obs[0].provenance.path, "ensures#1");
        assert_eq!(obs[1].provenance.path, "ensures#2");
    }

    #[test]
    fn unsplit_mode_keeps_one_goal() {
        let src = r#"/*@ requires true; ensures !fp_nan(\result) && !fp_infinite(\result); @*/
method f(x: double): double { return x + 1.0; }"#;
        let p = load_program(src).unwrap();
        let opts = VcOptions {
            split_goals: false,
            ..Default::default()
        };
        let obs = generate_obligations(&p, "f", 1, &opts).unwrap();
        assert_eq!(obs.len(), 1);
    }

    #[test]
    fn loop_contract_produces_init_preserve_use() {
        let src = r#"/*@ requires true; ensures \result > 0.5; @*/
method fploop(): double {
  var x: double = 1.0;
  var i: int = 0;
  /*@ loop_invariant 1.0 <= x && x <= 1.0E300; @*/
  while (i < 10) { x = x + 1.0; i = i + 1; }
  return x;
}"#;
        let p = load_program(src).unwrap();
        let obs = generate_obligations(&p, "fploop", 1, &VcOptions::default()).unwrap();
        let paths: Vec<&str> = obs.iter().map(|o| o.provenance.path.as_str()).collect();
        assert_eq!(
            paths,
            vec!["ensures#1", "loop#1 preserve", "loop#1 use"],
            "{paths:?}"
        );
    }

    #[test]
    fn occurrences_are_collected_from_goals() {
        let src = r#"/*@ requires fp_nice(x); ensures !fp_nan(\result); @*/
method f(x: double): double { return sin(cos(x)); }"#;
        let p = load_program(src).unwrap();
        let obs = generate_obligations(&p, "f", 1, &VcOptions::default()).unwrap();
        assert_eq!(obs[0].occurrences.len(), 2);
    }

    #[test]
    fn missing_contract_is_an_error() {
        let p = load_program("method f(): double { return 1.0; }").unwrap();
        let err = generate_obligations(&p, "f", 1, &VcOptions::default()).unwrap_err();
        assert!(matches!(err, VcError::NoSuchContract { .. }));
        let err2 = generate_obligations(&p, "g", 1, &VcOptions::default()).unwrap_err();
        assert!(matches!(err2, VcError::NoSuchMethod(_)));
    }
}
