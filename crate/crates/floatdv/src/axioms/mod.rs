//! Axiom packs for the library functions sin, cos, atan, and sqrt over
//! Float64. Each schema is a template over one bound variable `a` and can
//! be emitted either as a universally quantified assertion or as ground
//! instances at the applications occurring in a goal.
//!
//! The packs state special-value behavior and coarse range facts only;
//! there are deliberately no rules that expand a function into an
//! approximation of its value. The atan pack maps infinities to NaN,
//! which common libraries do not (they return ±pi/2); that schema is kept
//! as specified and excluded from host-library checks.

use crate::formula::{
    substitute, FpClass, FpCmpOp, ProofObligation, Sort, Term, UninterpretedFn,
};
use std::collections::HashMap;

/// The bound variable every template closes over.
pub const TEMPLATE_VAR: &str = "a";

#[derive(Debug, Clone)]
pub struct AxiomSchema {
    pub id: &'static str,
    pub symbol: UninterpretedFn,
    /// Closed except for `a: Float64`.
    pub template: Term,
    /// Plain-language statement, one-to-one with the catalog.
    pub statement: &'static str,
    /// Whether host math libraries are expected to satisfy the schema
    /// (the atan infinity rule is transcribed as specified even though
    /// libraries return +-pi/2 there).
    pub holds_for_host_library: bool,
}

#[derive(Debug, Clone)]
pub struct AxiomPack {
    pub symbol: UninterpretedFn,
    pub schemas: Vec<AxiomSchema>,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum AxiomError {
    #[error("no axiom pack for symbol `{0}`")]
    UnknownSymbol(String),
}

fn a() -> Term {
    Term::var(TEMPLATE_VAR, Sort::Float64)
}

fn app(f: UninterpretedFn) -> Term {
    Term::app(f, a()).expect("well-sorted")
}

fn not(t: Term) -> Term {
    Term::not(t).expect("well-sorted")
}

fn and(l: Term, r: Term) -> Term {
    Term::and(l, r).expect("well-sorted")
}

fn or(l: Term, r: Term) -> Term {
    Term::bool_op(crate::formula::BoolOp::Or, l, r).expect("well-sorted")
}

fn implies(l: Term, r: Term) -> Term {
    Term::implies(l, r).expect("well-sorted")
}

fn iff(l: Term, r: Term) -> Term {
    Term::bool_op(crate::formula::BoolOp::Iff, l, r).expect("well-sorted")
}

fn classify(c: FpClass, t: Term) -> Term {
    Term::classify(c, t).expect("well-sorted")
}

fn cmp(op: FpCmpOp, l: Term, r: Term) -> Term {
    Term::fp_cmp(op, l, r).expect("well-sorted")
}

fn lit(v: f64) -> Term {
    Term::lit_f64(v)
}

/// `arg is NaN or an infinity` as a term.
fn nan_or_inf(t: Term) -> Term {
    or(
        classify(FpClass::IsNan, t.clone()),
        classify(FpClass::IsInfinite, t),
    )
}

/// `not NaN and not infinity` as a term.
fn nice(t: Term) -> Term {
    and(
        not(classify(FpClass::IsNan, t.clone())),
        not(classify(FpClass::IsInfinite, t)),
    )
}

/// `result is a zero with the same sign as arg`.
fn same_signed_zero(f: UninterpretedFn) -> Term {
    and(
        classify(FpClass::IsZero, app(f)),
        iff(
            classify(FpClass::IsNegative, app(f)),
            classify(FpClass::IsNegative, a()),
        ),
    )
}

/// `lo <= f(a) <= hi` rendered as the fp.leq/fp.geq pair from the
/// quantified-axiom listing shape.
fn range_bound(f: UninterpretedFn, hi: f64) -> Term {
    and(
        cmp(FpCmpOp::Leq, app(f), lit(hi)),
        cmp(FpCmpOp::Geq, app(f), lit(-hi)),
    )
}

/// The axiom pack for one library function.
pub fn axiom_pack(symbol: UninterpretedFn) -> AxiomPack {
    use UninterpretedFn::*;
    let schemas = match symbol {
        SinF64 => vec![
            AxiomSchema {
                id: "sin.special-nan",
                symbol,
                template: implies(nan_or_inf(a()), classify(FpClass::IsNan, app(SinF64))),
                statement: "If arg is NaN or an infinity, then sin(arg) is NaN.",
                holds_for_host_library: true,
            },
            AxiomSchema {
                id: "sin.zero-sign",
                symbol,
                template: implies(
                    classify(FpClass::IsZero, a()),
                    same_signed_zero(SinF64),
                ),
                statement: "If arg is zero, then sin(arg) is a zero with the same sign as arg.",
                holds_for_host_library: true,
            },
            AxiomSchema {
                id: "sin.range",
                symbol,
                template: implies(nice(a()), range_bound(SinF64, 1.0)),
                statement:
                    "If arg is not NaN or infinity, then sin(arg) is between -1.0 and 1.0.",
                holds_for_host_library: true,
            },
            AxiomSchema {
                id: "sin.not-nan",
                symbol,
                template: implies(nice(a()), not(classify(FpClass::IsNan, app(SinF64)))),
                statement: "If arg is not NaN or infinity, then sin(arg) is not NaN.",
                holds_for_host_library: true,
            },
        ],
        CosF64 => vec![
            AxiomSchema {
                id: "cos.special-nan",
                symbol,
                template: implies(nan_or_inf(a()), classify(FpClass::IsNan, app(CosF64))),
                statement: "If arg is NaN or an infinity, then cos(arg) is NaN.",
                holds_for_host_library: true,
            },
            AxiomSchema {
                id: "cos.range",
                symbol,
                template: implies(nice(a()), range_bound(CosF64, 1.0)),
                statement:
                    "If arg is not NaN or infinity, then cos(arg) is between -1.0 and 1.0.",
                holds_for_host_library: true,
            },
            AxiomSchema {
                id: "cos.not-nan",
                symbol,
                template: implies(nice(a()), not(classify(FpClass::IsNan, app(CosF64)))),
                statement: "If arg is not NaN or infinity, then cos(arg) is not NaN.",
                holds_for_host_library: true,
            },
        ],
        AtanF64 => vec![
            AxiomSchema {
                id: "atan.special-nan",
                symbol,
                template: implies(nan_or_inf(a()), classify(FpClass::IsNan, app(AtanF64))),
                statement: "If arg is NaN or an infinity, then atan(arg) is NaN.",
                // Libraries return +-pi/2 at infinities; kept as specified.
                holds_for_host_library: false,
            },
            AxiomSchema {
                id: "atan.zero-sign",
                symbol,
                template: implies(
                    classify(FpClass::IsZero, a()),
                    same_signed_zero(AtanF64),
                ),
                statement:
                    "If arg is zero, then atan(arg) is a zero with the same sign as arg.",
                holds_for_host_library: true,
            },
            AxiomSchema {
                id: "atan.range",
                symbol,
                // The bound is the nearest double to pi/2, inclusive, so a
                // compliant library result can never exceed it.
                template: implies(
                    not(classify(FpClass::IsNan, a())),
                    range_bound(AtanF64, std::f64::consts::FRAC_PI_2),
                ),
                statement: "If arg is not NaN, then atan(arg) is between -pi/2 and pi/2.",
                holds_for_host_library: true,
            },
        ],
        SqrtF64 => vec![
            AxiomSchema {
                id: "sqrt.nan-neg",
                symbol,
                template: implies(
                    or(
                        classify(FpClass::IsNan, a()),
                        cmp(FpCmpOp::Lt, a(), lit(0.0)),
                    ),
                    classify(FpClass::IsNan, app(SqrtF64)),
                ),
                statement: "If arg is NaN or less than zero, then sqrt(arg) is NaN.",
                holds_for_host_library: true,
            },
            AxiomSchema {
                id: "sqrt.pos-inf",
                symbol,
                template: implies(
                    and(
                        classify(FpClass::IsInfinite, a()),
                        not(classify(FpClass::IsNegative, a())),
                    ),
                    and(
                        classify(FpClass::IsInfinite, app(SqrtF64)),
                        not(classify(FpClass::IsNegative, app(SqrtF64))),
                    ),
                ),
                statement:
                    "If arg is positive infinity, then sqrt(arg) is positive infinity.",
                holds_for_host_library: true,
            },
            AxiomSchema {
                id: "sqrt.zero-id",
                symbol,
                template: implies(
                    classify(FpClass::IsZero, a()),
                    Term::bit_eq(app(SqrtF64), a()).expect("well-sorted"),
                ),
                statement:
                    "If arg is positive zero or negative zero, then sqrt(arg) is the same as arg.",
                holds_for_host_library: true,
            },
            AxiomSchema {
                id: "sqrt.not-nan",
                symbol,
                template: implies(
                    and(
                        not(classify(FpClass::IsNan, a())),
                        cmp(FpCmpOp::Geq, a(), lit(0.0)),
                    ),
                    not(classify(FpClass::IsNan, app(SqrtF64))),
                ),
                statement:
                    "If arg is not NaN and greater or equal to zero, then sqrt(arg) is not NaN.",
                holds_for_host_library: true,
            },
            AxiomSchema {
                id: "sqrt.monotone-below",
                symbol,
                template: implies(
                    and(
                        not(classify(FpClass::IsInfinite, a())),
                        cmp(FpCmpOp::Gt, a(), lit(1.0)),
                    ),
                    cmp(FpCmpOp::Lt, app(SqrtF64), a()),
                ),
                statement:
                    "If arg is not infinity and is greater than one, then sqrt(arg) < arg.",
                holds_for_host_library: true,
            },
        ],
    };
    AxiomPack { symbol, schemas }
}

/// Pack lookup by surface name.
pub fn axiom_pack_by_name(name: &str) -> Result<AxiomPack, AxiomError> {
    let symbol = match name {
        "sin" => UninterpretedFn::SinF64,
        "cos" => UninterpretedFn::CosF64,
        "atan" => UninterpretedFn::AtanF64,
        "sqrt" => UninterpretedFn::SqrtF64,
        other => return Err(AxiomError::UnknownSymbol(other.to_string())),
    };
    Ok(axiom_pack(symbol))
}

/// All transcendental packs (sin, cos, atan); sqrt is separate because
/// its treatment is switchable.
pub fn transcendental_packs() -> Vec<AxiomPack> {
    vec![
        axiom_pack(UninterpretedFn::SinF64),
        axiom_pack(UninterpretedFn::CosF64),
        axiom_pack(UninterpretedFn::AtanF64),
    ]
}

/// Each schema wrapped as `forall a: Float64. template`.
pub fn quantified_axioms(pack: &AxiomPack) -> Vec<Term> {
    pack.schemas
        .iter()
        .map(|s| {
            Term::forall(
                vec![(TEMPLATE_VAR.to_string(), Sort::Float64)],
                s.template.clone(),
            )
            .expect("well-sorted")
        })
        .collect()
}

/// Ground instances: for every occurrence (f, t) and every schema of f's
/// pack, `template[a -> t]`. Syntactic duplicates are dropped. The output
/// is quantifier-free.
pub fn ground_instances(
    packs: &[AxiomPack],
    occurrences: &[crate::formula::Occurrence],
) -> Result<Vec<Term>, AxiomError> {
    let mut out: Vec<Term> = Vec::new();
    for occ in occurrences {
        let pack = packs
            .iter()
            .find(|p| p.symbol == occ.func)
            .ok_or_else(|| AxiomError::UnknownSymbol(occ.func.smt_name().to_string()))?;
        for schema in &pack.schemas {
            let mut binding = HashMap::new();
            binding.insert(TEMPLATE_VAR.to_string(), occ.arg.clone());
            let inst = substitute(&schema.template, &binding).expect("sort-preserving");
            if !out.contains(&inst) {
                out.push(inst);
            }
        }
    }
    Ok(out)
}

/// Occurrences relevant for axiom instantiation in an obligation.
pub fn collect_occurrences(po: &ProofObligation) -> Vec<crate::formula::Occurrence> {
    po.scan_occurrences()
}

/// Human-readable catalog (docs/axioms.md is generated from this).
pub fn catalog() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for pack in [
        axiom_pack(UninterpretedFn::SinF64),
        axiom_pack(UninterpretedFn::CosF64),
        axiom_pack(UninterpretedFn::AtanF64),
        axiom_pack(UninterpretedFn::SqrtF64),
    ] {
        for s in pack.schemas {
            out.push((s.id.to_string(), s.statement.to_string()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_sizes_match_the_catalog() {
        assert_eq!(axiom_pack(UninterpretedFn::SinF64).schemas.len(), 4);
        assert_eq!(axiom_pack(UninterpretedFn::CosF64).schemas.len(), 3);
        assert_eq!(axiom_pack(UninterpretedFn::AtanF64).schemas.len(), 3);
        assert_eq!(axiom_pack(UninterpretedFn::SqrtF64).schemas.len(), 5);
        // 10 transcendental schemas and 5 sqrt schemas in total
        let trans: usize = transcendental_packs()
            .iter()
            .map(|p| p.schemas.len())
            .sum();
        assert_eq!(trans, 10);
    }

    #[test]
    fn ground_instantiation_is_substitution() {
        let x = Term::var("x", Sort::Float64);
        let y = Term::var("y", Sort::Float64);
        let arg = Term::fp_arith(crate::formula::FpBinOp::Add, x, y).unwrap();
        let occ = crate::formula::Occurrence {
            func: UninterpretedFn::SinF64,
            arg: arg.clone(),
        };
        let packs = vec![axiom_pack(UninterpretedFn::SinF64)];
        let insts = ground_instances(&packs, &[occ]).unwrap();
        assert_eq!(insts.len(), 4);
        for (inst, schema) in insts.iter().zip(&packs[0].schemas) {
            let mut b = HashMap::new();
            b.insert(TEMPLATE_VAR.to_string(), arg.clone());
            assert_eq!(*inst, substitute(&schema.template, &b).unwrap());
            assert!(!inst.has_quantifier());
        }
    }

    #[test]
    fn no_occurrences_no_instances() {
        let packs = transcendental_packs();
        assert!(ground_instances(&packs, &[]).unwrap().is_empty());
    }

    #[test]
    fn quantified_forms_bind_the_template_variable() {
        let pack = axiom_pack(UninterpretedFn::SinF64);
        for q in quantified_axioms(&pack) {
            assert!(q.has_quantifier());
            assert!(q.free_vars().is_empty(), "axiom must be closed: {}", q.pretty());
        }
    }

    #[test]
    fn host_library_satisfies_every_checkable_axiom() {
        // 10k pseudo-random doubles, incl. specials, against the host
        // sin/cos/atan/sqrt. The atan infinity schema is excluded.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xF10A7);
        let mut values: Vec<f64> = vec![
            f64::NAN,
            f64::INFINITY,
            f64::NEG_INFINITY,
            0.0,
            -0.0,
            1.0,
            -1.0,
            f64::MIN_POSITIVE,
            f64::from_bits(1),
            f64::MAX,
        ];
        for _ in 0..10_000 {
            values.push(f64::from_bits(rng.gen::<u64>()));
        }
        for v in values {
            check_host(UninterpretedFn::SinF64, v, v.sin());
            check_host(UninterpretedFn::CosF64, v, v.cos());
            check_host(UninterpretedFn::AtanF64, v, v.atan());
            check_host(UninterpretedFn::SqrtF64, v, v.sqrt());
        }
    }

    fn check_host(f: UninterpretedFn, arg: f64, result: f64) {
        for schema in axiom_pack(f).schemas {
            if !schema.holds_for_host_library {
                continue;
            }
            assert!(
                eval_template(&schema.template, arg, result),
                "{} violated at arg={arg:?} result={result:?}",
                schema.id
            );
        }
    }

    /// Tiny evaluator for templates: `a` maps to arg, `f(a)` to result.
    fn eval_template(t: &Term, arg: f64, result: f64) -> bool {
        match eval_t(t, arg, result) {
            V::B(b) => b,
            _ => panic!("template is not boolean"),
        }
    }

    enum V {
        B(bool),
        F(f64),
    }

    fn eval_t(t: &Term, arg: f64, result: f64) -> V {
        use crate::formula::BoolOp;
        match t {
            Term::Var(n, _) if n == TEMPLATE_VAR => V::F(arg),
            Term::App { .. } => V::F(result),
            Term::FpLit(l) => V::F(l.to_f64()),
            Term::Classify { class, arg: a } => {
                let V::F(x) = eval_t(a, arg, result) else {
                    panic!()
                };
                V::B(match class {
                    FpClass::IsNan => x.is_nan(),
                    FpClass::IsInfinite => x.is_infinite(),
                    FpClass::IsNormal => x.is_normal(),
                    FpClass::IsZero => x == 0.0 && !x.is_nan() && x.abs() == 0.0,
                    FpClass::IsNegative => x.is_sign_negative() && !x.is_nan(),
                })
            }
            Term::FpCmp { op, lhs, rhs } => {
                let (V::F(a1), V::F(a2)) = (eval_t(lhs, arg, result), eval_t(rhs, arg, result))
                else {
                    panic!()
                };
                V::B(match op {
                    FpCmpOp::Leq => a1 <= a2,
                    FpCmpOp::Lt => a1 < a2,
                    FpCmpOp::Geq => a1 >= a2,
                    FpCmpOp::Gt => a1 > a2,
                    FpCmpOp::Eq => a1 == a2,
                })
            }
            Term::BitEq(lhs, rhs) => {
                let (V::F(a1), V::F(a2)) = (eval_t(lhs, arg, result), eval_t(rhs, arg, result))
                else {
                    panic!()
                };
                V::B(a1.to_bits() == a2.to_bits())
            }
            Term::Not(x) => {
                let V::B(b) = eval_t(x, arg, result) else { panic!() };
                V::B(!b)
            }
            Term::Bool { op, lhs, rhs } => {
                let (V::B(b1), V::B(b2)) = (eval_t(lhs, arg, result), eval_t(rhs, arg, result))
                else {
                    panic!()
                };
                V::B(match op {
                    BoolOp::And => b1 && b2,
                    BoolOp::Or => b1 || b2,
                    BoolOp::Implies => !b1 || b2,
                    BoolOp::Iff => b1 == b2,
                })
            }
            other => panic!("unexpected node in template: {other:?}"),
        }
    }
}
