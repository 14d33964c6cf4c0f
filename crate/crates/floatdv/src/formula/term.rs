//! The term language: FP arithmetic under explicit rounding modes,
//! classifications, two equalities, quantifiers, and uninterpreted
//! applications for library functions.

use super::literal::{FpFormat, FpLiteral};
use std::fmt;
use std::sync::Arc;

/// Sorts of the logic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Float32,
    Float64,
    Bool,
    Int,
    RoundingMode,
}

impl Sort {
    pub fn fp_format(self) -> Option<FpFormat> {
        match self {
            Sort::Float32 => Some(FpFormat::Float32),
            Sort::Float64 => Some(FpFormat::Float64),
            _ => None,
        }
    }

    pub fn is_fp(self) -> bool {
        matches!(self, Sort::Float32 | Sort::Float64)
    }
}

impl From<FpFormat> for Sort {
    fn from(f: FpFormat) -> Sort {
        match f {
            FpFormat::Float32 => Sort::Float32,
            FpFormat::Float64 => Sort::Float64,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Sort::Float32 => "Float32",
            Sort::Float64 => "Float64",
            Sort::Bool => "Bool",
            Sort::Int => "Int",
            Sort::RoundingMode => "RoundingMode",
        };
        f.write_str(s)
    }
}

/// IEEE rounding modes. Only RNE is ever constructed by the pipeline; the
/// enum exists so terms are explicit about the mode they round under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoundingMode {
    /// Round to nearest, ties to even.
    Rne,
}

impl RoundingMode {
    pub fn smt_name(self) -> &'static str {
        match self {
            RoundingMode::Rne => "RNE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FpBinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FpBinOp {
    pub fn smt_name(self) -> &'static str {
        match self {
            FpBinOp::Add => "fp.add",
            FpBinOp::Sub => "fp.sub",
            FpBinOp::Mul => "fp.mul",
            FpBinOp::Div => "fp.div",
        }
    }
}

/// IEEE comparisons. `Eq` is IEEE equality: NaN compares unequal to
/// everything, and +0 equals -0. Bitwise equality is a separate node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FpCmpOp {
    Leq,
    Lt,
    Geq,
    Gt,
    Eq,
}

impl FpCmpOp {
    pub fn smt_name(self) -> &'static str {
        match self {
            FpCmpOp::Leq => "fp.leq",
            FpCmpOp::Lt => "fp.lt",
            FpCmpOp::Geq => "fp.geq",
            FpCmpOp::Gt => "fp.gt",
            FpCmpOp::Eq => "fp.eq",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FpClass {
    IsNan,
    IsInfinite,
    IsNormal,
    IsZero,
    IsNegative,
}

impl FpClass {
    pub fn smt_name(self) -> &'static str {
        match self {
            FpClass::IsNan => "fp.isNaN",
            FpClass::IsInfinite => "fp.isInfinite",
            FpClass::IsNormal => "fp.isNormal",
            FpClass::IsZero => "fp.isZero",
            FpClass::IsNegative => "fp.isNegative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntBinOp {
    Add,
    Sub,
    Mul,
}

impl IntBinOp {
    pub fn smt_name(self) -> &'static str {
        match self {
            IntBinOp::Add => "+",
            IntBinOp::Sub => "-",
            IntBinOp::Mul => "*",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntCmpOp {
    Leq,
    Lt,
    Geq,
    Gt,
    Eq,
}

impl IntCmpOp {
    pub fn smt_name(self) -> &'static str {
        match self {
            IntCmpOp::Leq => "<=",
            IntCmpOp::Lt => "<",
            IntCmpOp::Geq => ">=",
            IntCmpOp::Gt => ">",
            IntCmpOp::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
    Implies,
    Iff,
}

impl BoolOp {
    pub fn smt_name(self) -> &'static str {
        match self {
            BoolOp::And => "and",
            BoolOp::Or => "or",
            BoolOp::Implies => "=>",
            BoolOp::Iff => "=",
        }
    }
}

/// Library functions carried as uninterpreted Float64 -> Float64 symbols.
/// `Sqrt` may instead be emitted as the theory operation `fp.sqrt`
/// depending on backend options.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UninterpretedFn {
    SinF64,
    CosF64,
    AtanF64,
    SqrtF64,
}

impl UninterpretedFn {
    pub fn smt_name(self) -> &'static str {
        match self {
            UninterpretedFn::SinF64 => "sinDouble",
            UninterpretedFn::CosF64 => "cosDouble",
            UninterpretedFn::AtanF64 => "atanDouble",
            UninterpretedFn::SqrtF64 => "sqrtDouble",
        }
    }

    pub fn all() -> [UninterpretedFn; 4] {
        [
            UninterpretedFn::SinF64,
            UninterpretedFn::CosF64,
            UninterpretedFn::AtanF64,
            UninterpretedFn::SqrtF64,
        ]
    }
}

/// A well-sorted term. Children are `Arc`-shared so substitution and goal
/// splitting stay cheap on wide formulas.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    FpLit(FpLiteral),
    BoolLit(bool),
    IntLit(i64),
    Var(String, Sort),
    FpArith {
        op: FpBinOp,
        mode: RoundingMode,
        lhs: Arc<Term>,
        rhs: Arc<Term>,
    },
    FpNeg(Arc<Term>),
    FpAbs(Arc<Term>),
    FpCmp {
        op: FpCmpOp,
        lhs: Arc<Term>,
        rhs: Arc<Term>,
    },
    Classify {
        class: FpClass,
        arg: Arc<Term>,
    },
    /// Raw bit-pattern identity: distinguishes +0 from -0 and equates NaN
    /// with itself (NaN is canonical here).
    BitEq(Arc<Term>, Arc<Term>),
    IntArith {
        op: IntBinOp,
        lhs: Arc<Term>,
        rhs: Arc<Term>,
    },
    IntCmp {
        op: IntCmpOp,
        lhs: Arc<Term>,
        rhs: Arc<Term>,
    },
    Not(Arc<Term>),
    Bool {
        op: BoolOp,
        lhs: Arc<Term>,
        rhs: Arc<Term>,
    },
    Ite {
        cond: Arc<Term>,
        then: Arc<Term>,
        els: Arc<Term>,
    },
    Forall {
        vars: Vec<(String, Sort)>,
        body: Arc<Term>,
    },
    App {
        func: UninterpretedFn,
        arg: Arc<Term>,
    },
}

/// Sorting violations raised by the checked constructors.
#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum SortError {
    #[error("expected sort {expected}, got {got}")]
    Mismatch { expected: Sort, got: Sort },
    #[error("expected a floating-point sort, got {0}")]
    NotFp(Sort),
    #[error("operand sorts differ: {0} vs {1}")]
    Unequal(Sort, Sort),
}

impl Term {
    /// The sort of a term, total by construction.
    pub fn sort(&self) -> Sort {
        match self {
            Term::FpLit(l) => l.format().into(),
            Term::BoolLit(_) => Sort::Bool,
            Term::IntLit(_) => Sort::Int,
            Term::Var(_, s) => *s,
            Term::FpArith { lhs, .. } => lhs.sort(),
            Term::FpNeg(t) | Term::FpAbs(t) => t.sort(),
            Term::FpCmp { .. }
            | Term::Classify { .. }
            | Term::BitEq(..)
            | Term::IntCmp { .. }
            | Term::Not(_)
            | Term::Bool { .. }
            | Term::Forall { .. } => Sort::Bool,
            Term::IntArith { .. } => Sort::Int,
            Term::Ite { then, .. } => then.sort(),
            Term::App { .. } => Sort::Float64,
        }
    }

    pub fn lit_f64(v: f64) -> Term {
        Term::FpLit(FpLiteral::from_f64(v))
    }

    pub fn var(name: impl Into<String>, sort: Sort) -> Term {
        Term::Var(name.into(), sort)
    }

    pub fn fp_arith(op: FpBinOp, lhs: Term, rhs: Term) -> Result<Term, SortError> {
        let (ls, rs) = (lhs.sort(), rhs.sort());
        if !ls.is_fp() {
            return Err(SortError::NotFp(ls));
        }
        if ls != rs {
            return Err(SortError::Unequal(ls, rs));
        }
        Ok(Term::FpArith {
            op,
            mode: RoundingMode::Rne,
            lhs: Arc::new(lhs),
            rhs: Arc::new(rhs),
        })
    }

    pub fn fp_neg(t: Term) -> Result<Term, SortError> {
        if !t.sort().is_fp() {
            return Err(SortError::NotFp(t.sort()));
        }
        Ok(Term::FpNeg(Arc::new(t)))
    }

    pub fn fp_abs(t: Term) -> Result<Term, SortError> {
        if !t.sort().is_fp() {
            return Err(SortError::NotFp(t.sort()));
        }
        Ok(Term::FpAbs(Arc::new(t)))
    }

    pub fn fp_cmp(op: FpCmpOp, lhs: Term, rhs: Term) -> Result<Term, SortError> {
        let (ls, rs) = (lhs.sort(), rhs.sort());
        if !ls.is_fp() {
            return Err(SortError::NotFp(ls));
        }
        if ls != rs {
            return Err(SortError::Unequal(ls, rs));
        }
        Ok(Term::FpCmp {
            op,
            lhs: Arc::new(lhs),
            rhs: Arc::new(rhs),
        })
    }

    pub fn classify(class: FpClass, arg: Term) -> Result<Term, SortError> {
        if !arg.sort().is_fp() {
            return Err(SortError::NotFp(arg.sort()));
        }
        Ok(Term::Classify {
            class,
            arg: Arc::new(arg),
        })
    }

    pub fn bit_eq(lhs: Term, rhs: Term) -> Result<Term, SortError> {
        let (ls, rs) = (lhs.sort(), rhs.sort());
        if !ls.is_fp() {
            return Err(SortError::NotFp(ls));
        }
        if ls != rs {
            return Err(SortError::Unequal(ls, rs));
        }
        Ok(Term::BitEq(Arc::new(lhs), Arc::new(rhs)))
    }

    pub fn int_arith(op: IntBinOp, lhs: Term, rhs: Term) -> Result<Term, SortError> {
        for t in [&lhs, &rhs] {
            if t.sort() != Sort::Int {
                return Err(SortError::Mismatch {
                    expected: Sort::Int,
                    got: t.sort(),
                });
            }
        }
        Ok(Term::IntArith {
            op,
            lhs: Arc::new(lhs),
            rhs: Arc::new(rhs),
        })
    }

    pub fn int_cmp(op: IntCmpOp, lhs: Term, rhs: Term) -> Result<Term, SortError> {
        for t in [&lhs, &rhs] {
            if t.sort() != Sort::Int {
                return Err(SortError::Mismatch {
                    expected: Sort::Int,
                    got: t.sort(),
                });
            }
        }
        Ok(Term::IntCmp {
            op,
            lhs: Arc::new(lhs),
            rhs: Arc::new(rhs),
        })
    }

    pub fn not(t: Term) -> Result<Term, SortError> {
        if t.sort() != Sort::Bool {
            return Err(SortError::Mismatch {
                expected: Sort::Bool,
                got: t.sort(),
            });
        }
        Ok(Term::Not(Arc::new(t)))
    }

    pub fn bool_op(op: BoolOp, lhs: Term, rhs: Term) -> Result<Term, SortError> {
        for t in [&lhs, &rhs] {
            if t.sort() != Sort::Bool {
                return Err(SortError::Mismatch {
                    expected: Sort::Bool,
                    got: t.sort(),
                });
            }
        }
        Ok(Term::Bool {
            op,
            lhs: Arc::new(lhs),
            rhs: Arc::new(rhs),
        })
    }

    pub fn and(lhs: Term, rhs: Term) -> Result<Term, SortError> {
        Term::bool_op(BoolOp::And, lhs, rhs)
    }

    pub fn implies(lhs: Term, rhs: Term) -> Result<Term, SortError> {
        Term::bool_op(BoolOp::Implies, lhs, rhs)
    }

    pub fn ite(cond: Term, then: Term, els: Term) -> Result<Term, SortError> {
        if cond.sort() != Sort::Bool {
            return Err(SortError::Mismatch {
                expected: Sort::Bool,
                got: cond.sort(),
            });
        }
        if then.sort() != els.sort() {
            return Err(SortError::Unequal(then.sort(), els.sort()));
        }
        Ok(Term::Ite {
            cond: Arc::new(cond),
            then: Arc::new(then),
            els: Arc::new(els),
        })
    }

    pub fn forall(vars: Vec<(String, Sort)>, body: Term) -> Result<Term, SortError> {
        if body.sort() != Sort::Bool {
            return Err(SortError::Mismatch {
                expected: Sort::Bool,
                got: body.sort(),
            });
        }
        Ok(Term::Forall {
            vars,
            body: Arc::new(body),
        })
    }

    pub fn app(func: UninterpretedFn, arg: Term) -> Result<Term, SortError> {
        if arg.sort() != Sort::Float64 {
            return Err(SortError::Mismatch {
                expected: Sort::Float64,
                got: arg.sort(),
            });
        }
        Ok(Term::App {
            func,
            arg: Arc::new(arg),
        })
    }

    /// Conjunction of a non-empty list; `true` for an empty one.
    pub fn conjoin(terms: impl IntoIterator<Item = Term>) -> Term {
        let mut it = terms.into_iter();
        let first = match it.next() {
            Some(t) => t,
            None => return Term::BoolLit(true),
        };
        it.fold(first, |acc, t| {
            Term::and(acc, t).expect("conjoin over non-boolean term")
        })
    }

    /// fp_nice: not NaN and not infinite.
    pub fn fp_nice(arg: Term) -> Result<Term, SortError> {
        let not_nan = Term::not(Term::classify(FpClass::IsNan, arg.clone())?)?;
        let not_inf = Term::not(Term::classify(FpClass::IsInfinite, arg)?)?;
        Term::and(not_nan, not_inf)
    }

    /// Free variables (symbolic constants), excluding bound ones.
    pub fn free_vars(&self) -> Vec<(String, Sort)> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<(String, Sort)>) {
        match self {
            Term::Var(name, sort) => {
                if !bound.iter().any(|b| b == name) {
                    out.push((name.clone(), *sort));
                }
            }
            Term::FpLit(_) | Term::BoolLit(_) | Term::IntLit(_) => {}
            Term::FpArith { lhs, rhs, .. }
            | Term::FpCmp { lhs, rhs, .. }
            | Term::BitEq(lhs, rhs)
            | Term::IntArith { lhs, rhs, .. }
            | Term::IntCmp { lhs, rhs, .. }
            | Term::Bool { lhs, rhs, .. } => {
                lhs.collect_free(bound, out);
                rhs.collect_free(bound, out);
            }
            Term::FpNeg(t) | Term::FpAbs(t) | Term::Not(t) => t.collect_free(bound, out),
            Term::Classify { arg, .. } | Term::App { arg, .. } => arg.collect_free(bound, out),
            Term::Ite { cond, then, els } => {
                cond.collect_free(bound, out);
                then.collect_free(bound, out);
                els.collect_free(bound, out);
            }
            Term::Forall { vars, body } => {
                let n = bound.len();
                bound.extend(vars.iter().map(|(v, _)| v.clone()));
                body.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// Whether any quantifier node occurs in the term.
    pub fn has_quantifier(&self) -> bool {
        match self {
            Term::Forall { .. } => true,
            Term::FpLit(_) | Term::BoolLit(_) | Term::IntLit(_) | Term::Var(..) => false,
            Term::FpArith { lhs, rhs, .. }
            | Term::FpCmp { lhs, rhs, .. }
            | Term::BitEq(lhs, rhs)
            | Term::IntArith { lhs, rhs, .. }
            | Term::IntCmp { lhs, rhs, .. }
            | Term::Bool { lhs, rhs, .. } => lhs.has_quantifier() || rhs.has_quantifier(),
            Term::FpNeg(t) | Term::FpAbs(t) | Term::Not(t) => t.has_quantifier(),
            Term::Classify { arg, .. } | Term::App { arg, .. } => arg.has_quantifier(),
            Term::Ite { cond, then, els } => {
                cond.has_quantifier() || then.has_quantifier() || els.has_quantifier()
            }
        }
    }

    /// Debug pretty-printer, prefix notation, stable across runs.
    pub fn pretty(&self) -> String {
        let mut s = String::new();
        self.pretty_into(&mut s);
        s
    }

    fn pretty_into(&self, out: &mut String) {
        use std::fmt::Write;
        match self {
            Term::FpLit(l) => {
                let _ = write!(out, "{l}");
            }
            Term::BoolLit(b) => {
                let _ = write!(out, "{b}");
            }
            Term::IntLit(i) => {
                let _ = write!(out, "{i}");
            }
            Term::Var(name, _) => out.push_str(name),
            Term::FpArith { op, mode, lhs, rhs } => {
                let _ = write!(out, "({} {} ", op.smt_name(), mode.smt_name());
                lhs.pretty_into(out);
                out.push(' ');
                rhs.pretty_into(out);
                out.push(')');
            }
            Term::FpNeg(t) => {
                out.push_str("(fp.neg ");
                t.pretty_into(out);
                out.push(')');
            }
            Term::FpAbs(t) => {
                out.push_str("(fp.abs ");
                t.pretty_into(out);
                out.push(')');
            }
            Term::FpCmp { op, lhs, rhs } => {
                let _ = write!(out, "({} ", op.smt_name());
                lhs.pretty_into(out);
                out.push(' ');
                rhs.pretty_into(out);
                out.push(')');
            }
            Term::Classify { class, arg } => {
                let _ = write!(out, "({} ", class.smt_name());
                arg.pretty_into(out);
                out.push(')');
            }
            Term::BitEq(lhs, rhs) => {
                out.push_str("(bitEq ");
                lhs.pretty_into(out);
                out.push(' ');
                rhs.pretty_into(out);
                out.push(')');
            }
            Term::IntArith { op, lhs, rhs } => {
                let _ = write!(out, "({} ", op.smt_name());
                lhs.pretty_into(out);
                out.push(' ');
                rhs.pretty_into(out);
                out.push(')');
            }
            Term::IntCmp { op, lhs, rhs } => {
                let _ = write!(out, "(int{} ", op.smt_name());
                lhs.pretty_into(out);
                out.push(' ');
                rhs.pretty_into(out);
                out.push(')');
            }
            Term::Not(t) => {
                out.push_str("(not ");
                t.pretty_into(out);
                out.push(')');
            }
            Term::Bool { op, lhs, rhs } => {
                let _ = write!(out, "({} ", op.smt_name());
                lhs.pretty_into(out);
                out.push(' ');
                rhs.pretty_into(out);
                out.push(')');
            }
            Term::Ite { cond, then, els } => {
                out.push_str("(ite ");
                cond.pretty_into(out);
                out.push(' ');
                then.pretty_into(out);
                out.push(' ');
                els.pretty_into(out);
                out.push(')');
            }
            Term::Forall { vars, body } => {
                out.push_str("(forall (");
                for (i, (v, s)) in vars.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    let _ = write!(out, "({v} {s})");
                }
                out.push_str(") ");
                body.pretty_into(out);
                out.push(')');
            }
            Term::App { func, arg } => {
                let _ = write!(out, "({} ", func.smt_name());
                arg.pretty_into(out);
                out.push(')');
            }
        }
    }
}

/// Builds spec-level predicates over FP terms. `fp_nice` expands to the
/// conjunction "not NaN and not infinite"; the rest map to single nodes.
pub fn build_spec_predicate(pred: &str, args: &[Term]) -> Result<Term, SortError> {
    let unary = |args: &[Term]| -> Result<Term, SortError> {
        if args.len() != 1 {
            return Err(SortError::Mismatch {
                expected: Sort::Bool,
                got: Sort::Bool,
            });
        }
        Ok(args[0].clone())
    };
    match pred {
        "fp_nan" => Term::classify(FpClass::IsNan, unary(args)?),
        "fp_infinite" => Term::classify(FpClass::IsInfinite, unary(args)?),
        "fp_normal" => Term::classify(FpClass::IsNormal, unary(args)?),
        "fp_zero" => Term::classify(FpClass::IsZero, unary(args)?),
        "fp_nice" => Term::fp_nice(unary(args)?),
        "fp_bitEq" => {
            if args.len() != 2 {
                return Err(SortError::Mismatch {
                    expected: Sort::Bool,
                    got: Sort::Bool,
                });
            }
            Term::bit_eq(args[0].clone(), args[1].clone())
        }
        _ => Err(SortError::Mismatch {
            expected: Sort::Bool,
            got: Sort::Bool,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fp_nice_expands_to_the_conjunction() {
        let x = Term::var("x", Sort::Float64);
        let nice = Term::fp_nice(x.clone()).unwrap();
        let expect = Term::and(
            Term::not(Term::classify(FpClass::IsNan, x.clone()).unwrap()).unwrap(),
            Term::not(Term::classify(FpClass::IsInfinite, x).unwrap()).unwrap(),
        )
        .unwrap();
        assert_eq!(nice, expect);
    }

    #[test]
    fn constructors_reject_ill_sorted_operands() {
        let b = Term::BoolLit(true);
        let x = Term::var("x", Sort::Float64);
        assert!(Term::classify(FpClass::IsNan, b.clone()).is_err());
        assert!(Term::fp_arith(FpBinOp::Add, x.clone(), Term::IntLit(1)).is_err());
        assert!(Term::and(x.clone(), b.clone()).is_err());
        assert!(Term::fp_cmp(
            FpCmpOp::Eq,
            x,
            Term::var("y", Sort::Float32)
        )
        .is_err());
    }

    #[test]
    fn ieee_eq_and_bit_eq_are_distinct_nodes() {
        let p0 = Term::lit_f64(0.0);
        let n0 = Term::lit_f64(-0.0);
        let ieee = Term::fp_cmp(FpCmpOp::Eq, p0.clone(), n0.clone()).unwrap();
        let bits = Term::bit_eq(p0, n0).unwrap();
        assert_ne!(ieee, bits);
    }

    #[test]
    fn free_vars_respect_binders() {
        let a = Term::var("a", Sort::Float64);
        let x = Term::var("x", Sort::Float64);
        let body = Term::fp_cmp(FpCmpOp::Leq, a.clone(), x.clone()).unwrap();
        let q = Term::forall(vec![("a".into(), Sort::Float64)], body).unwrap();
        assert_eq!(q.free_vars(), vec![("x".to_string(), Sort::Float64)]);
    }
}
