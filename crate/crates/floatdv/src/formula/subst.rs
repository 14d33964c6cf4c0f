//! Capture-avoiding simultaneous substitution.

use super::term::{Sort, SortError, Term};
use std::collections::HashMap;
use std::sync::Arc;

/// Simultaneously replace free occurrences of the mapped variables.
/// Bound variables shadow the binding; a binder whose variable would
/// capture a free variable of a replacement is alpha-renamed first.
pub fn substitute(term: &Term, binding: &HashMap<String, Term>) -> Result<Term, SortError> {
    // Sort preservation is checked once up front.
    for (name, replacement) in binding {
        if let Some(sort) = find_var_sort(term, name) {
            if sort != replacement.sort() {
                return Err(SortError::Unequal(sort, replacement.sort()));
            }
        }
    }
    Ok(subst(term, binding, &mut 0))
}

fn find_var_sort(term: &Term, name: &str) -> Option<Sort> {
    match term {
        Term::Var(n, s) if n == name => Some(*s),
        Term::FpLit(_) | Term::BoolLit(_) | Term::IntLit(_) | Term::Var(..) => None,
        Term::FpArith { lhs, rhs, .. }
        | Term::FpCmp { lhs, rhs, .. }
        | Term::BitEq(lhs, rhs)
        | Term::IntArith { lhs, rhs, .. }
        | Term::IntCmp { lhs, rhs, .. }
        | Term::Bool { lhs, rhs, .. } => {
            find_var_sort(lhs, name).or_else(|| find_var_sort(rhs, name))
        }
        Term::FpNeg(t) | Term::FpAbs(t) | Term::Not(t) => find_var_sort(t, name),
        Term::Classify { arg, .. } | Term::App { arg, .. } => find_var_sort(arg, name),
        Term::Ite { cond, then, els } => find_var_sort(cond, name)
            .or_else(|| find_var_sort(then, name))
            .or_else(|| find_var_sort(els, name)),
        Term::Forall { vars, body } => {
            if vars.iter().any(|(v, _)| v == name) {
                None
            } else {
                find_var_sort(body, name)
            }
        }
    }
}

fn subst(term: &Term, binding: &HashMap<String, Term>, fresh: &mut u64) -> Term {
    match term {
        Term::Var(name, _) => match binding.get(name) {
            Some(replacement) => replacement.clone(),
            None => term.clone(),
        },
        Term::FpLit(_) | Term::BoolLit(_) | Term::IntLit(_) => term.clone(),
        Term::FpArith { op, mode, lhs, rhs } => Term::FpArith {
            op: *op,
            mode: *mode,
            lhs: Arc::new(subst(lhs, binding, fresh)),
            rhs: Arc::new(subst(rhs, binding, fresh)),
        },
        Term::FpNeg(t) => Term::FpNeg(Arc::new(subst(t, binding, fresh))),
        Term::FpAbs(t) => Term::FpAbs(Arc::new(subst(t, binding, fresh))),
        Term::FpCmp { op, lhs, rhs } => Term::FpCmp {
            op: *op,
            lhs: Arc::new(subst(lhs, binding, fresh)),
            rhs: Arc::new(subst(rhs, binding, fresh)),
        },
        Term::Classify { class, arg } => Term::Classify {
            class: *class,
            arg: Arc::new(subst(arg, binding, fresh)),
        },
        Term::BitEq(lhs, rhs) => Term::BitEq(
            Arc::new(subst(lhs, binding, fresh)),
            Arc::new(subst(rhs, binding, fresh)),
        ),
        Term::IntArith { op, lhs, rhs } => Term::IntArith {
            op: *op,
            lhs: Arc::new(subst(lhs, binding, fresh)),
            rhs: Arc::new(subst(rhs, binding, fresh)),
        },
        Term::IntCmp { op, lhs, rhs } => Term::IntCmp {
            op: *op,
            lhs: Arc::new(subst(lhs, binding, fresh)),
            rhs: Arc::new(subst(rhs, binding, fresh)),
        },
        Term::Not(t) => Term::Not(Arc::new(subst(t, binding, fresh))),
        Term::Bool { op, lhs, rhs } => Term::Bool {
            op: *op,
            lhs: Arc::new(subst(lhs, binding, fresh)),
            rhs: Arc::new(subst(rhs, binding, fresh)),
        },
        Term::Ite { cond, then, els } => Term::Ite {
            cond: Arc::new(subst(cond, binding, fresh)),
            then: Arc::new(subst(then, binding, fresh)),
            els: Arc::new(subst(els, binding, fresh)),
        },
        Term::App { func, arg } => Term::App {
            func: *func,
            arg: Arc::new(subst(arg, binding, fresh)),
        },
        Term::Forall { vars, body } => {
            // Drop shadowed bindings.
            let mut inner: HashMap<String, Term> = binding
                .iter()
                .filter(|(k, _)| !vars.iter().any(|(v, _)| v == *k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            if inner.is_empty() {
                return term.clone();
            }
            // Alpha-rename binders that would capture free variables of the
            // replacements.
            let replacement_frees: Vec<String> = inner
                .values()
                .flat_map(|t| t.free_vars().into_iter().map(|(n, _)| n))
                .collect();
            let mut new_vars = vars.clone();
            let mut renames: HashMap<String, Term> = HashMap::new();
            for (v, s) in new_vars.iter_mut() {
                if replacement_frees.iter().any(|f| f == v) {
                    let fresh_name = loop {
                        *fresh += 1;
                        let candidate = format!("{v}!{fresh}");
                        if !replacement_frees.iter().any(|f| *f == candidate) {
                            break candidate;
                        }
                    };
                    renames.insert(v.clone(), Term::Var(fresh_name.clone(), *s));
                    *v = fresh_name;
                }
            }
            let body = if renames.is_empty() {
                Arc::clone(body)
            } else {
                Arc::new(subst(body, &renames, fresh))
            };
            // Remove bindings shadowed by the (renamed) binder list.
            inner.retain(|k, _| !new_vars.iter().any(|(v, _)| v == k));
            Term::Forall {
                vars: new_vars,
                body: Arc::new(subst(&body, &inner, fresh)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::term::{FpBinOp, FpCmpOp};

    fn f64var(n: &str) -> Term {
        Term::var(n, Sort::Float64)
    }

    #[test]
    fn substitutes_into_predicates() {
        let x = f64var("x");
        let nice = Term::fp_nice(x).unwrap();
        let sum = Term::fp_arith(FpBinOp::Add, f64var("a"), f64var("b")).unwrap();
        let mut b = HashMap::new();
        b.insert("x".to_string(), sum.clone());
        let out = substitute(&nice, &b).unwrap();
        assert_eq!(out, Term::fp_nice(sum).unwrap());
    }

    #[test]
    fn bound_variables_are_untouched() {
        let a = f64var("a");
        let body = Term::fp_cmp(FpCmpOp::Leq, a.clone(), Term::lit_f64(1.0)).unwrap();
        let q = Term::forall(vec![("a".into(), Sort::Float64)], body).unwrap();
        let mut b = HashMap::new();
        b.insert("a".to_string(), Term::lit_f64(2.0));
        assert_eq!(substitute(&q, &b).unwrap(), q);
    }

    #[test]
    fn substitution_is_simultaneous() {
        // {x -> y, y -> x} swaps rather than chains.
        let body = Term::fp_arith(FpBinOp::Add, f64var("x"), f64var("y")).unwrap();
        let mut b = HashMap::new();
        b.insert("x".to_string(), f64var("y"));
        b.insert("y".to_string(), f64var("x"));
        let out = substitute(&body, &b).unwrap();
        let expect = Term::fp_arith(FpBinOp::Add, f64var("y"), f64var("x")).unwrap();
        assert_eq!(out, expect);
    }

    #[test]
    fn capture_is_avoided_by_renaming() {
        // (forall a. a <= x)[x -> a]  must rename the binder.
        let body = Term::fp_cmp(FpCmpOp::Leq, f64var("a"), f64var("x")).unwrap();
        let q = Term::forall(vec![("a".into(), Sort::Float64)], body).unwrap();
        let mut b = HashMap::new();
        b.insert("x".to_string(), f64var("a"));
        let out = substitute(&q, &b).unwrap();
        match &out {
            Term::Forall { vars, body } => {
                assert_ne!(vars[0].0, "a", "binder must have been renamed");
                // The free `a` that was substituted in must remain free.
                assert!(body
                    .free_vars()
                    .iter()
                    .any(|(n, _)| n == "a"));
            }
            other => panic!("expected forall, got {other:?}"),
        }
    }

    #[test]
    fn sort_mismatch_is_reported() {
        let nice = Term::fp_nice(f64var("x")).unwrap();
        let mut b = HashMap::new();
        b.insert("x".to_string(), Term::BoolLit(true));
        assert!(substitute(&nice, &b).is_err());
    }
}
