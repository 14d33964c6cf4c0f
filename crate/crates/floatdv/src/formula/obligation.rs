//! Proof obligations: named goals with hypotheses, provenance, and the
//! transcendental occurrences found in them.

use super::term::{Term, UninterpretedFn};

/// Where an obligation came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub method: String,
    /// 1-based contract index within the method.
    pub contract_index: usize,
    /// Human-readable path description, e.g. "ensures#2" or
    /// "loop#1 preserve".
    pub path: String,
}

/// An application of a library function symbol somewhere in a goal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Occurrence {
    pub func: UninterpretedFn,
    pub arg: Term,
}

/// A single goal: hypotheses |- goal, valid iff hypotheses AND NOT goal
/// is unsatisfiable.
#[derive(Debug, Clone)]
pub struct ProofObligation {
    pub name: String,
    pub hypotheses: Vec<Term>,
    pub goal: Term,
    pub provenance: Provenance,
    /// Every transcendental/sqrt application reachable in hypotheses or
    /// goal, nested ones included, deduplicated, in a deterministic order.
    pub occurrences: Vec<Occurrence>,
}

impl ProofObligation {
    pub fn new(name: String, hypotheses: Vec<Term>, goal: Term, provenance: Provenance) -> Self {
        let mut po = ProofObligation {
            name,
            hypotheses,
            goal,
            provenance,
            occurrences: Vec::new(),
        };
        po.occurrences = po.scan_occurrences();
        po
    }

    /// Recompute occurrences with a plain recursive scan.
    pub fn scan_occurrences(&self) -> Vec<Occurrence> {
        let mut found = Vec::new();
        for h in &self.hypotheses {
            collect_apps(h, &mut found);
        }
        collect_apps(&self.goal, &mut found);
        found.sort_by(|a, b| (a.func, a.arg.pretty()).cmp(&(b.func, b.arg.pretty())));
        found.dedup();
        found
    }

    pub fn has_quantifier(&self) -> bool {
        self.goal.has_quantifier() || self.hypotheses.iter().any(|h| h.has_quantifier())
    }

    /// Serializes name, hypotheses, and goal for the debug dump.
    pub fn to_debug_json(&self) -> serde_json::Value {
        serde_json::json!({
            "name": self.name,
            "method": self.provenance.method,
            "contract": self.provenance.contract_index,
            "path": self.provenance.path,
            "hypotheses": self.hypotheses.iter().map(|h| h.pretty()).collect::<Vec<_>>(),
            "goal": self.goal.pretty(),
            "occurrences": self.occurrences.iter()
                .map(|o| format!("({} {})", o.func.smt_name(), o.arg.pretty()))
                .collect::<Vec<_>>(),
        })
    }
}

fn collect_apps(term: &Term, out: &mut Vec<Occurrence>) {
    match term {
        Term::App { func, arg } => {
            // Nested applications inside the argument count too.
            collect_apps(arg, out);
            out.push(Occurrence {
                func: *func,
                arg: (**arg).clone(),
            });
        }
        Term::FpLit(_) | Term::BoolLit(_) | Term::IntLit(_) | Term::Var(..) => {}
        Term::FpArith { lhs, rhs, .. }
        | Term::FpCmp { lhs, rhs, .. }
        | Term::BitEq(lhs, rhs)
        | Term::IntArith { lhs, rhs, .. }
        | Term::IntCmp { lhs, rhs, .. }
        | Term::Bool { lhs, rhs, .. } => {
            collect_apps(lhs, out);
            collect_apps(rhs, out);
        }
        Term::FpNeg(t) | Term::FpAbs(t) | Term::Not(t) => collect_apps(t, out),
        Term::Classify { arg, .. } => collect_apps(arg, out),
        Term::Ite { cond, then, els } => {
            collect_apps(cond, out);
            collect_apps(then, out);
            collect_apps(els, out);
        }
        Term::Forall { body, .. } => collect_apps(body, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::term::{FpClass, Sort};

    #[test]
    fn nested_occurrences_are_both_found() {
        // not isNaN(sin(cos(x))) -> {cos(x), sin(cos(x))}
        let x = Term::var("x", Sort::Float64);
        let cosx = Term::app(UninterpretedFn::CosF64, x).unwrap();
        let sincosx = Term::app(UninterpretedFn::SinF64, cosx.clone()).unwrap();
        let goal =
            Term::not(Term::classify(FpClass::IsNan, sincosx.clone()).unwrap()).unwrap();
        let po = ProofObligation::new(
            "t".into(),
            vec![],
            goal,
            Provenance {
                method: "m".into(),
                contract_index: 1,
                path: "ensures#1".into(),
            },
        );
        assert_eq!(po.occurrences.len(), 2);
        assert!(po
            .occurrences
            .iter()
            .any(|o| o.func == UninterpretedFn::CosF64));
        assert!(po
            .occurrences
            .iter()
            .any(|o| o.func == UninterpretedFn::SinF64));
    }

    #[test]
    fn arithmetic_only_goal_has_no_occurrences() {
        let x = Term::var("x", Sort::Float64);
        let goal = Term::fp_nice(x).unwrap();
        let po = ProofObligation::new(
            "t".into(),
            vec![],
            goal,
            Provenance {
                method: "m".into(),
                contract_index: 1,
                path: "ensures#1".into(),
            },
        );
        assert!(po.occurrences.is_empty());
    }
}
