//! Document emission. Identical (obligation, options) inputs produce
//! byte-identical documents: declarations are sorted, axiom order is the
//! pack order, and occurrence order is the obligation's.

use super::literal_text::format_fp_literal;
use crate::axioms::{axiom_pack, ground_instances, quantified_axioms, AxiomPack};
use crate::formula::{ProofObligation, RoundingMode, Sort, Term, UninterpretedFn};
use std::collections::BTreeSet;
use std::fmt::Write;

/// How transcendental (and axiomatized sqrt) symbols get their meaning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransMode {
    /// Quantified axioms asserted in the document.
    SmtAxioms,
    /// Ground instances at each occurrence; no quantifiers.
    GroundInst,
}

impl TransMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TransMode::SmtAxioms => "smt-axioms",
            TransMode::GroundInst => "ground-inst",
        }
    }
}

/// Whether sqrt uses the theory's rounded operation or the axiom pack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqrtMode {
    Builtin,
    Axioms,
}

impl SqrtMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SqrtMode::Builtin => "builtin",
            SqrtMode::Axioms => "axioms",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EmitOptions {
    pub trans_mode: TransMode,
    pub sqrt_mode: SqrtMode,
    /// Inject the synthetic quantified background pack that stands in for
    /// a heap-aware translation's memory-model axioms.
    pub background_quantifiers: bool,
    /// Logic override; `None` selects QF_FP for pure quantifier-free FP
    /// documents and ALL otherwise.
    pub logic: Option<String>,
    pub produce_model: bool,
    /// Declare +,-,*,/ as uninterpreted functions instead of theory
    /// operations (the non-strict translation fallback).
    pub uninterpreted_arith: bool,
}

impl Default for EmitOptions {
    fn default() -> Self {
        EmitOptions {
            trans_mode: TransMode::GroundInst,
            sqrt_mode: SqrtMode::Builtin,
            background_quantifiers: false,
            logic: None,
            produce_model: true,
            uninterpreted_arith: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SmtDocument {
    pub text: String,
    pub goal_name: String,
    pub declared_symbols: Vec<String>,
    pub has_quantifiers: bool,
}

/// Render an obligation as a refutation query.
pub fn emit_smt(po: &ProofObligation, opts: &EmitOptions) -> SmtDocument {
    let mut ctx = Emitter {
        opts: opts.clone(),
        uses_int: false,
        uses_uf: false,
        uses_quantifier: false,
    };

    // Which uninterpreted symbols the document needs.
    let mut needed_fns: BTreeSet<UninterpretedFn> = BTreeSet::new();
    for occ in &po.occurrences {
        match occ.func {
            UninterpretedFn::SqrtF64 => {
                if opts.sqrt_mode == SqrtMode::Axioms {
                    needed_fns.insert(UninterpretedFn::SqrtF64);
                }
            }
            f => {
                needed_fns.insert(f);
            }
        }
    }

    // Axioms to assert for those symbols.
    let packs: Vec<AxiomPack> = needed_fns.iter().map(|f| axiom_pack(*f)).collect();
    let axiom_terms: Vec<Term> = match opts.trans_mode {
        TransMode::SmtAxioms => packs.iter().flat_map(quantified_axioms).collect(),
        TransMode::GroundInst => {
            let relevant: Vec<crate::formula::Occurrence> = po
                .occurrences
                .iter()
                .filter(|o| needed_fns.contains(&o.func))
                .cloned()
                .collect();
            ground_instances(&packs, &relevant).expect("packs cover occurrences")
        }
    };

    // Body text first: terms decide which declarations are needed.
    let mut asserts = String::new();
    for ax in &axiom_terms {
        let rendered = ctx.term(ax);
        let _ = writeln!(asserts, "(assert {rendered})");
    }
    for h in &po.hypotheses {
        let rendered = ctx.term(h);
        let _ = writeln!(asserts, "(assert {rendered})");
    }
    let goal = ctx.term(&po.goal);
    let _ = writeln!(asserts, "(assert (not {goal}))");

    // Declarations: free symbols of hypotheses, goal, and ground axioms.
    let mut free: BTreeSet<(String, Sort)> = BTreeSet::new();
    for t in po
        .hypotheses
        .iter()
        .chain(std::iter::once(&po.goal))
        .chain(axiom_terms.iter())
    {
        for v in t.free_vars() {
            free.insert(v);
        }
    }

    let mut decls = String::new();
    for (name, sort) in &free {
        let _ = writeln!(decls, "(declare-const {} {})", symbol(name), sort_name(*sort));
        if *sort == Sort::Int {
            ctx.uses_int = true;
        }
    }
    for f in &needed_fns {
        let _ = writeln!(decls, "(declare-fun {} (Float64) Float64)", f.smt_name());
        ctx.uses_uf = true;
    }
    if opts.uninterpreted_arith {
        for (name, arity) in [
            ("addDouble", 2),
            ("subDouble", 2),
            ("mulDouble", 2),
            ("divDouble", 2),
            ("negDouble", 1),
        ] {
            let args = vec!["Float64"; arity].join(" ");
            let _ = writeln!(decls, "(declare-fun {name} ({args}) Float64)");
        }
        ctx.uses_uf = true;
    }

    let mut ballast = String::new();
    if opts.background_quantifiers {
        ballast.push_str(BACKGROUND_PACK);
        ctx.uses_quantifier = true;
        ctx.uses_uf = true;
    }

    let logic = opts.logic.clone().unwrap_or_else(|| {
        if ctx.uses_quantifier || ctx.uses_uf || ctx.uses_int {
            "ALL".to_string()
        } else {
            "QF_FP".to_string()
        }
    });

    let mut text = String::new();
    let _ = writeln!(text, "; goal: {}", po.name);
    let _ = writeln!(
        text,
        "; options: trans={} sqrt={} quantifiers={}",
        opts.trans_mode.as_str(),
        opts.sqrt_mode.as_str(),
        if opts.background_quantifiers { "on" } else { "off" },
    );
    let _ = writeln!(text, "(set-logic {logic})");
    if opts.produce_model {
        let _ = writeln!(text, "(set-option :produce-models true)");
    }
    text.push_str(&decls);
    text.push_str(&ballast);
    text.push_str(&asserts);
    let _ = writeln!(text, "(check-sat)");
    if opts.produce_model {
        let _ = writeln!(text, "(get-model)");
    }

    SmtDocument {
        text,
        goal_name: po.name.clone(),
        declared_symbols: free.iter().map(|(n, _)| n.clone()).collect(),
        has_quantifiers: ctx.uses_quantifier,
    }
}

/// Synthetic background axioms: satisfiable, goal-irrelevant, quantified
/// over uninterpreted sorts mixed with FP, in the spirit of a Java
/// translation's memory-model housekeeping.
const BACKGROUND_PACK: &str = "\
(declare-sort BgHeap 0)
(declare-sort BgObject 0)
(declare-fun bgAnon (BgHeap) BgHeap)
(declare-fun bgWellFormed (BgHeap) Bool)
(declare-fun bgTypeOf (BgObject) Int)
(declare-fun bgSelect (BgHeap BgObject) Float64)
(declare-fun bgStore (BgHeap BgObject Float64) BgHeap)
(declare-const bgHeap0 BgHeap)
(assert (bgWellFormed bgHeap0))
(assert (forall ((h BgHeap)) (=> (bgWellFormed h) (bgWellFormed (bgAnon h)))))
(assert (forall ((h BgHeap) (o BgObject) (x Float64)) (bgWellFormed (bgStore h o x))))
(assert (forall ((h BgHeap) (o BgObject) (x Float64)) (=> (bgWellFormed h) (or (fp.isNaN x) (fp.eq (bgSelect (bgStore h o x) o) x)))))
(assert (forall ((h BgHeap) (o BgObject)) (=> (bgWellFormed h) (or (fp.isNaN (bgSelect h o)) (fp.leq (bgSelect h o) (bgSelect h o))))))
(assert (forall ((o BgObject)) (>= (bgTypeOf o) 0)))
(assert (forall ((h BgHeap) (o BgObject) (x Float64)) (=> (bgWellFormed h) (or (fp.isNaN (bgSelect (bgAnon h) o)) (not (fp.isNaN (bgSelect (bgAnon h) o)))))))
";

struct Emitter {
    opts: EmitOptions,
    uses_int: bool,
    uses_uf: bool,
    uses_quantifier: bool,
}

fn sort_name(s: Sort) -> &'static str {
    match s {
        Sort::Float64 => "Float64",
        Sort::Float32 => "Float32",
        Sort::Bool => "Bool",
        Sort::Int => "Int",
        Sort::RoundingMode => "RoundingMode",
    }
}

/// SMT-LIB simple symbols admit letters, digits, and most punctuation,
/// but not brackets; array slots like `vec[0]` need pipe quoting.
fn symbol(name: &str) -> String {
    let simple = name.chars().all(|c| {
        c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c)
    }) && !name.starts_with(|c: char| c.is_ascii_digit());
    if simple && !name.is_empty() {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

impl Emitter {
    fn term(&mut self, t: &Term) -> String {
        match t {
            Term::FpLit(l) => format_fp_literal(l),
            Term::BoolLit(b) => b.to_string(),
            Term::IntLit(v) => {
                self.uses_int = true;
                if *v < 0 {
                    format!("(- {})", -v)
                } else {
                    v.to_string()
                }
            }
            Term::Var(name, sort) => {
                if *sort == Sort::Int {
                    self.uses_int = true;
                }
                symbol(name)
            }
            Term::FpArith { op, mode, lhs, rhs } => {
                let (l, r) = (self.term(lhs), self.term(rhs));
                if self.opts.uninterpreted_arith {
                    let name = match op {
                        crate::formula::FpBinOp::Add => "addDouble",
                        crate::formula::FpBinOp::Sub => "subDouble",
                        crate::formula::FpBinOp::Mul => "mulDouble",
                        crate::formula::FpBinOp::Div => "divDouble",
                    };
                    self.uses_uf = true;
                    format!("({name} {l} {r})")
                } else {
                    format!("({} {} {} {})", op.smt_name(), mode_name(*mode), l, r)
                }
            }
            Term::FpNeg(x) => {
                let inner = self.term(x);
                if self.opts.uninterpreted_arith {
                    self.uses_uf = true;
                    format!("(negDouble {inner})")
                } else {
                    format!("(fp.neg {inner})")
                }
            }
            Term::FpAbs(x) => format!("(fp.abs {})", self.term(x)),
            Term::FpCmp { op, lhs, rhs } => {
                format!("({} {} {})", op.smt_name(), self.term(lhs), self.term(rhs))
            }
            Term::Classify { class, arg } => {
                format!("({} {})", class.smt_name(), self.term(arg))
            }
            Term::BitEq(lhs, rhs) => {
                format!("(= {} {})", self.term(lhs), self.term(rhs))
            }
            Term::IntArith { op, lhs, rhs } => {
                self.uses_int = true;
                format!("({} {} {})", op.smt_name(), self.term(lhs), self.term(rhs))
            }
            Term::IntCmp { op, lhs, rhs } => {
                self.uses_int = true;
                format!("({} {} {})", op.smt_name(), self.term(lhs), self.term(rhs))
            }
            Term::Not(x) => format!("(not {})", self.term(x)),
            Term::Bool { op, lhs, rhs } => {
                format!("({} {} {})", op.smt_name(), self.term(lhs), self.term(rhs))
            }
            Term::Ite { cond, then, els } => format!(
                "(ite {} {} {})",
                self.term(cond),
                self.term(then),
                self.term(els)
            ),
            Term::Forall { vars, body } => {
                self.uses_quantifier = true;
                let bindings: Vec<String> = vars
                    .iter()
                    .map(|(v, s)| format!("({} {})", symbol(v), sort_name(*s)))
                    .collect();
                format!("(forall ({}) {})", bindings.join(" "), self.term(body))
            }
            Term::App { func, arg } => {
                let inner = self.term(arg);
                match func {
                    UninterpretedFn::SqrtF64 if self.opts.sqrt_mode == SqrtMode::Builtin => {
                        format!("(fp.sqrt RNE {inner})")
                    }
                    f => {
                        self.uses_uf = true;
                        format!("({} {inner})", f.smt_name())
                    }
                }
            }
        }
    }
}

fn mode_name(m: RoundingMode) -> &'static str {
    m.smt_name()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{FpClass, Provenance};

    fn nan_goal_with_sin() -> ProofObligation {
        let x = Term::var("x", Sort::Float64);
        let sinx = Term::app(UninterpretedFn::SinF64, x.clone()).unwrap();
        let goal = Term::not(Term::classify(FpClass::IsNan, sinx).unwrap()).unwrap();
        ProofObligation::new(
            "demo.c1.g1".into(),
            vec![Term::fp_nice(x).unwrap()],
            goal,
            Provenance {
                method: "demo".into(),
                contract_index: 1,
                path: "ensures#1".into(),
            },
        )
    }

    #[test]
    fn smt_axioms_mode_emits_the_quantified_listing_shape() {
        let po = nan_goal_with_sin();
        let doc = emit_smt(
            &po,
            &EmitOptions {
                trans_mode: TransMode::SmtAxioms,
                ..Default::default()
            },
        );
        assert!(doc.text.contains("(assert (forall ((a Float64))"));
        assert!(doc.text.contains(
            "(fp.leq (sinDouble a) (fp #b0 #b01111111111 #b0000000000000000000000000000000000000000000000000000))"
        ));
        assert!(doc.text.contains(
            "(fp.geq (sinDouble a) (fp #b1 #b01111111111 #b0000000000000000000000000000000000000000000000000000))"
        ));
        assert!(doc.has_quantifiers);
    }

    #[test]
    fn ground_mode_has_instances_and_no_forall() {
        let po = nan_goal_with_sin();
        let doc = emit_smt(
            &po,
            &EmitOptions {
                trans_mode: TransMode::GroundInst,
                ..Default::default()
            },
        );
        assert!(!doc.text.contains("forall"));
        // four sin schemas instantiated at `x`
        assert_eq!(doc.text.matches("(sinDouble x)").count() >= 4, true);
        assert!(!doc.has_quantifiers);
    }

    #[test]
    fn refutation_shape_and_single_check_sat() {
        let po = nan_goal_with_sin();
        let doc = emit_smt(&po, &EmitOptions::default());
        assert_eq!(doc.text.matches("(check-sat)").count(), 1);
        assert!(doc.text.contains("(assert (not "));
        assert!(doc.text.contains("(get-model)"));
        let no_model = emit_smt(
            &po,
            &EmitOptions {
                produce_model: false,
                ..Default::default()
            },
        );
        assert!(!no_model.text.contains("(get-model)"));
    }

    #[test]
    fn determinism_byte_identical() {
        let po = nan_goal_with_sin();
        let a = emit_smt(&po, &EmitOptions::default());
        let b = emit_smt(&po, &EmitOptions::default());
        assert_eq!(a.text, b.text);
    }

    #[test]
    fn logic_selection() {
        // Pure FP, no UF: QF_FP
        let x = Term::var("x", Sort::Float64);
        let goal = Term::fp_nice(x).unwrap();
        let po = ProofObligation::new(
            "t".into(),
            vec![],
            goal,
            Provenance {
                method: "t".into(),
                contract_index: 1,
                path: "ensures#1".into(),
            },
        );
        let doc = emit_smt(&po, &EmitOptions::default());
        assert!(doc.text.contains("(set-logic QF_FP)"));
        // With sin occurrences: UF forces ALL
        let doc2 = emit_smt(&nan_goal_with_sin(), &EmitOptions::default());
        assert!(doc2.text.contains("(set-logic ALL)"));
    }

    #[test]
    fn sqrt_builtin_uses_theory_op_and_drops_pack() {
        let x = Term::var("x", Sort::Float64);
        let sq = Term::app(UninterpretedFn::SqrtF64, x.clone()).unwrap();
        let goal = Term::not(Term::classify(FpClass::IsNan, sq).unwrap()).unwrap();
        let po = ProofObligation::new(
            "s".into(),
            vec![Term::fp_cmp(crate::formula::FpCmpOp::Geq, x, Term::lit_f64(0.0)).unwrap()],
            goal,
            Provenance {
                method: "s".into(),
                contract_index: 1,
                path: "ensures#1".into(),
            },
        );
        let builtin = emit_smt(
            &po,
            &EmitOptions {
                sqrt_mode: SqrtMode::Builtin,
                ..Default::default()
            },
        );
        assert!(builtin.text.contains("(fp.sqrt RNE x)"));
        assert!(!builtin.text.contains("sqrtDouble"));
        let axioms = emit_smt(
            &po,
            &EmitOptions {
                sqrt_mode: SqrtMode::Axioms,
                ..Default::default()
            },
        );
        assert!(axioms.text.contains("(sqrtDouble x)"));
        assert!(axioms.text.contains("(declare-fun sqrtDouble"));
    }

    #[test]
    fn background_pack_injects_quantifiers() {
        let po = nan_goal_with_sin();
        let doc = emit_smt(
            &po,
            &EmitOptions {
                background_quantifiers: true,
                ..Default::default()
            },
        );
        assert!(doc.has_quantifiers);
        assert!(doc.text.contains("(declare-sort BgHeap 0)"));
    }

    #[test]
    fn array_slot_symbols_are_quoted() {
        let v0 = Term::var("vec[0]", Sort::Float64);
        let goal = Term::fp_nice(v0).unwrap();
        let po = ProofObligation::new(
            "arr".into(),
            vec![],
            goal,
            Provenance {
                method: "arr".into(),
                contract_index: 1,
                path: "ensures#1".into(),
            },
        );
        let doc = emit_smt(&po, &EmitOptions::default());
        assert!(doc.text.contains("(declare-const |vec[0]| Float64)"));
    }
}
