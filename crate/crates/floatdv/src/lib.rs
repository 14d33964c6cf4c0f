//! A desk-scale deductive verifier for floating-point programs.
//!
//! Programs in MiniF, a small strictly-IEEE-754 language with JML-style
//! contracts, are compiled to proof obligations via weakest preconditions,
//! encoded as SMT-LIB floating-point queries, discharged by external SMT
//! solvers, and cross-checked by a concrete interpreter oracle.
//!
//! Pipeline:
//!
//! ```text
//! .minif source ─parse/typecheck─▶ TypedProgram
//!               ─inline + wp────▶ ProofObligation (sorted FP formulas)
//!               ─emit───────────▶ SMT-LIB 2 document (bit-exact literals)
//!               ─run────────────▶ Verdict (valid / counterexample / ...)
//!               ─replay─────────▶ Confirmed / Spurious / Inconclusive
//! ```
//!
//! Transcendental functions (`sin`, `cos`, `atan`) and optionally `sqrt`
//! are handled by axiomatization: either as quantified SMT assertions or
//! as ground instances at the occurrences found in each goal.

pub mod axioms;
pub mod bench;
pub mod formula;
pub mod interp;
pub mod minif;
pub mod runner;
pub mod smt;
pub mod vcgen;
