//! SMT-LIB 2 emission: proof obligations become refutation queries
//! (hypotheses asserted, goal negated; unsat means valid) with bit-exact
//! FP literals, a selectable treatment for transcendentals and sqrt, and
//! an optional pack of synthetic quantified background axioms emulating a
//! heap-aware translation.

mod emit;
mod literal_text;

pub use emit::{emit_smt, EmitOptions, SmtDocument, SqrtMode, TransMode};
pub use literal_text::{format_fp_literal, parse_fp_literal};
