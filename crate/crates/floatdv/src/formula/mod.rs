//! Sorted first-order formula IR over IEEE-754 sorts.
//!
//! Terms are immutable trees with `Arc`-shared children, well-sorted by
//! construction. Rounding is globally round-to-nearest-even, but every
//! rounded operation carries the mode explicitly so emitted SMT-LIB is
//! self-describing.

mod literal;
mod obligation;
mod subst;
mod term;

pub use literal::{encode_decimal, FpFormat, FpLiteral};
pub use obligation::{Occurrence, ProofObligation, Provenance};
pub use subst::substitute;
pub use term::{
    build_spec_predicate, BoolOp, FpBinOp, FpClass, FpCmpOp, IntBinOp, IntCmpOp, RoundingMode,
    Sort, SortError, Term, UninterpretedFn,
};
