//! MiniF frontend: a strictfp-Java-like subset with JML-style contracts.
//!
//! Scalar types `double`/`float`/`bool`/`int`, record types with FP
//! fields, fixed-length `double[N]` arrays, while-loops with invariants.
//! All arithmetic is strictly typed and strictly IEEE-754; division is
//! total and never throws. The grammar is documented in
//! `docs/minif-grammar.md`.

pub mod ast;
mod lexer;
mod parser;
mod pretty;
pub mod token;
mod typecheck;
mod unroll;

pub use lexer::LexError;
pub use parser::{parse_program, ParseError};
pub use pretty::{print_expr, print_program};
pub use typecheck::{
    typecheck, MfType, TExpr, TExprKind, TStmt, TypeError, TypedContract, TypedMethod,
    TypedProgram,
};
pub use unroll::{contains_forall, unroll_spec_quantifiers, UnrollError};

/// Parse, typecheck, and unroll in one step.
pub fn load_program(source: &str) -> Result<TypedProgram, FrontendError> {
    let ast = parse_program(source).map_err(FrontendError::Parse)?;
    let typed = typecheck(&ast).map_err(FrontendError::Type)?;
    let unrolled = unroll_spec_quantifiers(&typed).map_err(FrontendError::Unroll)?;
    Ok(unrolled)
}

#[derive(Debug, thiserror::Error)]
pub enum FrontendError {
    #[error("parse errors: {}", format_errors(.0))]
    Parse(Vec<ParseError>),
    #[error("type errors: {}", format_errors(.0))]
    Type(Vec<TypeError>),
    #[error("{0}")]
    Unroll(UnrollError),
}

fn format_errors<E: std::fmt::Display>(errs: &[E]) -> String {
    errs.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
