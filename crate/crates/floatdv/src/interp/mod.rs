//! Concrete IEEE-754 executor used as a differential-testing oracle,
//! precondition-directed falsifier, and counterexample replayer.

mod eval;
mod sample;
mod value;

pub use eval::{eval_method, eval_method_traced, eval_spec, EvalError, TraceEntry};
pub use sample::{
    falsify, falsify_sequential, random_inputs, Counterexample, SampleError,
};
pub use value::ConcreteValue;
