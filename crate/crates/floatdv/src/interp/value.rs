//! Concrete runtime values. FP values are carried as raw bit patterns so
//! NaN payloads and zero signs survive round trips.

use crate::minif::MfType;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum ConcreteValue {
    F64(u64),
    F32(u32),
    Bool(bool),
    Int(i64),
    /// Record values carry their field values in declaration order.
    Record(String, Vec<ConcreteValue>),
    Array(Vec<ConcreteValue>),
}

impl ConcreteValue {
    pub fn f64(v: f64) -> Self {
        ConcreteValue::F64(v.to_bits())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ConcreteValue::F64(b) => Some(f64::from_bits(*b)),
            _ => None,
        }
    }

    pub fn matches_type(&self, ty: &MfType) -> bool {
        match (self, ty) {
            (ConcreteValue::F64(_), MfType::Double) => true,
            (ConcreteValue::F32(_), MfType::Float) => true,
            (ConcreteValue::Bool(_), MfType::Bool) => true,
            (ConcreteValue::Int(_), MfType::Int) => true,
            (ConcreteValue::Record(n, _), MfType::Record(m)) => n == m,
            (ConcreteValue::Array(vs), MfType::Array(n)) => vs.len() == *n,
            _ => false,
        }
    }
}

impl fmt::Display for ConcreteValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConcreteValue::F64(b) => write!(f, "{:?} (0x{:016x})", f64::from_bits(*b), b),
            ConcreteValue::F32(b) => write!(f, "{:?}f (0x{:08x})", f32::from_bits(*b), b),
            ConcreteValue::Bool(b) => write!(f, "{b}"),
            ConcreteValue::Int(i) => write!(f, "{i}"),
            ConcreteValue::Record(name, fields) => {
                write!(f, "{name}(")?;
                for (i, v) in fields.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
            ConcreteValue::Array(vs) => {
                write!(f, "[")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
        }
    }
}
