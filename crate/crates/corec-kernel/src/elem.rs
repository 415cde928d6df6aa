//! Stream elements and the fixed registry of element operators.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Integer elements.
pub type Int = i128;

/// A stream element: a 128-bit signed integer or a boolean.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Int(Int),
    Bool(bool),
}

impl Elem {
    pub fn as_int(self, op: &'static str) -> Result<Int, EvalError> {
        match self {
            Elem::Int(n) => Ok(n),
            Elem::Bool(_) => Err(EvalError::TypeMismatch { op, expected: "integer", found: self }),
        }
    }

    pub fn as_bool(self, op: &'static str) -> Result<bool, EvalError> {
        match self {
            Elem::Bool(b) => Ok(b),
            Elem::Int(_) => Err(EvalError::TypeMismatch { op, expected: "boolean", found: self }),
        }
    }
}

impl From<i64> for Elem {
    fn from(n: i64) -> Self {
        Elem::Int(n.into())
    }
}

impl From<bool> for Elem {
    fn from(b: bool) -> Self {
        Elem::Bool(b)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Int(n) => write!(f, "{n}"),
            Elem::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Failures raised while computing elements or forcing suspensions.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("integer overflow in {op}")]
    Overflow { op: &'static str },
    #[error("{op} expects an {expected} argument, found {found}")]
    TypeMismatch { op: &'static str, expected: &'static str, found: Elem },
    #[error("fuel exhausted after {steps} steps")]
    FuelExhausted { steps: u64 },
    #[error("an element was demanded from an empty chunk")]
    EmptyChunkDemand,
    #[error("evaluation stuck: {0}")]
    Stuck(String),
}

/// Unary element operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Suc,
    Not,
    Id,
    /// Multiply by a constant.
    Scale(i64),
    /// Add a constant.
    Offset(i64),
}

impl UnaryOp {
    pub fn apply(self, x: Elem) -> Result<Elem, EvalError> {
        match self {
            UnaryOp::Suc => checked(x.as_int("suc")?.checked_add(1), "suc"),
            UnaryOp::Not => Ok(Elem::Bool(!x.as_bool("not")?)),
            UnaryOp::Id => Ok(x),
            UnaryOp::Scale(k) => checked(x.as_int("times")?.checked_mul(k.into()), "times"),
            UnaryOp::Offset(k) => checked(x.as_int("plus")?.checked_add(k.into()), "plus"),
        }
    }
}

impl fmt::Display for UnaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnaryOp::Suc => f.write_str("suc"),
            UnaryOp::Not => f.write_str("not"),
            UnaryOp::Id => f.write_str("id"),
            UnaryOp::Scale(k) => write!(f, "times{k}"),
            UnaryOp::Offset(k) => write!(f, "plus{k}"),
        }
    }
}

impl FromStr for UnaryOp {
    type Err = UnknownOp;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let op = match s {
            "suc" => UnaryOp::Suc,
            "not" => UnaryOp::Not,
            "id" => UnaryOp::Id,
            "double" => UnaryOp::Scale(2),
            _ => {
                if let Some(k) = s.strip_prefix("times").and_then(|k| k.parse().ok()) {
                    UnaryOp::Scale(k)
                } else if let Some(k) = s.strip_prefix("plus").and_then(|k| k.parse().ok()) {
                    UnaryOp::Offset(k)
                } else {
                    return Err(UnknownOp(s.to_string()));
                }
            }
        };
        Ok(op)
    }
}

/// Binary element operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Max,
    Min,
}

impl BinaryOp {
    pub fn apply(self, x: Elem, y: Elem) -> Result<Elem, EvalError> {
        let name = self.name();
        let (a, b) = (x.as_int(name)?, y.as_int(name)?);
        match self {
            BinaryOp::Add => checked(a.checked_add(b), name),
            BinaryOp::Sub => checked(a.checked_sub(b), name),
            BinaryOp::Mul => checked(a.checked_mul(b), name),
            BinaryOp::Max => Ok(Elem::Int(a.max(b))),
            BinaryOp::Min => Ok(Elem::Int(a.min(b))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BinaryOp::Add => "add",
            BinaryOp::Sub => "sub",
            BinaryOp::Mul => "mul",
            BinaryOp::Max => "max",
            BinaryOp::Min => "min",
        }
    }
}

impl fmt::Display for BinaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BinaryOp {
    type Err = UnknownOp;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "add" | "+" => Ok(BinaryOp::Add),
            "sub" | "-" => Ok(BinaryOp::Sub),
            "mul" | "*" => Ok(BinaryOp::Mul),
            "max" => Ok(BinaryOp::Max),
            "min" => Ok(BinaryOp::Min),
            _ => Err(UnknownOp(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown operator `{0}`")]
pub struct UnknownOp(pub String);

fn checked(v: Option<Int>, op: &'static str) -> Result<Elem, EvalError> {
    v.map(Elem::Int).ok_or(EvalError::Overflow { op })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_is_an_error() {
        let max = Elem::Int(Int::MAX);
        assert_eq!(UnaryOp::Suc.apply(max), Err(EvalError::Overflow { op: "suc" }));
        assert!(BinaryOp::Add.apply(max, Elem::Int(1)).is_err());
        assert_eq!(BinaryOp::Max.apply(Elem::Int(1), Elem::Int(7)), Ok(Elem::Int(7)));
    }

    #[test]
    fn names_round_trip() {
        for op in [UnaryOp::Suc, UnaryOp::Not, UnaryOp::Id, UnaryOp::Scale(3), UnaryOp::Offset(-2)] {
            assert_eq!(op.to_string().parse::<UnaryOp>(), Ok(op));
        }
        assert_eq!("double".parse::<UnaryOp>(), Ok(UnaryOp::Scale(2)));
        for op in [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Max, BinaryOp::Min] {
            assert_eq!(op.to_string().parse::<BinaryOp>(), Ok(op));
        }
    }

    #[test]
    fn type_errors() {
        assert!(UnaryOp::Not.apply(Elem::Int(0)).is_err());
        assert_eq!(UnaryOp::Not.apply(Elem::Bool(false)), Ok(Elem::Bool(true)));
        assert!(BinaryOp::Add.apply(Elem::Bool(true), Elem::Int(1)).is_err());
    }
}
