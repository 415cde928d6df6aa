//! Surface syntax shared by plain and chunked definitions.

use std::fmt;

use corec_kernel::{BinaryOp, UnaryOp};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Nat(u64),
    Bool(bool),
    Var(String),
    Cons(Box<Expr>, Box<Expr>),
    Delay(Box<Expr>),
    End(Box<Expr>),
    Tail(Box<Expr>),
    Forget(Box<Expr>),
    Evens(Box<Expr>),
    ZipWith(BinaryOp, Box<Expr>, Box<Expr>),
    Map(UnaryOp, Box<Expr>),
    Interleave(Box<Expr>, Box<Expr>),
    Merge(Box<Expr>, Box<Expr>),
    /// A registered stream function applied to a stream.
    Apply(String, Box<Expr>),
}

impl Expr {
    /// Whether the expression uses a construct only chunked definitions have.
    pub fn uses_chunk_constructs(&self) -> bool {
        match self {
            Expr::Tail(_) | Expr::Forget(_) | Expr::End(_) | Expr::Evens(_) | Expr::Interleave(..) => true,
            Expr::Nat(_) | Expr::Bool(_) | Expr::Var(_) => false,
            Expr::Delay(e) | Expr::Map(_, e) | Expr::Apply(_, e) => e.uses_chunk_constructs(),
            Expr::Cons(a, b) | Expr::ZipWith(_, a, b) | Expr::Merge(a, b) => a.uses_chunk_constructs() || b.uses_chunk_constructs(),
        }
    }

    fn is_atom(&self) -> bool {
        matches!(self, Expr::Nat(_) | Expr::Bool(_) | Expr::Var(_))
    }
}

/// A chunk annotation on a signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Annotation {
    Bool(bool),
    Fixed(u64, u64),
    Pattern(Vec<u64>, Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub elem_type: String,
    pub annotation: Option<Annotation>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Def {
    pub name: String,
    pub signature: Option<Signature>,
    pub body: Expr,
}

/// Line and column, both counted from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SourceModule {
    pub defs: Vec<Def>,
    /// Where each definition starts, in step with `defs`.
    pub locations: Vec<Location>,
}

impl SourceModule {
    pub fn get(&self, name: &str) -> Option<&Def> {
        self.defs.iter().find(|d| d.name == name)
    }
}

struct Atomic<'a>(&'a Expr);

impl fmt::Display for Atomic<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_atom() {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

/// An operand of a prefix keyword or the head of `::`.
struct Applied<'a>(&'a Expr);

impl fmt::Display for Applied<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if matches!(self.0, Expr::Cons(..)) {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Nat(n) => write!(f, "{n}"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Var(x) => f.write_str(x),
            Expr::Cons(h, t) => write!(f, "{} :: {t}", Applied(h)),
            Expr::Delay(e) => write!(f, "delay {}", Applied(e)),
            Expr::End(e) => write!(f, "end {}", Applied(e)),
            Expr::Tail(e) => write!(f, "tail {}", Applied(e)),
            Expr::Forget(e) => write!(f, "forget {}", Applied(e)),
            Expr::Evens(e) => write!(f, "evens {}", Applied(e)),
            Expr::ZipWith(op, a, b) => write!(f, "zipWith {op} {} {}", Atomic(a), Atomic(b)),
            Expr::Map(op, a) => write!(f, "map {op} {}", Atomic(a)),
            Expr::Interleave(a, b) => write!(f, "interleave {} {}", Atomic(a), Atomic(b)),
            Expr::Merge(a, b) => write!(f, "merge {} {}", Atomic(a), Atomic(b)),
            Expr::Apply(g, a) => write!(f, "apply {g} {}", Atomic(a)),
        }
    }
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[u64]| xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        match self {
            Annotation::Bool(b) => write!(f, "@bool({b})"),
            Annotation::Fixed(m, n) => write!(f, "@({m},{n})"),
            Annotation::Pattern(p, q) => write!(f, "@pattern[{};{}]", join(p), join(q)),
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Stream {}", self.elem_type)?;
        if let Some(a) = &self.annotation {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Def {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "def {}", self.name)?;
        if let Some(sig) = &self.signature {
            write!(f, " : {sig}")?;
        }
        write!(f, " = {}", self.body)
    }
}

impl fmt::Display for SourceModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.defs {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}
