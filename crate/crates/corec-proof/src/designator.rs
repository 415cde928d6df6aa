use std::fmt;
use std::rc::Rc;

use corec_kernel::{Elem, Stream};
use corec_stream::{embed_stream, whnf, DefEnv, EvalSession, StreamProg};

use crate::error::ProofError;

/// Names a stream that proofs talk about.
///
/// Two designators are the same when they are the same program (so
/// definition names compare by name) or the same position of the same
/// named host stream.
#[derive(Clone)]
pub enum Designator {
    Prog(Rc<StreamProg>),
    Host { name: Rc<str>, offset: usize, stream: Stream<Elem> },
}

impl Designator {
    pub fn prog(p: StreamProg) -> Self {
        Designator::Prog(Rc::new(p))
    }

    /// A reference to a stream definition.
    pub fn def(name: &str) -> Self {
        Designator::prog(StreamProg::reference(name))
    }

    pub fn host(name: &str, stream: Stream<Elem>) -> Self {
        Designator::Host { name: name.into(), offset: 0, stream }
    }

    /// The head and the designator of the tail.
    pub fn observe(&self, env: &DefEnv, sess: &EvalSession) -> Result<(Elem, Designator), ProofError> {
        match self {
            Designator::Prog(p) => {
                let w = whnf(p, env, sess)?;
                Ok((w.head, Designator::Prog(w.tail)))
            }
            Designator::Host { name, offset, stream } => {
                let next = Designator::Host { name: Rc::clone(name), offset: offset + 1, stream: stream.tail()? };
                Ok((*stream.head(), next))
            }
        }
    }

    /// The designated stream as a program.
    pub fn to_prog(&self) -> StreamProg {
        match self {
            Designator::Prog(p) => (**p).clone(),
            Designator::Host { stream, .. } => embed_stream(stream.clone()),
        }
    }
}

impl PartialEq for Designator {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Designator::Prog(a), Designator::Prog(b)) => a == b,
            (Designator::Host { name: a, offset: i, .. }, Designator::Host { name: b, offset: j, .. }) => a == b && i == j,
            _ => false,
        }
    }
}

impl fmt::Display for Designator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Designator::Prog(p) => write!(f, "{p}"),
            Designator::Host { name, offset: 0, .. } => write!(f, "{name}"),
            Designator::Host { name, offset, .. } => write!(f, "{name}#{offset}"),
        }
    }
}

impl fmt::Debug for Designator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
