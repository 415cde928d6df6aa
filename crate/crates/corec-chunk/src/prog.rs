use std::fmt;
use std::rc::Rc;

use corec_kernel::{BinaryOp, Elem, UnaryOp};
use corec_stream::Name;

/// A chunked stream program. Elements are produced in chunks; `EndChunk`
/// closes the current chunk and suspends the rest.
#[derive(Clone, PartialEq)]
pub enum ChunkProg {
    EndChunk(Delayed),
    /// Adds an element to the current chunk. The rest is not delayed.
    Cons(Elem, Rc<ChunkProg>),
    Tail(Rc<ChunkProg>),
    /// Drops the knowledge that the current chunk is nonempty.
    Forget(Rc<ChunkProg>),
    ZipWith(BinaryOp, Rc<ChunkProg>, Rc<ChunkProg>),
    Map(UnaryOp, Rc<ChunkProg>),
    /// Elements at positions 0, 2, 4, ...
    Evens(Rc<ChunkProg>),
    /// Elements at positions 1, 3, 5, ... Arises while evaluating `Evens`.
    Odds(Rc<ChunkProg>),
    Interleave(Rc<ChunkProg>, Rc<ChunkProg>),
    Ref(Name),
    /// The program after `index` chunk boundaries of a definition, cached
    /// per session.
    Unfolded(Name, usize),
}

#[derive(Clone, PartialEq)]
pub struct Delayed(pub Rc<ChunkProg>);

impl ChunkProg {
    pub fn end(rest: ChunkProg) -> Self {
        ChunkProg::EndChunk(Delayed(Rc::new(rest)))
    }

    pub fn cons(head: impl Into<Elem>, rest: ChunkProg) -> Self {
        ChunkProg::Cons(head.into(), Rc::new(rest))
    }

    pub fn tail(p: ChunkProg) -> Self {
        ChunkProg::Tail(Rc::new(p))
    }

    pub fn forget(p: ChunkProg) -> Self {
        ChunkProg::Forget(Rc::new(p))
    }

    pub fn zip_with(op: BinaryOp, l: ChunkProg, r: ChunkProg) -> Self {
        ChunkProg::ZipWith(op, Rc::new(l), Rc::new(r))
    }

    pub fn map(op: UnaryOp, p: ChunkProg) -> Self {
        ChunkProg::Map(op, Rc::new(p))
    }

    pub fn evens(p: ChunkProg) -> Self {
        ChunkProg::Evens(Rc::new(p))
    }

    pub fn interleave(l: ChunkProg, r: ChunkProg) -> Self {
        ChunkProg::Interleave(Rc::new(l), Rc::new(r))
    }

    pub fn reference(name: &str) -> Self {
        ChunkProg::Ref(Name::new(name))
    }

    /// `xs` followed by `rest` inside the same chunk.
    pub fn prepend(xs: &[Elem], rest: Rc<ChunkProg>) -> Rc<ChunkProg> {
        xs.iter().rev().fold(rest, |acc, &x| Rc::new(ChunkProg::Cons(x, acc)))
    }

    /// The same program with every `Forget` removed.
    pub fn erase_forget(&self) -> ChunkProg {
        let go = |p: &Rc<ChunkProg>| Rc::new(p.erase_forget());
        match self {
            ChunkProg::Forget(p) => p.erase_forget(),
            ChunkProg::EndChunk(Delayed(p)) => ChunkProg::EndChunk(Delayed(go(p))),
            ChunkProg::Cons(h, p) => ChunkProg::Cons(*h, go(p)),
            ChunkProg::Tail(p) => ChunkProg::Tail(go(p)),
            ChunkProg::ZipWith(op, a, b) => ChunkProg::ZipWith(*op, go(a), go(b)),
            ChunkProg::Map(op, p) => ChunkProg::Map(*op, go(p)),
            ChunkProg::Evens(p) => ChunkProg::Evens(go(p)),
            ChunkProg::Odds(p) => ChunkProg::Odds(go(p)),
            ChunkProg::Interleave(a, b) => ChunkProg::Interleave(go(a), go(b)),
            ChunkProg::Ref(_) | ChunkProg::Unfolded(..) => self.clone(),
        }
    }
}

/// One whole chunk: its elements and the suspended rest.
#[derive(Clone, Debug, PartialEq)]
pub enum ChunkWhnf {
    Cons(Elem, Box<ChunkWhnf>),
    EndChunk(Rc<ChunkProg>),
}

impl ChunkWhnf {
    pub fn from_parts(elems: &[Elem], rest: Rc<ChunkProg>) -> Self {
        elems.iter().rev().fold(ChunkWhnf::EndChunk(rest), |acc, &x| ChunkWhnf::Cons(x, Box::new(acc)))
    }

    pub fn into_parts(self) -> (Vec<Elem>, Rc<ChunkProg>) {
        let mut elems = Vec::new();
        let mut w = self;
        loop {
            match w {
                ChunkWhnf::Cons(x, rest) => {
                    elems.push(x);
                    w = *rest;
                }
                ChunkWhnf::EndChunk(q) => return (elems, q),
            }
        }
    }
}

impl fmt::Display for ChunkProg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChunkProg::EndChunk(Delayed(p)) => write!(f, "end delay {}", Atom(p)),
            ChunkProg::Cons(h, p) => match **p {
                ChunkProg::Cons(..) | ChunkProg::EndChunk(_) => write!(f, "{h} :: {p}"),
                _ => write!(f, "{h} :: {}", Atom(p)),
            },
            ChunkProg::Tail(p) => write!(f, "tail {}", Atom(p)),
            ChunkProg::Forget(p) => write!(f, "forget {}", Atom(p)),
            ChunkProg::ZipWith(op, a, b) => write!(f, "zipWith {op} {} {}", Atom(a), Atom(b)),
            ChunkProg::Map(op, p) => write!(f, "map {op} {}", Atom(p)),
            ChunkProg::Evens(p) => write!(f, "evens {}", Atom(p)),
            ChunkProg::Odds(p) => write!(f, "odds {}", Atom(p)),
            ChunkProg::Interleave(a, b) => write!(f, "interleave {} {}", Atom(a), Atom(b)),
            ChunkProg::Ref(n) => write!(f, "{n}"),
            ChunkProg::Unfolded(n, k) => write!(f, "{n}#{k}"),
        }
    }
}

impl fmt::Debug for ChunkProg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for Delayed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "delay {}", Atom(&self.0))
    }
}

struct Atom<'a>(&'a ChunkProg);

impl fmt::Display for Atom<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            ChunkProg::Ref(_) | ChunkProg::Unfolded(..) => write!(f, "{}", self.0),
            other => write!(f, "({other})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ChunkProg as C;

    #[test]
    fn display() {
        let nats2 = C::cons(0, C::cons(1, C::end(C::map(UnaryOp::Suc, C::reference("nats2")))));
        assert_eq!(nats2.to_string(), "0 :: 1 :: end delay (map suc nats2)");
        let bad = C::tail(C::cons(0, C::end(C::reference("bad"))));
        assert_eq!(bad.to_string(), "tail (0 :: end delay bad)");
    }

    #[test]
    fn whnf_parts_round_trip() {
        let rest = Rc::new(C::reference("r"));
        let w = ChunkWhnf::from_parts(&[Elem::Int(3), Elem::Int(4)], Rc::clone(&rest));
        assert_eq!(w.clone().into_parts(), (vec![Elem::Int(3), Elem::Int(4)], rest));
        assert_eq!(
            w,
            ChunkWhnf::Cons(
                Elem::Int(3),
                Box::new(ChunkWhnf::Cons(Elem::Int(4), Box::new(ChunkWhnf::EndChunk(Rc::new(C::reference("r"))))))
            )
        );
    }

    #[test]
    fn forget_erasure() {
        let p = C::zip_with(BinaryOp::Add, C::forget(C::reference("fib")), C::tail(C::reference("fib")));
        assert_eq!(p.erase_forget(), C::zip_with(BinaryOp::Add, C::reference("fib"), C::tail(C::reference("fib"))));
    }
}
