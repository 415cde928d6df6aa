use std::fmt;
use std::rc::Rc;

use corec_kernel::{BinaryOp, Elem, Stream, UnaryOp};

use crate::name::Name;

/// A stream program.
#[derive(Clone)]
pub enum StreamProg {
    Cons(Elem, Delayed),
    ZipWith(BinaryOp, Rc<StreamProg>, Rc<StreamProg>),
    Map(UnaryOp, Rc<StreamProg>),
    /// Ordered merge of two increasing streams, dropping duplicates.
    Merge(Rc<StreamProg>, Rc<StreamProg>),
    /// Application of a function registered in the environment.
    UserFun(Name, Rc<StreamProg>),
    /// A host stream seen as a program.
    Embed(Stream<Elem>),
    Ref(Name),
    /// The `index`-th tail of a definition. Only produced by memoized
    /// evaluation, where these positions are cached.
    Unfolded(Name, usize),
}

/// A delayed position: the program inside is not evaluated when the
/// surrounding program is brought to weak head normal form.
#[derive(Clone, PartialEq)]
pub struct Delayed(pub Rc<StreamProg>);

impl Delayed {
    pub fn new(p: StreamProg) -> Self {
        Delayed(Rc::new(p))
    }
}

/// A weak head normal form: an element and an unevaluated tail program.
#[derive(Clone, Debug, PartialEq)]
pub struct StreamWhnf {
    pub head: Elem,
    pub tail: Rc<StreamProg>,
}

impl StreamWhnf {
    pub fn new(head: Elem, tail: StreamProg) -> Self {
        StreamWhnf { head, tail: Rc::new(tail) }
    }
}

impl StreamProg {
    pub fn cons(head: impl Into<Elem>, tail: StreamProg) -> Self {
        StreamProg::Cons(head.into(), Delayed::new(tail))
    }

    pub fn zip_with(op: BinaryOp, l: StreamProg, r: StreamProg) -> Self {
        StreamProg::ZipWith(op, Rc::new(l), Rc::new(r))
    }

    pub fn map(op: UnaryOp, p: StreamProg) -> Self {
        StreamProg::Map(op, Rc::new(p))
    }

    pub fn merge(l: StreamProg, r: StreamProg) -> Self {
        StreamProg::Merge(Rc::new(l), Rc::new(r))
    }

    pub fn user_fun(name: &str, p: StreamProg) -> Self {
        StreamProg::UserFun(Name::new(name), Rc::new(p))
    }

    pub fn reference(name: &str) -> Self {
        StreamProg::Ref(Name::new(name))
    }

    /// Number of nodes, not counting the contents of embedded streams.
    pub fn size(&self) -> usize {
        match self {
            StreamProg::Cons(_, Delayed(t)) => 1 + t.size(),
            StreamProg::ZipWith(_, a, b) | StreamProg::Merge(a, b) => 1 + a.size() + b.size(),
            StreamProg::Map(_, a) | StreamProg::UserFun(_, a) => 1 + a.size(),
            StreamProg::Embed(_) | StreamProg::Ref(_) | StreamProg::Unfolded(..) => 1,
        }
    }

    /// Replaces every `Ref(name)` by `with`.
    pub fn substitute(&self, name: &Name, with: &StreamProg) -> StreamProg {
        let sub = |p: &Rc<StreamProg>| Rc::new(p.substitute(name, with));
        match self {
            StreamProg::Ref(n) if n == name => with.clone(),
            StreamProg::Cons(h, Delayed(t)) => StreamProg::Cons(*h, Delayed(sub(t))),
            StreamProg::ZipWith(op, a, b) => StreamProg::ZipWith(*op, sub(a), sub(b)),
            StreamProg::Map(op, a) => StreamProg::Map(*op, sub(a)),
            StreamProg::Merge(a, b) => StreamProg::Merge(sub(a), sub(b)),
            StreamProg::UserFun(f, a) => StreamProg::UserFun(f.clone(), sub(a)),
            StreamProg::Embed(_) | StreamProg::Ref(_) | StreamProg::Unfolded(..) => self.clone(),
        }
    }

    /// Names referenced anywhere in the program.
    pub fn references(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs(&self, out: &mut Vec<Name>) {
        match self {
            StreamProg::Ref(n) | StreamProg::Unfolded(n, _) => out.push(n.clone()),
            StreamProg::Cons(_, Delayed(t)) => t.collect_refs(out),
            StreamProg::ZipWith(_, a, b) | StreamProg::Merge(a, b) => {
                a.collect_refs(out);
                b.collect_refs(out);
            }
            StreamProg::Map(_, a) | StreamProg::UserFun(_, a) => a.collect_refs(out),
            StreamProg::Embed(_) => {}
        }
    }
}

thread_local! {
    static PLACEHOLDER: Rc<StreamProg> = Rc::new(StreamProg::Ref(Name::new("")));
}

/// Long chains of nested applications arise from rules such as
/// `f (x :: xs) = x :: f (f xs)`, so programs are freed without recursion.
impl Drop for StreamProg {
    fn drop(&mut self) {
        let mut pending = Vec::new();
        self.detach_children(&mut pending);
        while let Some(child) = pending.pop() {
            if let Ok(mut p) = Rc::try_unwrap(child) {
                p.detach_children(&mut pending);
            }
        }
    }
}

impl StreamProg {
    fn detach_children(&mut self, out: &mut Vec<Rc<StreamProg>>) {
        let Ok(placeholder) = PLACEHOLDER.try_with(Rc::clone) else { return };
        let mut take = |slot: &mut Rc<StreamProg>| {
            if Rc::strong_count(slot) == 1 {
                out.push(std::mem::replace(slot, Rc::clone(&placeholder)));
            }
        };
        match self {
            StreamProg::Cons(_, Delayed(t)) => take(t),
            StreamProg::ZipWith(_, a, b) | StreamProg::Merge(a, b) => {
                take(a);
                take(b);
            }
            StreamProg::Map(_, a) | StreamProg::UserFun(_, a) => take(a),
            StreamProg::Embed(_) | StreamProg::Ref(_) | StreamProg::Unfolded(..) => {}
        }
    }
}

impl PartialEq for StreamProg {
    fn eq(&self, other: &Self) -> bool {
        use StreamProg::*;
        match (self, other) {
            (Cons(h1, t1), Cons(h2, t2)) => h1 == h2 && t1 == t2,
            (ZipWith(o1, a1, b1), ZipWith(o2, a2, b2)) => o1 == o2 && a1 == a2 && b1 == b2,
            (Map(o1, a1), Map(o2, a2)) => o1 == o2 && a1 == a2,
            (Merge(a1, b1), Merge(a2, b2)) => a1 == a2 && b1 == b2,
            (UserFun(f1, a1), UserFun(f2, a2)) => f1 == f2 && a1 == a2,
            (Embed(s1), Embed(s2)) => s1.head() == s2.head() && Stream::same_cell(s1, s2),
            (Ref(n1), Ref(n2)) => n1 == n2,
            (Unfolded(n1, i1), Unfolded(n2, i2)) => n1 == n2 && i1 == i2,
            _ => false,
        }
    }
}

impl fmt::Display for StreamProg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StreamProg::Cons(h, Delayed(t)) => write!(f, "{h} :: delay {}", Atom(t)),
            StreamProg::ZipWith(op, a, b) => write!(f, "zipWith {op} {} {}", Atom(a), Atom(b)),
            StreamProg::Map(op, a) => write!(f, "map {op} {}", Atom(a)),
            StreamProg::Merge(a, b) => write!(f, "merge {} {}", Atom(a), Atom(b)),
            StreamProg::UserFun(name, a) => write!(f, "{name} {}", Atom(a)),
            StreamProg::Embed(s) => write!(f, "<embedded {} ..>", s.head()),
            StreamProg::Ref(n) => write!(f, "{n}"),
            StreamProg::Unfolded(n, i) => write!(f, "{n}#{i}"),
        }
    }
}

impl fmt::Debug for StreamProg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for Delayed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "delay {}", Atom(&self.0))
    }
}

/// Parenthesises compound programs.
struct Atom<'a>(&'a StreamProg);

impl fmt::Display for Atom<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            StreamProg::Ref(_) | StreamProg::Unfolded(..) | StreamProg::Embed(_) => write!(f, "{}", self.0),
            other => write!(f, "({other})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_size() {
        let fib = StreamProg::cons(
            0,
            StreamProg::zip_with(BinaryOp::Add, StreamProg::reference("fib"), StreamProg::cons(1, StreamProg::reference("fib"))),
        );
        assert_eq!(fib.to_string(), "0 :: delay (zipWith add fib (1 :: delay fib))");
        assert_eq!(fib.size(), 5);
        assert_eq!(fib.references().len(), 2);
    }

    #[test]
    fn substitution() {
        let p = StreamProg::map(UnaryOp::Suc, StreamProg::reference("x"));
        let q = p.substitute(&Name::new("x"), &StreamProg::reference("y"));
        assert_eq!(q, StreamProg::map(UnaryOp::Suc, StreamProg::reference("y")));
    }
}
