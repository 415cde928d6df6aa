use std::fmt;
use std::rc::Rc;

use corec_kernel::{Elem, InfTree, Stream};
use corec_stream::Name;
use thiserror::Error;

use crate::code::{Atom, AtomKind, UCode};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("code mismatch in {context}: expected {expected}, found {found}")]
pub struct CodeMismatch {
    pub context: &'static str,
    pub expected: String,
    pub found: UCode,
}

#[derive(Clone)]
pub(crate) enum ProgNode {
    Done(UWhnf),
    Fst(UProg),
    Snd(UProg),
    Lab(InfTree<Elem>, UProg),
    Ref(Name),
}

/// A program denoting a value of its code. Cloning shares the node, and
/// evaluation results are cached per shared node.
#[derive(Clone)]
pub struct UProg(pub(crate) Rc<(UCode, ProgNode)>);

/// A position the surrounding weak head normal form does not evaluate.
#[derive(Clone, Debug)]
pub struct Delayed(pub UProg);

#[derive(Clone, Debug)]
pub enum WhnfNode {
    Leaf,
    Node(Delayed, Box<UWhnf>, Delayed),
    Cons(Box<UWhnf>, Delayed),
    Pair(Box<UWhnf>, Box<UWhnf>),
    Atom(Atom),
}

/// A weak head normal form together with its code.
#[derive(Clone, Debug)]
pub struct UWhnf {
    code: UCode,
    node: WhnfNode,
}

fn expect(context: &'static str, expected: impl fmt::Display, found: &UCode, ok: bool) -> Result<(), CodeMismatch> {
    if ok {
        Ok(())
    } else {
        Err(CodeMismatch { context, expected: expected.to_string(), found: found.clone() })
    }
}

impl UWhnf {
    pub fn code(&self) -> &UCode {
        &self.code
    }

    pub fn node(&self) -> &WhnfNode {
        &self.node
    }

    pub fn into_node(self) -> WhnfNode {
        self.node
    }

    /// The empty tree with labels of code `label`.
    pub fn leaf(label: UCode) -> Self {
        UWhnf { code: UCode::tree(label), node: WhnfNode::Leaf }
    }

    pub fn node_of(l: UProg, x: UWhnf, r: UProg) -> Result<Self, CodeMismatch> {
        let code = UCode::tree(x.code.clone());
        expect("node", &code, l.code(), *l.code() == code)?;
        expect("node", &code, r.code(), *r.code() == code)?;
        Ok(UWhnf { code, node: WhnfNode::Node(Delayed(l), Box::new(x), Delayed(r)) })
    }

    pub fn cons(h: UWhnf, t: UProg) -> Result<Self, CodeMismatch> {
        let code = UCode::stream(h.code.clone());
        expect("cons", &code, t.code(), *t.code() == code)?;
        Ok(UWhnf { code, node: WhnfNode::Cons(Box::new(h), Delayed(t)) })
    }

    pub fn pair(a: UWhnf, b: UWhnf) -> Self {
        UWhnf { code: UCode::prod(a.code.clone(), b.code.clone()), node: WhnfNode::Pair(Box::new(a), Box::new(b)) }
    }

    pub fn atom(v: Atom) -> Self {
        UWhnf { code: UCode::Atom(v.kind()), node: WhnfNode::Atom(v) }
    }

    pub fn elem(e: impl Into<Elem>) -> Self {
        UWhnf::atom(Atom::Elem(e.into()))
    }

    pub fn elem_stream(s: Stream<Elem>) -> Self {
        UWhnf::atom(Atom::Stream(s))
    }
}

impl UProg {
    fn make(code: UCode, node: ProgNode) -> Self {
        UProg(Rc::new((code, node)))
    }

    pub fn code(&self) -> &UCode {
        &self.0 .0
    }

    pub(crate) fn node(&self) -> &ProgNode {
        &self.0 .1
    }

    /// Identity of the shared node.
    pub(crate) fn key(&self) -> *const () {
        Rc::as_ptr(&self.0) as *const ()
    }

    pub fn done(w: UWhnf) -> Self {
        UProg::make(w.code.clone(), ProgNode::Done(w))
    }

    pub fn fst(p: UProg) -> Result<Self, CodeMismatch> {
        match p.code().clone() {
            UCode::Prod(a, _) => Ok(UProg::make(*a, ProgNode::Fst(p))),
            other => Err(CodeMismatch { context: "fst", expected: "a product".into(), found: other }),
        }
    }

    pub fn snd(p: UProg) -> Result<Self, CodeMismatch> {
        match p.code().clone() {
            UCode::Prod(_, b) => Ok(UProg::make(*b, ProgNode::Snd(p))),
            other => Err(CodeMismatch { context: "snd", expected: "a product".into(), found: other }),
        }
    }

    /// Relabels `tree` breadth first, level `i` taking labels from the
    /// `i`-th stream of `labels`.
    pub fn lab(tree: InfTree<Elem>, labels: UProg) -> Result<Self, CodeMismatch> {
        let want = UCode::label_source();
        expect("lab", &want, labels.code(), *labels.code() == want)?;
        Ok(UProg::make(UCode::lab_result(), ProgNode::Lab(tree, labels)))
    }

    /// A reference to a definition of the given code.
    pub fn reference(name: &str, code: UCode) -> Self {
        UProg::make(code, ProgNode::Ref(Name::new(name)))
    }
}

impl fmt::Debug for UProg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            ProgNode::Done(w) => write!(f, "done({:?})", w.node),
            ProgNode::Fst(p) => write!(f, "fst({p:?})"),
            ProgNode::Snd(p) => write!(f, "snd({p:?})"),
            ProgNode::Lab(t, p) => write!(f, "lab({}, {p:?})", if t.is_leaf() { "leaf" } else { "node" }),
            ProgNode::Ref(n) => write!(f, "{n}"),
        }
    }
}

impl AtomKind {
    pub fn code(self) -> UCode {
        UCode::Atom(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_respect_codes() {
        let one = UWhnf::elem(1);
        assert_eq!(one.code(), &UCode::Atom(AtomKind::Elem));
        let p = UProg::done(UWhnf::pair(UWhnf::elem(1), UWhnf::elem(2)));
        assert_eq!(UProg::fst(p.clone()).unwrap().code(), &AtomKind::Elem.code());
        let err = UProg::fst(UProg::done(one.clone())).unwrap_err();
        assert_eq!(err.context, "fst");
        let bad_tail = UProg::done(UWhnf::elem(2));
        assert!(UWhnf::cons(one, bad_tail).is_err());
        assert!(UProg::lab(InfTree::Leaf, p).is_err());
    }

    #[test]
    fn node_children_share_the_label_code() {
        let leaf = UProg::done(UWhnf::leaf(AtomKind::Elem.code()));
        let n = UWhnf::node_of(leaf.clone(), UWhnf::elem(3), leaf).unwrap();
        assert_eq!(n.code(), &UCode::tree(AtomKind::Elem.code()));
        let wrong = UProg::done(UWhnf::leaf(AtomKind::ElemStream.code()));
        assert!(UWhnf::node_of(wrong, UWhnf::elem(3), UProg::done(UWhnf::leaf(AtomKind::Elem.code()))).is_err());
    }
}
