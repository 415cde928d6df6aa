use std::fmt;

use corec_kernel::{Elem, InfTree, Stream};

/// Types of atomic values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomKind {
    Elem,
    /// A whole host stream of elements, treated as one opaque value.
    ElemStream,
}

/// Codes for the types a program may denote.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UCode {
    Tree(Box<UCode>),
    Stream(Box<UCode>),
    Prod(Box<UCode>, Box<UCode>),
    Atom(AtomKind),
}

impl UCode {
    pub fn tree(a: UCode) -> Self {
        UCode::Tree(Box::new(a))
    }

    pub fn stream(a: UCode) -> Self {
        UCode::Stream(Box::new(a))
    }

    pub fn prod(a: UCode, b: UCode) -> Self {
        UCode::Prod(Box::new(a), Box::new(b))
    }

    /// The code of `lab`'s result: a relabelled tree and the unused labels.
    pub fn lab_result() -> Self {
        UCode::prod(UCode::tree(UCode::Atom(AtomKind::Elem)), UCode::label_source())
    }

    /// A stream of label streams, one per tree level.
    pub fn label_source() -> Self {
        UCode::stream(UCode::Atom(AtomKind::ElemStream))
    }
}

impl fmt::Display for UCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UCode::Tree(a) => write!(f, "tree {a}"),
            UCode::Stream(a) => write!(f, "stream {a}"),
            UCode::Prod(a, b) => write!(f, "({a} * {b})"),
            UCode::Atom(AtomKind::Elem) => write!(f, "elem"),
            UCode::Atom(AtomKind::ElemStream) => write!(f, "[stream elem]"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Atom {
    Elem(Elem),
    Stream(Stream<Elem>),
}

impl Atom {
    pub fn kind(&self) -> AtomKind {
        match self {
            Atom::Elem(_) => AtomKind::Elem,
            Atom::Stream(_) => AtomKind::ElemStream,
        }
    }
}

/// A decoded value.
#[derive(Clone, Debug)]
pub enum UValue {
    Tree(Box<InfTree<UValue>>),
    Stream(Box<Stream<UValue>>),
    Pair(Box<UValue>, Box<UValue>),
    Atom(Atom),
}

impl UValue {
    /// The code of this value, inspecting only what is already evaluated.
    /// Empty trees and unforced children cannot reveal their label code,
    /// so `hint` supplies it.
    pub fn code_with(&self, hint: &UCode) -> Option<UCode> {
        Some(match self {
            UValue::Atom(a) => UCode::Atom(a.kind()),
            UValue::Pair(a, b) => match hint {
                UCode::Prod(ha, hb) => UCode::prod(a.code_with(ha)?, b.code_with(hb)?),
                _ => return None,
            },
            UValue::Tree(t) => match (&**t, hint) {
                (InfTree::Leaf, UCode::Tree(_)) => hint.clone(),
                (InfTree::Node(_, x, _), UCode::Tree(h)) => UCode::tree(x.code_with(h)?),
                _ => return None,
            },
            UValue::Stream(s) => match hint {
                UCode::Stream(h) => UCode::stream(s.head().code_with(h)?),
                _ => return None,
            },
        })
    }

    pub fn as_elem(&self) -> Option<Elem> {
        match self {
            UValue::Atom(Atom::Elem(e)) => Some(*e),
            _ => None,
        }
    }
}
