//! Potentially infinite binary trees and their finite cuts.

use std::collections::VecDeque;
use std::fmt;

use crate::elem::EvalError;
use crate::stream::Colist;
use crate::susp::Susp;

/// A binary tree whose subtrees are produced on demand.
#[derive(Clone)]
pub enum InfTree<T> {
    Leaf,
    Node(Susp<InfTree<T>>, T, Susp<InfTree<T>>),
}

/// A fully evaluated binary tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FinTree<T> {
    Leaf,
    Node(Box<FinTree<T>>, T, Box<FinTree<T>>),
}

impl<T> FinTree<T> {
    pub fn node(l: FinTree<T>, x: T, r: FinTree<T>) -> Self {
        FinTree::Node(Box::new(l), x, Box::new(r))
    }

    pub fn size(&self) -> usize {
        match self {
            FinTree::Leaf => 0,
            FinTree::Node(l, _, r) => 1 + l.size() + r.size(),
        }
    }

    /// Number of node levels; a leaf has height 0.
    pub fn height(&self) -> usize {
        match self {
            FinTree::Leaf => 0,
            FinTree::Node(l, _, r) => 1 + l.height().max(r.height()),
        }
    }

    pub fn map<U>(&self, f: &mut impl FnMut(&T) -> U) -> FinTree<U> {
        match self {
            FinTree::Leaf => FinTree::Leaf,
            FinTree::Node(l, x, r) => {
                let l = l.map(f);
                let x = f(x);
                FinTree::node(l, x, r.map(f))
            }
        }
    }

    /// The same tree with every label replaced by `()`.
    pub fn shape(&self) -> FinTree<()> {
        self.map(&mut |_| ())
    }

    /// Labels in breadth-first order.
    pub fn level_order(&self) -> Vec<&T> {
        let mut out = Vec::new();
        let mut queue = VecDeque::from([self]);
        while let Some(t) = queue.pop_front() {
            if let FinTree::Node(l, x, r) = t {
                out.push(x);
                queue.push_back(l);
                queue.push_back(r);
            }
        }
        out
    }
}

impl<T: Clone + 'static> FinTree<T> {
    pub fn to_inf(&self) -> InfTree<T> {
        match self {
            FinTree::Leaf => InfTree::Leaf,
            FinTree::Node(l, x, r) => InfTree::Node(Susp::ready(l.to_inf()), x.clone(), Susp::ready(r.to_inf())),
        }
    }
}

impl<T: fmt::Display> fmt::Display for FinTree<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FinTree::Leaf => f.write_str("leaf"),
            FinTree::Node(l, x, r) => write!(f, "({l} {x} {r})"),
        }
    }
}

impl<T: Clone + 'static> InfTree<T> {
    /// The complete infinite tree with every node labelled `label`.
    pub fn full(label: T) -> Self {
        let l = label.clone();
        let sub = Susp::memo(move || Ok(InfTree::full(l.clone())));
        InfTree::Node(sub.clone(), label, sub)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, InfTree::Leaf)
    }
}

impl<T: fmt::Debug> fmt::Debug for InfTree<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfTree::Leaf => f.write_str("leaf"),
            InfTree::Node(_, x, _) => write!(f, "(<susp> {x:?} <susp>)"),
        }
    }
}

/// Level-order labels of `t`, produced lazily.
pub fn bfs_labels<T: Clone + 'static>(t: &InfTree<T>) -> Colist<T> {
    let mut queue = VecDeque::new();
    queue.push_back(Susp::ready(t.clone()));
    bfs_from(queue).unwrap_or(Colist::Nil)
}

fn bfs_from<T: Clone + 'static>(mut queue: VecDeque<Susp<InfTree<T>>>) -> Result<Colist<T>, EvalError> {
    while let Some(next) = queue.pop_front() {
        if let InfTree::Node(l, x, r) = next.force()? {
            queue.push_back(l);
            queue.push_back(r);
            let tail = Susp::memo(move || bfs_from(queue.clone()));
            return Ok(Colist::Cons(x, tail));
        }
    }
    Ok(Colist::Nil)
}

/// The cut of `t` at depth `d`: nodes below depth `d` become leaves.
/// Forces at most `2^d - 1` nodes.
pub fn tree_truncate<T: Clone + 'static>(t: &InfTree<T>, d: usize) -> Result<FinTree<T>, EvalError> {
    if d == 0 {
        return Ok(FinTree::Leaf);
    }
    match t {
        InfTree::Leaf => Ok(FinTree::Leaf),
        InfTree::Node(_, x, _) if d == 1 => Ok(FinTree::node(FinTree::Leaf, x.clone(), FinTree::Leaf)),
        InfTree::Node(l, x, r) => {
            let l = tree_truncate(&l.force()?, d - 1)?;
            let r = tree_truncate(&r.force()?, d - 1)?;
            Ok(FinTree::node(l, x.clone(), r))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;
    use std::rc::Rc;

    fn leaf() -> FinTree<char> {
        FinTree::Leaf
    }

    #[test]
    fn bfs_small_trees() {
        assert!(bfs_labels(&InfTree::<i64>::Leaf).is_nil());
        let single = FinTree::node(leaf(), 'x', leaf());
        assert_eq!(bfs_labels(&single.to_inf()).prefix(5), Ok(vec!['x']));
        let three = FinTree::node(FinTree::node(leaf(), 'a', leaf()), 'b', FinTree::node(leaf(), 'c', leaf()));
        assert_eq!(bfs_labels(&three.to_inf()).prefix(5), Ok(vec!['b', 'a', 'c']));
    }

    #[test]
    fn truncation() {
        let full = InfTree::full(1);
        assert_eq!(tree_truncate(&full, 0), Ok(FinTree::Leaf));
        assert_eq!(tree_truncate(&InfTree::<i64>::Leaf, 5), Ok(FinTree::Leaf));
        let one = || FinTree::node(FinTree::Leaf, 1, FinTree::Leaf);
        assert_eq!(tree_truncate(&full, 2), Ok(FinTree::node(one(), 1, one())));
    }

    fn counting_full(counter: Rc<Cell<usize>>) -> InfTree<u8> {
        counter.set(counter.get() + 1);
        let c = Rc::clone(&counter);
        let l = Susp::rerun(move || Ok(counting_full(Rc::clone(&c))));
        let c = Rc::clone(&counter);
        let r = Susp::rerun(move || Ok(counting_full(Rc::clone(&c))));
        InfTree::Node(l, 0, r)
    }

    #[test]
    fn truncation_forces_at_most_the_cut() {
        for d in 0..6 {
            let counter = Rc::new(Cell::new(0));
            let t = counting_full(Rc::clone(&counter));
            counter.set(0);
            let cut = tree_truncate(&t, d).unwrap();
            assert_eq!(cut.size(), (1usize << d) - 1);
            assert!(counter.get() < (1usize << d).max(1));
        }
    }

    #[test]
    fn bfs_of_infinite_tree_is_infinite() {
        let labels = bfs_labels(&InfTree::full(3)).prefix(100).unwrap();
        assert_eq!(labels.len(), 100);
    }

    #[test]
    fn display_literal() {
        let t = FinTree::node(FinTree::Leaf, 4, FinTree::node(FinTree::Leaf, 5, FinTree::Leaf));
        assert_eq!(t.to_string(), "(leaf 4 (leaf 5 leaf))");
        assert_eq!(t.height(), 2);
    }
}
