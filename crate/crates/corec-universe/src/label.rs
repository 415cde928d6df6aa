//! Circular breadth-first relabelling of trees.

use std::rc::Rc;

use corec_kernel::{bfs_labels, take_prefix, tree_truncate, Elem, EvalError, FinTree, InfTree, Stream, Susp};

use crate::code::{UCode, UValue};
use crate::eval::{interpret_u, UEnv, UError, USession};
use crate::prog::{UProg, UWhnf};

const KNOT: &str = "label'";

/// `label' t bs`, the relabelled tree paired with the unused label streams.
/// The level streams feed back into themselves: the first is `bs`, each
/// following one is what the previous level left over. Returns the
/// program together with the environment holding its knot.
pub fn label_prime(t: &InfTree<Elem>, bs: &Stream<Elem>) -> Result<(UProg, UEnv), UError> {
    let knot = UProg::reference(KNOT, UCode::lab_result());
    let levels = UWhnf::cons(UWhnf::elem_stream(bs.clone()), UProg::snd(knot.clone())?)?;
    let body = UProg::lab(t.clone(), UProg::done(levels))?;
    let mut env = UEnv::new();
    env.define(KNOT, body);
    Ok((knot, env))
}

/// `t` with its labels replaced by `bs` in breadth-first order.
pub fn label(t: &InfTree<Elem>, bs: &Stream<Elem>) -> Result<InfTree<Elem>, UError> {
    let (knot, env) = label_prime(t, bs)?;
    let sess = Rc::new(USession::new());
    match interpret_u(&UProg::fst(knot)?, &Rc::new(env), &sess)? {
        UValue::Tree(t) => elem_tree(*t),
        _ => unreachable!("fst of lab is a tree"),
    }
}

fn elem_tree(t: InfTree<UValue>) -> Result<InfTree<Elem>, UError> {
    let InfTree::Node(l, x, r) = t else { return Ok(InfTree::Leaf) };
    let x = x.as_elem().ok_or_else(|| EvalError::Stuck("tree label is not an element".into()))?;
    let lazily = |s: Susp<InfTree<UValue>>| Susp::memo(move || elem_tree(s.force()?).map_err(EvalError::from));
    Ok(InfTree::Node(lazily(l), x, lazily(r)))
}

/// Whether `label(t, bs)` has the shape of `t` and its breadth-first
/// labels are the first `size(t)` elements of `bs`.
pub fn check_label_correct(t: &FinTree<Elem>, bs: &Stream<Elem>) -> Result<bool, UError> {
    let original = t.to_inf();
    let relabelled = label(&original, bs)?;
    for d in 0..=t.height() + 1 {
        if tree_truncate(&relabelled, d)?.shape() != tree_truncate(&original, d)?.shape() {
            return Ok(false);
        }
    }
    let n = t.size();
    let labels = bfs_labels(&relabelled).to_vec_bounded(n + 1)?;
    Ok(labels == Some(take_prefix(bs, n)?))
}
