use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use corec_kernel::{Budget, Elem, EvalError, InfTree, Stream, Susp};
use corec_stream::{Name, DEFAULT_FUEL, MAX_DEPTH};
use thiserror::Error;

use crate::code::{Atom, AtomKind, UValue};
use crate::prog::{CodeMismatch, Delayed, ProgNode, UProg, UWhnf, WhnfNode};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum UError {
    #[error(transparent)]
    Code(#[from] CodeMismatch),
    #[error("unresolved reference `{0}`")]
    UnresolvedRef(Name),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl From<UError> for EvalError {
    fn from(e: UError) -> Self {
        match e {
            UError::Eval(e) => e,
            other => EvalError::Stuck(other.to_string()),
        }
    }
}

/// Named programs, possibly referring to each other.
#[derive(Clone, Debug, Default)]
pub struct UEnv {
    defs: BTreeMap<Name, UProg>,
}

impl UEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn define(&mut self, name: &str, body: UProg) -> &mut Self {
        self.defs.insert(Name::new(name), body);
        self
    }

    pub fn get(&self, name: &Name) -> Option<&UProg> {
        self.defs.get(name)
    }
}

/// Fuel and the cache of weak head normal forms per shared program node.
#[derive(Debug)]
pub struct USession {
    budget: Budget,
    // the program is kept alive so that its address stays unique
    memo: RefCell<HashMap<*const (), (UProg, UWhnf)>>,
}

impl Default for USession {
    fn default() -> Self {
        Self::with_fuel(DEFAULT_FUEL)
    }
}

impl USession {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_fuel(fuel: u64) -> Self {
        USession { budget: Budget::new(fuel, MAX_DEPTH), memo: RefCell::default() }
    }

    pub fn steps(&self) -> u64 {
        self.budget.total_steps()
    }
}

const RED_ZONE: usize = 64 * 1024;
const STACK_CHUNK: usize = 2 * 1024 * 1024;

/// Weak head normal form of `p`, with a fresh fuel budget.
pub fn whnf_u(p: &UProg, env: &UEnv, sess: &USession) -> Result<UWhnf, UError> {
    sess.budget.begin_element();
    eval(p, env, sess)
}

fn eval(p: &UProg, env: &UEnv, sess: &USession) -> Result<UWhnf, UError> {
    if let Some((_, w)) = sess.memo.borrow().get(&p.key()) {
        return Ok(w.clone());
    }
    let mut result = Err(UError::Eval(EvalError::FuelExhausted { steps: 0 }));
    sess.budget.nested(|| {
        result = stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || eval_node(p, env, sess));
        Ok(())
    })?;
    let w = result?;
    sess.memo.borrow_mut().insert(p.key(), (p.clone(), w.clone()));
    Ok(w)
}

fn eval_node(p: &UProg, env: &UEnv, sess: &USession) -> Result<UWhnf, UError> {
    match p.node() {
        ProgNode::Done(w) => Ok(w.clone()),
        ProgNode::Fst(q) => fst_whnf(eval(q, env, sess)?),
        ProgNode::Snd(q) => snd_whnf(eval(q, env, sess)?),
        ProgNode::Lab(t, bss) => lab_whnf(t, eval(bss, env, sess)?),
        ProgNode::Ref(n) => {
            let body = env.get(n).ok_or_else(|| UError::UnresolvedRef(n.clone()))?;
            if body.code() != p.code() {
                return Err(CodeMismatch { context: "reference", expected: p.code().to_string(), found: body.code().clone() }.into());
            }
            sess.budget.step()?;
            eval(body, env, sess)
        }
    }
}

pub fn fst_whnf(w: UWhnf) -> Result<UWhnf, UError> {
    let code = w.code().clone();
    match w.into_node() {
        WhnfNode::Pair(a, _) => Ok(*a),
        _ => Err(CodeMismatch { context: "fst", expected: "a pair".into(), found: code }.into()),
    }
}

pub fn snd_whnf(w: UWhnf) -> Result<UWhnf, UError> {
    let code = w.code().clone();
    match w.into_node() {
        WhnfNode::Pair(_, b) => Ok(*b),
        _ => Err(CodeMismatch { context: "snd", expected: "a pair".into(), found: code }.into()),
    }
}

/// One step of breadth-first relabelling. A leaf passes the label streams
/// through. A node takes the head of the first stream as its label; its
/// left subtree is relabelled from the remaining streams, its right
/// subtree from what the left one leaves over.
pub fn lab_whnf(t: &InfTree<Elem>, bss: UWhnf) -> Result<UWhnf, UError> {
    let (l, r) = match t {
        InfTree::Leaf => return Ok(UWhnf::pair(UWhnf::leaf(AtomKind::Elem.code()), bss)),
        InfTree::Node(l, _, r) => (l.force()?, r.force()?),
    };
    let code = bss.code().clone();
    let (labels, rest) = match bss.into_node() {
        WhnfNode::Cons(h, Delayed(rest)) => match h.into_node() {
            WhnfNode::Atom(Atom::Stream(s)) => (s, rest),
            _ => return Err(CodeMismatch { context: "lab", expected: "a stream atom".into(), found: code }.into()),
        },
        _ => return Err(CodeMismatch { context: "lab", expected: "a cons".into(), found: code }.into()),
    };
    let x = UProg::lab(l, rest)?;
    let y = UProg::lab(r, UProg::snd(x.clone())?)?;
    let node = UWhnf::node_of(UProg::fst(x)?, UWhnf::elem(*labels.head()), UProg::fst(y.clone())?)?;
    let remaining = UWhnf::cons(UWhnf::elem_stream(labels.tail()?), UProg::snd(y)?)?;
    Ok(UWhnf::pair(node, remaining))
}

/// The value denoted by `p`. Delayed positions become suspensions.
pub fn interpret_u(p: &UProg, env: &Rc<UEnv>, sess: &Rc<USession>) -> Result<UValue, UError> {
    Ok(decode(whnf_u(p, env, sess)?, env, sess))
}

fn decode(w: UWhnf, env: &Rc<UEnv>, sess: &Rc<USession>) -> UValue {
    let later = |p: UProg| {
        let (env, sess) = (Rc::clone(env), Rc::clone(sess));
        move || interpret_u(&p, &env, &sess).map_err(EvalError::from)
    };
    match w.into_node() {
        WhnfNode::Leaf => UValue::Tree(Box::new(InfTree::Leaf)),
        WhnfNode::Node(Delayed(l), x, Delayed(r)) => {
            let (fl, fr) = (later(l), later(r));
            let l = Susp::memo(move || as_tree(fl()?));
            let r = Susp::memo(move || as_tree(fr()?));
            UValue::Tree(Box::new(InfTree::Node(l, decode(*x, env, sess), r)))
        }
        WhnfNode::Cons(h, Delayed(t)) => {
            let ft = later(t);
            UValue::Stream(Box::new(Stream::new(decode(*h, env, sess), Susp::memo(move || as_stream(ft()?)))))
        }
        WhnfNode::Pair(a, b) => UValue::Pair(Box::new(decode(*a, env, sess)), Box::new(decode(*b, env, sess))),
        WhnfNode::Atom(a) => UValue::Atom(a),
    }
}

fn as_tree(v: UValue) -> Result<InfTree<UValue>, EvalError> {
    match v {
        UValue::Tree(t) => Ok(*t),
        _ => Err(EvalError::Stuck("expected a tree".into())),
    }
}

fn as_stream(v: UValue) -> Result<Stream<UValue>, EvalError> {
    match v {
        UValue::Stream(s) => Ok(*s),
        _ => Err(EvalError::Stuck("expected a stream".into())),
    }
}
