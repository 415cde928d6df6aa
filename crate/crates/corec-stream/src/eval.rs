use std::rc::Rc;

use corec_kernel::{BinaryOp, Elem, EvalError, Stream, Susp, UnaryOp};
use thiserror::Error;

use crate::env::DefEnv;
use crate::name::Name;
use crate::prog::{Delayed, StreamProg, StreamWhnf};
use crate::session::{EvalSession, MemoCell, Mode};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StreamError {
    #[error("unresolved reference `{0}`")]
    UnresolvedRef(Name),
    #[error("unknown function `{0}`")]
    UnknownFunction(Name),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl From<StreamError> for EvalError {
    fn from(e: StreamError) -> Self {
        match e {
            StreamError::Eval(e) => e,
            other => EvalError::Stuck(other.to_string()),
        }
    }
}

const RED_ZONE: usize = 64 * 1024;
const STACK_CHUNK: usize = 2 * 1024 * 1024;

/// Weak head normal form of `p`. Each call gets a fresh fuel budget.
pub fn whnf(p: &StreamProg, env: &DefEnv, sess: &EvalSession) -> Result<StreamWhnf, StreamError> {
    sess.begin_element();
    eval(p, env, sess)
}

fn eval(p: &StreamProg, env: &DefEnv, sess: &EvalSession) -> Result<StreamWhnf, StreamError> {
    sess.enter()?;
    let result = stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || eval_node(p, env, sess));
    sess.leave();
    result
}

fn eval_node(p: &StreamProg, env: &DefEnv, sess: &EvalSession) -> Result<StreamWhnf, StreamError> {
    match p {
        StreamProg::Cons(h, Delayed(t)) => Ok(StreamWhnf { head: *h, tail: Rc::clone(t) }),
        StreamProg::ZipWith(op, a, b) => {
            let (x, y) = (eval(a, env, sess)?, eval(b, env, sess)?);
            Ok(zipwith_whnf(*op, x, y, sess)?)
        }
        StreamProg::Map(op, a) => Ok(map_whnf(*op, eval(a, env, sess)?, sess)?),
        StreamProg::Merge(a, b) => Ok(merge_whnf(eval(a, env, sess)?, eval(b, env, sess)?)),
        StreamProg::UserFun(..) => {
            // nested applications are peeled in a loop, innermost first
            let mut rules = Vec::new();
            let mut inner = p;
            while let StreamProg::UserFun(f, a) = inner {
                rules.push(env.rule(f).ok_or_else(|| StreamError::UnknownFunction(f.clone()))?);
                inner = a;
            }
            let mut w = eval(inner, env, sess)?;
            for rule in rules.into_iter().rev() {
                sess.step()?;
                sess.count_ops(rule.head.op_count(), rule.head.add_count());
                let head = rule.head.eval(w.head)?;
                w = StreamWhnf::new(head, rule.tail.instantiate(w.head, &w.tail)?);
            }
            Ok(w)
        }
        StreamProg::Embed(s) => Ok(StreamWhnf::new(*s.head(), StreamProg::Embed(s.tail()?))),
        StreamProg::Ref(n) => match sess.mode() {
            Mode::Naive => {
                let body = env.body(n).ok_or_else(|| StreamError::UnresolvedRef(n.clone()))?;
                sess.step()?;
                eval(body, env, sess)
            }
            Mode::Memoized => unfolded(n, 0, env, sess),
        },
        StreamProg::Unfolded(n, k) => unfolded(n, *k, env, sess),
    }
}

/// The `k`-th tail of definition `name`, cached per session.
fn unfolded(name: &Name, k: usize, env: &DefEnv, sess: &EvalSession) -> Result<StreamWhnf, StreamError> {
    if let Some(cell) = sess.memo_get(name, k) {
        return Ok(StreamWhnf::new(cell.head, StreamProg::Unfolded(name.clone(), k + 1)));
    }
    // earlier positions first, so that each raw tail is available
    let mut first = k;
    while first > 0 && sess.memo_get(name, first - 1).is_none() {
        first -= 1;
    }
    for i in first..=k {
        let raw = if i == 0 {
            Rc::clone(env.body(name).ok_or_else(|| StreamError::UnresolvedRef(name.clone()))?)
        } else {
            sess.memo_get(name, i - 1).expect("computed in order").raw_tail
        };
        sess.memo_begin(name, i)?;
        let result = sess.step().map_err(StreamError::from).and_then(|_| eval(&raw, env, sess));
        let cell = result.as_ref().ok().map(|w| MemoCell { head: w.head, raw_tail: Rc::clone(&w.tail) });
        sess.memo_end(name, i, cell);
        result?;
    }
    let cell = sess.memo_get(name, k).expect("just computed");
    Ok(StreamWhnf::new(cell.head, StreamProg::Unfolded(name.clone(), k + 1)))
}

/// `op x y :: zipWith op xs ys`
pub fn zipwith_whnf(op: BinaryOp, a: StreamWhnf, b: StreamWhnf, sess: &EvalSession) -> Result<StreamWhnf, EvalError> {
    sess.count_op(op == BinaryOp::Add);
    let head = op.apply(a.head, b.head)?;
    Ok(StreamWhnf { head, tail: Rc::new(StreamProg::ZipWith(op, a.tail, b.tail)) })
}

/// `op x :: map op xs`
pub fn map_whnf(op: UnaryOp, a: StreamWhnf, sess: &EvalSession) -> Result<StreamWhnf, EvalError> {
    sess.count_op(false);
    let head = op.apply(a.head)?;
    Ok(StreamWhnf { head, tail: Rc::new(StreamProg::Map(op, a.tail)) })
}

/// Ordered merge step; equal heads are emitted once.
pub fn merge_whnf(a: StreamWhnf, b: StreamWhnf) -> StreamWhnf {
    use std::cmp::Ordering::*;
    let (ta, tb) = (a.tail, b.tail);
    match a.head.cmp(&b.head) {
        Less => StreamWhnf::new(a.head, StreamProg::Merge(ta, Rc::new(StreamProg::Cons(b.head, Delayed(tb))))),
        Greater => StreamWhnf::new(b.head, StreamProg::Merge(Rc::new(StreamProg::Cons(a.head, Delayed(ta))), tb)),
        Equal => StreamWhnf::new(a.head, StreamProg::Merge(ta, tb)),
    }
}

/// The host stream denoted by `p`. In naive mode stream cells recompute
/// on every force; in memoized mode they are cached.
pub fn interpret(p: &StreamProg, env: &Rc<DefEnv>, sess: &EvalSession) -> Result<Stream<Elem>, StreamError> {
    let w = whnf(p, env, sess)?;
    Ok(from_whnf(w, env, sess))
}

fn from_whnf(w: StreamWhnf, env: &Rc<DefEnv>, sess: &EvalSession) -> Stream<Elem> {
    let (env, sess2) = (Rc::clone(env), sess.clone());
    let tail = w.tail;
    let memoize = sess.mode() == Mode::Memoized;
    Stream::new(w.head, Susp::new(memoize, move || Ok(interpret(&tail, &env, &sess2)?)))
}

/// A program whose interpretation is `s`.
pub fn embed_stream(s: Stream<Elem>) -> StreamProg {
    StreamProg::Embed(s)
}
