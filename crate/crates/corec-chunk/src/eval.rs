use std::cell::{self, RefCell};
use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use corec_kernel::{BinaryOp, Budget, Elem, EvalError, Stream, Susp, UnaryOp};
use corec_stream::{Name, DEFAULT_FUEL, MAX_DEPTH};
use thiserror::Error;

use crate::check::{synthesize, ChunkEnv, ChunkTypeError};
use crate::prog::{ChunkProg, ChunkWhnf, Delayed};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ChunkError {
    #[error("signature {0} admits an empty chunk at the top level")]
    NonProductiveTopLevel(String),
    #[error(transparent)]
    Type(#[from] ChunkTypeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl From<ChunkError> for EvalError {
    fn from(e: ChunkError) -> Self {
        match e {
            ChunkError::Eval(e) => e,
            other => EvalError::Stuck(other.to_string()),
        }
    }
}

#[derive(Debug)]
struct Cell {
    elems: Rc<[Elem]>,
    rest: Rc<ChunkProg>,
}

#[derive(Debug)]
struct State {
    budget: Budget,
    memo: RefCell<HashMap<(Name, usize), Cell>>,
    in_progress: RefCell<HashSet<(Name, usize)>>,
    adds: cell::Cell<u64>,
}

/// Evaluation state for chunked programs. The chunks of every definition
/// are computed once per session.
#[derive(Clone, Debug)]
pub struct ChunkSession(Rc<State>);

impl Default for ChunkSession {
    fn default() -> Self {
        Self::with_fuel(DEFAULT_FUEL)
    }
}

impl ChunkSession {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_fuel(fuel: u64) -> Self {
        ChunkSession(Rc::new(State {
            budget: Budget::new(fuel, MAX_DEPTH),
            memo: RefCell::default(),
            in_progress: RefCell::default(),
            adds: cell::Cell::new(0),
        }))
    }

    pub fn steps(&self) -> u64 {
        self.0.budget.total_steps()
    }

    /// Additions performed by `zipWith add` so far.
    pub fn adds(&self) -> u64 {
        self.0.adds.get()
    }

    fn budget(&self) -> &Budget {
        &self.0.budget
    }
}

const RED_ZONE: usize = 64 * 1024;
const STACK_CHUNK: usize = 2 * 1024 * 1024;

/// The current chunk of `p`. Each call gets a fresh fuel budget.
pub fn whnf_chunk(p: &ChunkProg, env: &ChunkEnv, sess: &ChunkSession) -> Result<ChunkWhnf, EvalError> {
    sess.budget().begin_element();
    let (elems, rest) = eval(p, env, sess)?;
    Ok(ChunkWhnf::from_parts(&elems, rest))
}

type Parts = (Vec<Elem>, Rc<ChunkProg>);

fn eval(p: &ChunkProg, env: &ChunkEnv, sess: &ChunkSession) -> Result<Parts, EvalError> {
    sess.budget().nested(|| stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || eval_node(p, env, sess)))
}

fn eval_node(p: &ChunkProg, env: &ChunkEnv, sess: &ChunkSession) -> Result<Parts, EvalError> {
    match p {
        ChunkProg::EndChunk(Delayed(q)) => Ok((vec![], Rc::clone(q))),
        ChunkProg::Cons(h, q) => {
            let (mut elems, rest) = eval(q, env, sess)?;
            elems.insert(0, *h);
            Ok((elems, rest))
        }
        ChunkProg::Tail(q) => {
            let (mut elems, rest) = eval(q, env, sess)?;
            if elems.is_empty() {
                return Err(EvalError::EmptyChunkDemand);
            }
            elems.remove(0);
            Ok((elems, rest))
        }
        ChunkProg::Forget(q) => eval(q, env, sess),
        ChunkProg::Map(op, q) => map_chunk(*op, eval(q, env, sess)?),
        ChunkProg::ZipWith(op, a, b) => zipwith_chunk(*op, eval(a, env, sess)?, eval(b, env, sess)?, sess),
        ChunkProg::Evens(q) => Ok(alternate(eval(q, env, sess)?, true)),
        ChunkProg::Odds(q) => Ok(alternate(eval(q, env, sess)?, false)),
        ChunkProg::Interleave(a, b) => Ok(interleave_chunk(eval(a, env, sess)?, eval(b, env, sess)?)),
        ChunkProg::Ref(n) => unfolded(n, 0, env, sess),
        ChunkProg::Unfolded(n, k) => unfolded(n, *k, env, sess),
    }
}

/// Chunk `k` of definition `name`.
fn unfolded(name: &Name, k: usize, env: &ChunkEnv, sess: &ChunkSession) -> Result<Parts, EvalError> {
    let hit = |i: usize| sess.0.memo.borrow().get(&(name.clone(), i)).map(|c| (Rc::clone(&c.elems), Rc::clone(&c.rest)));
    let mut first = k;
    while hit(first).is_none() && first > 0 && hit(first - 1).is_none() {
        first -= 1;
    }
    for i in first..=k {
        if hit(i).is_some() {
            continue;
        }
        let source = if i == 0 {
            let def = env.get(name).ok_or_else(|| EvalError::Stuck(format!("unresolved reference `{name}`")))?;
            Rc::clone(&def.body)
        } else {
            hit(i - 1).expect("computed in order").1
        };
        let key = (name.clone(), i);
        if !sess.0.in_progress.borrow_mut().insert(key.clone()) {
            return Err(EvalError::FuelExhausted { steps: sess.steps() });
        }
        let result = sess.budget().step().and_then(|_| eval(&source, env, sess));
        sess.0.in_progress.borrow_mut().remove(&key);
        let (elems, rest) = result?;
        sess.0.memo.borrow_mut().insert(key, Cell { elems: elems.into(), rest });
    }
    let (elems, _) = hit(k).expect("just computed");
    Ok((elems.to_vec(), Rc::new(ChunkProg::Unfolded(name.clone(), k + 1))))
}

fn map_chunk(op: UnaryOp, (elems, rest): Parts) -> Result<Parts, EvalError> {
    let elems = elems.into_iter().map(|x| op.apply(x)).collect::<Result<_, _>>()?;
    Ok((elems, Rc::new(ChunkProg::Map(op, rest))))
}

/// Pairs elements while both chunks last. The longer chunk's leftover is
/// carried into the next chunk, so both boundaries are crossed together.
fn zipwith_chunk(op: BinaryOp, (xs, qa): Parts, (ys, qb): Parts, sess: &ChunkSession) -> Result<Parts, EvalError> {
    let n = xs.len().min(ys.len());
    if op == BinaryOp::Add {
        sess.0.adds.set(sess.0.adds.get() + n as u64);
    }
    let out = xs.iter().zip(&ys).map(|(&x, &y)| op.apply(x, y)).collect::<Result<_, _>>()?;
    let rest = ChunkProg::ZipWith(op, ChunkProg::prepend(&xs[n..], qa), ChunkProg::prepend(&ys[n..], qb));
    Ok((out, Rc::new(rest)))
}

/// Even (`from_even`) or odd positions of a chunk.
fn alternate((xs, q): Parts, from_even: bool) -> Parts {
    let skip = usize::from(!from_even);
    let out = xs.iter().skip(skip).step_by(2).copied().collect();
    let next_even = (xs.len() % 2 == 0) == from_even;
    let rest = if next_even { ChunkProg::Evens(q) } else { ChunkProg::Odds(q) };
    (out, Rc::new(rest))
}

/// Alternates until the side whose turn it is runs out of its chunk. The
/// other side's leftover joins its next chunk, and that side goes second.
fn interleave_chunk((xs, qa): Parts, (ys, qb): Parts) -> Parts {
    let mut out = Vec::with_capacity(xs.len() + ys.len());
    if xs.len() <= ys.len() {
        for (x, y) in xs.iter().zip(&ys) {
            out.extend([*x, *y]);
        }
        let left = ChunkProg::prepend(&ys[xs.len()..], qb);
        (out, Rc::new(ChunkProg::Interleave(qa, left)))
    } else {
        for (x, y) in xs.iter().zip(&ys) {
            out.extend([*x, *y]);
        }
        let m = ys.len();
        out.push(xs[m]);
        let left = ChunkProg::prepend(&xs[m + 1..], qa);
        (out, Rc::new(ChunkProg::Interleave(qb, left)))
    }
}

/// The host stream denoted by `p`. The program's signature (declared for
/// a reference, synthesised otherwise) must promise a nonempty chunk after
/// every boundary. Empty chunks met at run time are skipped, each costing
/// a step.
pub fn interpret_chunk(p: &ChunkProg, env: &Rc<ChunkEnv>, sess: &ChunkSession) -> Result<Stream<Elem>, ChunkError> {
    let promised = match p {
        ChunkProg::Ref(n) => {
            env.get(n).map(|d| (d.signature.schedule(), d.signature.to_string())).ok_or_else(|| ChunkTypeError::UnresolvedRef(n.clone()))?
        }
        other => {
            let s = synthesize(env, other)?;
            let shown = s.to_string();
            (s, shown)
        }
    };
    if !promised.0.all_nonempty() {
        return Err(ChunkError::NonProductiveTopLevel(promised.1));
    }
    Ok(emit(Rc::from(Vec::new()), 0, Rc::new(p.clone()), env, sess)?)
}

fn emit(elems: Rc<[Elem]>, i: usize, rest: Rc<ChunkProg>, env: &Rc<ChunkEnv>, sess: &ChunkSession) -> Result<Stream<Elem>, EvalError> {
    if i < elems.len() {
        let (env, sess) = (Rc::clone(env), sess.clone());
        let head = elems[i];
        return Ok(Stream::new(head, Susp::memo(move || emit(Rc::clone(&elems), i + 1, Rc::clone(&rest), &env, &sess))));
    }
    sess.budget().begin_element();
    let mut next = rest;
    loop {
        let (xs, q) = eval(&next, env, sess)?;
        if !xs.is_empty() {
            return emit(xs.into(), 0, q, env, sess);
        }
        sess.budget().step()?;
        next = q;
    }
}

/// Cumulative element counts after each of the first `chunks` chunks,
/// stopping early once more than `limit` elements have been produced.
pub fn chunk_profile(p: &ChunkProg, env: &ChunkEnv, sess: &ChunkSession, chunks: usize, limit: u64) -> Result<Vec<u64>, EvalError> {
    let mut out = Vec::with_capacity(chunks);
    let mut total = 0;
    let mut next = Rc::new(p.clone());
    while out.len() < chunks && total <= limit {
        sess.budget().begin_element();
        let (xs, q) = eval(&next, env, sess)?;
        total += xs.len() as u64;
        out.push(total);
        next = q;
    }
    Ok(out)
}

/// Maps `op` over `s` two elements at a time.
pub fn map2_reference(op: UnaryOp, s: &Stream<Elem>) -> Result<Stream<Elem>, EvalError> {
    let x = *s.head();
    let t = s.tail()?;
    let y = *t.head();
    let rest = t.tail_susp().clone();
    let later = Susp::memo(move || map2_reference(op, &rest.force()?));
    Ok(Stream::new(op.apply(x)?, Susp::ready(Stream::new(op.apply(y)?, later))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::ChunkSignature;
    use corec_kernel::take_prefix;
    use ChunkProg as C;

    fn ints(xs: &[i64]) -> Vec<Elem> {
        xs.iter().map(|&x| Elem::from(x)).collect()
    }

    fn fib_p() -> C {
        C::cons(0, C::end(C::cons(1, C::zip_with(BinaryOp::Add, C::forget(C::reference("fib")), C::tail(C::reference("fib"))))))
    }

    fn thue_morse() -> C {
        C::cons(false, C::end(C::interleave(C::map(UnaryOp::Not, C::evens(C::reference("tm"))), C::tail(C::reference("tm")))))
    }

    fn env() -> Rc<ChunkEnv> {
        let mut env = ChunkEnv::new();
        env.define("fib", ChunkSignature::Bool(true), fib_p());
        env.define("n2", ChunkSignature::fixed(2, 2).unwrap(), C::cons(0, C::cons(1, C::end(C::map(UnaryOp::Suc, C::reference("n2"))))));
        env.define("tm", ChunkSignature::pattern(vec![1, 1, 1], vec![2]).unwrap(), thue_morse());
        env.define("bad", ChunkSignature::Bool(true), C::tail(C::cons(0, C::end(C::reference("bad")))));
        Rc::new(env)
    }

    fn prefix(name: &str, n: usize) -> Result<Vec<Elem>, EvalError> {
        let sess = ChunkSession::new();
        take_prefix(&interpret_chunk(&C::reference(name), &env(), &sess)?, n)
    }

    #[test]
    fn whnf_examples() {
        let env = env();
        let sess = ChunkSession::new();
        let w = whnf_chunk(&C::reference("fib"), &env, &sess).unwrap();
        let (elems, _) = w.into_parts();
        assert_eq!(elems, ints(&[0]));
        let r = Rc::new(C::reference("r"));
        let p = C::tail(C::cons(3, C::cons(4, C::EndChunk(Delayed(Rc::clone(&r))))));
        assert_eq!(whnf_chunk(&p, &env, &sess).unwrap(), ChunkWhnf::from_parts(&ints(&[4]), r));
        let m = C::map(UnaryOp::Suc, C::cons(1, C::end(C::reference("r"))));
        let (elems, rest) = whnf_chunk(&m, &env, &sess).unwrap().into_parts();
        assert_eq!((elems, rest.to_string()), (ints(&[2]), "map suc r".to_string()));
    }

    #[test]
    fn interpretations() {
        assert_eq!(prefix("fib", 8).unwrap(), ints(&[0, 1, 1, 2, 3, 5, 8, 13]));
        assert_eq!(prefix("n2", 6).unwrap(), ints(&[0, 1, 1, 2, 2, 3]));
        let tm: Vec<Elem> = [false, true, true, false, true, false, false, true].map(Elem::Bool).to_vec();
        assert_eq!(prefix("tm", 8).unwrap(), tm);
    }

    #[test]
    fn unchecked_bad_runs_out_of_fuel() {
        let sess = ChunkSession::with_fuel(1000);
        let err = interpret_chunk(&C::reference("bad"), &env(), &sess).unwrap_err();
        assert!(matches!(err, ChunkError::Eval(EvalError::FuelExhausted { .. })), "{err}");
        let demand = C::tail(C::end(C::reference("bad")));
        assert_eq!(whnf_chunk(&demand, &env(), &sess), Err(EvalError::EmptyChunkDemand));
    }

    #[test]
    fn empty_first_chunk_is_not_interpreted() {
        let p = C::forget(C::reference("fib"));
        assert_eq!(interpret_chunk(&p, &env(), &ChunkSession::new()).err(), Some(ChunkError::NonProductiveTopLevel("pattern[0;1]".into())));
    }

    #[test]
    fn profile_counts_chunks() {
        let sess = ChunkSession::new();
        assert_eq!(chunk_profile(&C::reference("n2"), &env(), &sess, 4, 100).unwrap(), vec![2, 4, 6, 8]);
        assert_eq!(chunk_profile(&C::reference("tm"), &env(), &sess, 5, 100).unwrap(), vec![1, 2, 3, 5, 7]);
    }

    #[test]
    fn map2_matches_map() {
        let nats = Stream::tabulate(|i| Elem::Int(i as i128));
        assert_eq!(take_prefix(&map2_reference(UnaryOp::Suc, &nats).unwrap(), 4).unwrap(), ints(&[1, 2, 3, 4]));
    }
}
