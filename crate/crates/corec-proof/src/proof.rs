//! Equality proofs between streams, their weak head normal forms and
//! bounded checking.

use std::cell::{Cell, OnceCell, RefCell};
use std::fmt;
use std::rc::Rc;

use corec_kernel::{BinaryOp, Budget, Elem, EvalError, UnaryOp};
use corec_stream::{DefEnv, EvalSession, Mode, Name, Template, DEFAULT_FUEL, MAX_DEPTH};

use crate::designator::Designator;
use crate::error::ProofError;

/// A proof that two streams are equal.
#[derive(Clone)]
pub enum EqProof {
    /// Both heads are the element; the delayed proof covers the tails.
    Cons(Elem, DelayedProof),
    /// Left proves `xs = mid`, right proves `mid = ys`.
    Trans(Designator, Rc<EqProof>, Rc<EqProof>),
    Refl(Designator),
    ZipWithCong(BinaryOp, Rc<EqProof>, Rc<EqProof>),
    MapCong(UnaryOp, Rc<EqProof>),
    /// Congruence for a function registered in the environment.
    UfunCong(Name, Rc<EqProof>),
    /// Element-by-element comparison of the two designated streams.
    CompleteEmbed(Designator, Designator),
    /// The `k`-th tail of a proof whose tails are cached.
    Shared(Rc<SharedProof>, usize),
}

impl EqProof {
    pub fn cons(x: impl Into<Elem>, rest: impl Fn() -> Result<EqProof, ProofError> + 'static) -> Self {
        EqProof::Cons(x.into(), DelayedProof::new(rest))
    }

    pub fn trans(mid: Designator, left: EqProof, right: EqProof) -> Self {
        EqProof::Trans(mid, Rc::new(left), Rc::new(right))
    }

    pub fn zip_with_cong(op: BinaryOp, a: EqProof, b: EqProof) -> Self {
        EqProof::ZipWithCong(op, Rc::new(a), Rc::new(b))
    }

    pub fn map_cong(op: UnaryOp, a: EqProof) -> Self {
        EqProof::MapCong(op, Rc::new(a))
    }

    pub fn ufun_cong(name: &str, a: EqProof) -> Self {
        EqProof::UfunCong(Name::new(name), Rc::new(a))
    }

    /// A proof that may mention itself. `body` receives the proof being
    /// defined; it must only use it under a delay.
    pub fn knot(body: impl FnOnce(EqProof) -> EqProof) -> Self {
        let shared = Rc::new(SharedProof::default());
        let me = EqProof::Shared(Rc::clone(&shared), 0);
        let _ = shared.body.set(body(me.clone()));
        me
    }

    /// Number of `Trans` nodes reachable without crossing a delay.
    pub fn trans_nodes(&self) -> usize {
        match self {
            EqProof::Trans(_, l, r) => 1 + l.trans_nodes() + r.trans_nodes(),
            EqProof::ZipWithCong(_, a, b) => a.trans_nodes() + b.trans_nodes(),
            EqProof::MapCong(_, a) | EqProof::UfunCong(_, a) => a.trans_nodes(),
            EqProof::Cons(..) | EqProof::Refl(_) | EqProof::CompleteEmbed(..) | EqProof::Shared(..) => 0,
        }
    }
}

type Compute = Box<dyn Fn() -> Result<EqProof, ProofError>>;

/// A proof position that is only built when demanded, at most once.
#[derive(Clone)]
pub struct DelayedProof(Rc<(Compute, OnceCell<EqProof>)>);

impl DelayedProof {
    pub fn new(f: impl Fn() -> Result<EqProof, ProofError> + 'static) -> Self {
        DelayedProof(Rc::new((Box::new(f), OnceCell::new())))
    }

    pub fn ready(p: EqProof) -> Self {
        let cell = OnceCell::new();
        let _ = cell.set(p);
        DelayedProof(Rc::new((Box::new(|| unreachable!("ready proof recomputed")), cell)))
    }

    pub fn force(&self) -> Result<EqProof, ProofError> {
        if let Some(p) = self.0 .1.get() {
            return Ok(p.clone());
        }
        let p = (self.0 .0)()?;
        Ok(self.0 .1.get_or_init(|| p).clone())
    }
}

/// Cached weak head normal forms of a self-referential proof.
#[derive(Default)]
pub struct SharedProof {
    body: OnceCell<EqProof>,
    // head at position i, and the raw proof of position i + 1
    cells: RefCell<Vec<(Elem, EqProof)>>,
    busy: Cell<bool>,
}

/// A weak head normal form of a proof: the common head of both streams
/// and a proof about their tails.
#[derive(Clone, Debug)]
pub struct EqWhnf {
    pub head: Elem,
    pub rest: EqProof,
}

/// Environment, fuel and counters for checking proofs.
pub struct ProofSession {
    env: Rc<DefEnv>,
    streams: EvalSession,
    budget: Budget,
    trans_steps: Cell<u64>,
}

impl ProofSession {
    /// Streams are evaluated with memoization.
    pub fn new(env: Rc<DefEnv>) -> Self {
        Self::with_fuel(env, DEFAULT_FUEL)
    }

    pub fn with_fuel(env: Rc<DefEnv>, fuel: u64) -> Self {
        ProofSession {
            env,
            streams: EvalSession::with_fuel(Mode::Memoized, fuel),
            budget: Budget::new(fuel, MAX_DEPTH),
            trans_steps: Cell::new(0),
        }
    }

    pub fn env(&self) -> &Rc<DefEnv> {
        &self.env
    }

    pub fn streams(&self) -> &EvalSession {
        &self.streams
    }

    pub fn trans_steps(&self) -> u64 {
        self.trans_steps.get()
    }

    pub fn steps(&self) -> u64 {
        self.budget.total_steps()
    }

    pub(crate) fn observe(&self, d: &Designator) -> Result<(Elem, Designator), ProofError> {
        d.observe(&self.env, &self.streams)
    }
}

const RED_ZONE: usize = 64 * 1024;
const STACK_CHUNK: usize = 2 * 1024 * 1024;

/// Weak head normal form of `p`, which sits at position `index` of the
/// streams it relates. Each call gets a fresh fuel budget.
pub fn proof_whnf(p: &EqProof, sess: &ProofSession, index: usize) -> Result<EqWhnf, ProofError> {
    sess.budget.begin_element();
    eval(p, sess, index)
}

fn eval(p: &EqProof, sess: &ProofSession, index: usize) -> Result<EqWhnf, ProofError> {
    sess.budget.step()?;
    let mut result = Err(ProofError::from(EvalError::FuelExhausted { steps: 0 }));
    sess.budget.nested(|| {
        result = stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || eval_node(p, sess, index));
        Ok(())
    })?;
    result
}

fn mismatch(index: usize, expected: Elem, found: Elem) -> Result<(), ProofError> {
    if expected == found {
        Ok(())
    } else {
        Err(ProofError::HeadMismatch { index, expected, found })
    }
}

fn eval_node(p: &EqProof, sess: &ProofSession, index: usize) -> Result<EqWhnf, ProofError> {
    Ok(match p {
        EqProof::Cons(x, rest) => EqWhnf { head: *x, rest: rest.force()? },
        EqProof::Refl(s) => {
            let (head, tail) = sess.observe(s)?;
            EqWhnf { head, rest: EqProof::Refl(tail) }
        }
        EqProof::Trans(mid, l, r) => {
            let (wl, wr) = (eval(l, sess, index)?, eval(r, sess, index)?);
            let (m, mid) = sess.observe(mid)?;
            sess.trans_steps.set(sess.trans_steps.get() + 1);
            mismatch(index, m, wl.head)?;
            mismatch(index, m, wr.head)?;
            EqWhnf { head: m, rest: EqProof::trans(mid, wl.rest, wr.rest) }
        }
        EqProof::ZipWithCong(op, a, b) => {
            let (wa, wb) = (eval(a, sess, index)?, eval(b, sess, index)?);
            EqWhnf { head: op.apply(wa.head, wb.head)?, rest: EqProof::zip_with_cong(*op, wa.rest, wb.rest) }
        }
        EqProof::MapCong(op, a) => {
            let w = eval(a, sess, index)?;
            EqWhnf { head: op.apply(w.head)?, rest: EqProof::map_cong(*op, w.rest) }
        }
        EqProof::UfunCong(f, a) => {
            let rule = sess.env.rule(f).ok_or_else(|| corec_stream::StreamError::UnknownFunction(f.clone()))?;
            let w = eval(a, sess, index)?;
            EqWhnf { head: rule.head.eval(w.head)?, rest: congruence(&rule.tail, w.head, &w.rest)? }
        }
        EqProof::CompleteEmbed(a, b) => {
            let ((x, a), (y, b)) = (sess.observe(a)?, sess.observe(b)?);
            mismatch(index, x, y)?;
            EqWhnf { head: x, rest: EqProof::CompleteEmbed(a, b) }
        }
        EqProof::Shared(m, k) => shared(m, *k, sess, index)?,
    })
}

/// The proof a function's tail template yields when its argument tails
/// are related by `rest`.
fn congruence(t: &Template, head: Elem, rest: &EqProof) -> Result<EqProof, ProofError> {
    let go = |t: &Template| congruence(t, head, rest);
    Ok(match t {
        Template::InputTail => rest.clone(),
        Template::Cons(h, t) => EqProof::Cons(h.eval(head)?, DelayedProof::ready(go(t)?)),
        Template::ZipWith(op, a, b) => EqProof::zip_with_cong(*op, go(a)?, go(b)?),
        Template::Map(op, a) => EqProof::map_cong(*op, go(a)?),
        Template::UserFun(g, a) => EqProof::UfunCong(g.clone(), Rc::new(go(a)?)),
        Template::Merge(..) => return Err(ProofError::NoCongruence("merge".into())),
        Template::Ref(n) => EqProof::Refl(Designator::Prog(Rc::new(corec_stream::StreamProg::Ref(n.clone())))),
    })
}

fn shared(m: &Rc<SharedProof>, k: usize, sess: &ProofSession, index: usize) -> Result<EqWhnf, ProofError> {
    let known = m.cells.borrow().len();
    for i in known..=k {
        let raw = match i {
            0 => m.body.get().expect("knot tied").clone(),
            _ => m.cells.borrow()[i - 1].1.clone(),
        };
        if m.busy.replace(true) {
            return Err(EvalError::FuelExhausted { steps: sess.budget.total_steps() }.into());
        }
        let w = eval(&raw, sess, (index + i).saturating_sub(k));
        m.busy.set(false);
        let w = w?;
        m.cells.borrow_mut().push((w.head, w.rest));
    }
    let head = m.cells.borrow()[k].0;
    Ok(EqWhnf { head, rest: EqProof::Shared(Rc::clone(m), k + 1) })
}

/// Checks that `p` relates `s1` and `s2` on their first `depth` elements.
pub fn proof_check(p: &EqProof, s1: &Designator, s2: &Designator, depth: usize, sess: &ProofSession) -> Result<(), ProofError> {
    let (mut p, mut s1, mut s2) = (p.clone(), s1.clone(), s2.clone());
    for index in 0..depth {
        let w = proof_whnf(&p, sess, index)?;
        let (x, t1) = sess.observe(&s1)?;
        let (y, t2) = sess.observe(&s2)?;
        mismatch(index, x, w.head)?;
        mismatch(index, y, w.head)?;
        (p, s1, s2) = (w.rest, t1, t2);
    }
    Ok(())
}

impl fmt::Display for EqProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EqProof::Cons(x, _) => write!(f, "{x} :: delay .."),
            EqProof::Trans(mid, l, r) => write!(f, "({l} ~[{mid}] {r})"),
            EqProof::Refl(s) => write!(f, "refl {s}"),
            EqProof::ZipWithCong(op, a, b) => write!(f, "zipWith-cong {op} ({a}) ({b})"),
            EqProof::MapCong(op, a) => write!(f, "map-cong {op} ({a})"),
            EqProof::UfunCong(n, a) => write!(f, "{n}-cong ({a})"),
            EqProof::CompleteEmbed(a, b) => write!(f, "complete {a} {b}"),
            EqProof::Shared(_, k) => write!(f, "<shared #{k}>"),
        }
    }
}

impl fmt::Debug for EqProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use corec_stream::{FunRule, StreamProg as P};

    fn env() -> Rc<DefEnv> {
        let mut env = DefEnv::new();
        env.define("fib", P::cons(0, P::zip_with(BinaryOp::Add, P::reference("fib"), P::cons(1, P::reference("fib")))));
        env.define("nats", P::cons(0, P::map(UnaryOp::Suc, P::reference("nats"))));
        env.register_fun("phi", FunRule::nested("phi")).unwrap();
        Rc::new(env)
    }

    #[test]
    fn refl_head() {
        let sess = ProofSession::new(env());
        let w = proof_whnf(&EqProof::Refl(Designator::def("fib")), &sess, 0).unwrap();
        assert_eq!(w.head, Elem::Int(0));
        assert!(matches!(w.rest, EqProof::Refl(_)));
    }

    #[test]
    fn cons_against_disagreeing_streams() {
        let sess = ProofSession::new(env());
        let p = EqProof::cons(5, || Ok(EqProof::Refl(Designator::def("nats"))));
        let a = Designator::prog(P::cons(5, P::reference("nats")));
        let b = Designator::prog(P::cons(6, P::reference("nats")));
        let err = proof_check(&p, &a, &b, 3, &sess).unwrap_err();
        assert_eq!(err, ProofError::HeadMismatch { index: 0, expected: Elem::Int(6), found: Elem::Int(5) });
    }

    #[test]
    fn trans_chains_agreeing_heads() {
        let sess = ProofSession::new(env());
        let nats = Designator::def("nats");
        let p = EqProof::trans(nats.clone(), EqProof::Refl(nats.clone()), EqProof::CompleteEmbed(nats.clone(), nats.clone()));
        let w = proof_whnf(&p, &sess, 0).unwrap();
        assert_eq!(w.head, Elem::Int(0));
        assert_eq!(sess.trans_steps(), 1);
        proof_check(&p, &nats, &nats, 30, &sess).unwrap();
        let bad = EqProof::trans(nats.clone(), EqProof::Refl(nats.clone()), EqProof::Refl(Designator::def("fib")));
        let err = proof_check(&bad, &nats, &Designator::def("fib"), 10, &sess).unwrap_err();
        assert!(matches!(err, ProofError::HeadMismatch { index: 2, .. }));
    }

    #[test]
    fn function_congruence_follows_the_rule() {
        let sess = ProofSession::new(env());
        let phi_nats = Designator::prog(P::user_fun("phi", P::reference("nats")));
        let p = EqProof::ufun_cong("phi", EqProof::Refl(Designator::def("nats")));
        proof_check(&p, &phi_nats, &phi_nats, 8, &sess).unwrap();
    }

    #[test]
    fn knots_are_cached() {
        let sess = ProofSession::new(env());
        let zeros = Designator::prog(P::cons(0, P::reference("zeros")));
        let mut env = (**sess.env()).clone();
        env.define("zeros", P::cons(0, P::reference("zeros")));
        let sess = ProofSession::new(Rc::new(env));
        let p = EqProof::knot(|me| EqProof::cons(0, move || Ok(me.clone())));
        proof_check(&p, &zeros, &Designator::def("zeros"), 1000, &sess).unwrap();
        assert!(sess.steps() < 5000);
    }

    #[test]
    fn unguarded_knot_runs_out() {
        let sess = ProofSession::new(env());
        let p = EqProof::knot(|me| EqProof::map_cong(UnaryOp::Id, me));
        let err = proof_whnf(&p, &sess, 0).unwrap_err();
        assert!(matches!(err, ProofError::Stream(corec_stream::StreamError::Eval(EvalError::FuelExhausted { .. }))));
    }
}
