//! Proofs with an explicit list of hypotheses. A `ConsHyp` step may assume
//! its own goal for the tails, which makes circular proofs expressible
//! as finite terms.

use std::fmt;
use std::rc::Rc;

use corec_stream::{DefEnv, EvalSession, Mode};

use crate::designator::Designator;
use crate::error::ProofError;
use crate::proof::{proof_check, EqProof, ProofSession};

#[derive(Clone, Debug, PartialEq)]
pub enum HypProof {
    /// Equal heads; the tails are proved with the goal added in front
    /// of the hypotheses.
    ConsHyp(corec_kernel::Elem, Rc<HypProof>),
    /// The `i`-th hypothesis, counting from the innermost.
    Hyp(usize),
    TransHyp(Designator, Rc<HypProof>, Rc<HypProof>),
}

/// Pairs of streams assumed equal, innermost first.
pub type HypContext = Vec<(Designator, Designator)>;

impl HypProof {
    pub fn cons(x: impl Into<corec_kernel::Elem>, sub: HypProof) -> Self {
        HypProof::ConsHyp(x.into(), Rc::new(sub))
    }

    pub fn trans(mid: Designator, l: HypProof, r: HypProof) -> Self {
        HypProof::TransHyp(mid, Rc::new(l), Rc::new(r))
    }
}

impl fmt::Display for HypProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HypProof::ConsHyp(x, sub) => write!(f, "cons {x} ({sub})"),
            HypProof::Hyp(i) => write!(f, "hyp {i}"),
            HypProof::TransHyp(mid, l, r) => write!(f, "trans [{mid}] ({l}) ({r})"),
        }
    }
}

/// Structural validity of `p` as a proof of `s1 = s2` under `h`. Streams
/// are unfolded without memoization, so that the tail of a definition is
/// again the program the definition names.
pub fn hyp_check(h: &[(Designator, Designator)], p: &HypProof, s1: &Designator, s2: &Designator, env: &DefEnv) -> Result<(), ProofError> {
    let sess = EvalSession::new(Mode::Naive);
    check(&mut h.to_vec(), p, s1, s2, env, &sess, 0)
}

fn check(
    h: &mut HypContext,
    p: &HypProof,
    s1: &Designator,
    s2: &Designator,
    env: &DefEnv,
    sess: &EvalSession,
    index: usize,
) -> Result<(), ProofError> {
    let head_of = |d: &Designator| d.observe(env, sess);
    match p {
        HypProof::ConsHyp(x, sub) => {
            let ((a, t1), (b, t2)) = (head_of(s1)?, head_of(s2)?);
            for found in [a, b] {
                if found != *x {
                    return Err(ProofError::HeadMismatch { index, expected: found, found: *x });
                }
            }
            h.insert(0, (s1.clone(), s2.clone()));
            let result = check(h, sub, &t1, &t2, env, sess, index + 1);
            h.remove(0);
            result
        }
        HypProof::Hyp(i) => {
            let (a, b) = h.get(*i).ok_or(ProofError::BadIndex(*i))?;
            if a == s1 && b == s2 {
                Ok(())
            } else {
                Err(ProofError::NotAHypothesis { hyp: *i, index })
            }
        }
        HypProof::TransHyp(mid, l, r) => {
            let (a, m, b) = (head_of(s1)?.0, head_of(mid)?.0, head_of(s2)?.0);
            if a != m || m != b {
                return Err(ProofError::MiddleMismatch { index });
            }
            check(h, l, s1, mid, env, sess, index)?;
            check(h, r, mid, s2, env, sess, index)
        }
    }
}

/// Turns `p` into an equality proof. Hypotheses become the supplied
/// proofs, and each `ConsHyp` becomes a proof whose tail may refer back
/// to the proof itself.
pub fn transcribe(validations: &[EqProof], p: &HypProof) -> Result<EqProof, ProofError> {
    Ok(match p {
        HypProof::Hyp(i) => validations.get(*i).cloned().ok_or(ProofError::BadIndex(*i))?,
        HypProof::TransHyp(mid, l, r) => EqProof::trans(mid.clone(), transcribe(validations, l)?, transcribe(validations, r)?),
        HypProof::ConsHyp(x, sub) => {
            let outer = validations.to_vec();
            let (x, sub) = (*x, Rc::clone(sub));
            EqProof::knot(move |me| {
                let inner: Vec<EqProof> = std::iter::once(me).chain(outer).collect();
                EqProof::cons(x, move || transcribe(&inner, &sub))
            })
        }
    })
}

/// Transcribes `p` with one validation per hypothesis and checks the
/// result against `s1` and `s2` to `depth`.
pub fn hyp_sound(
    validations: &[EqProof],
    p: &HypProof,
    s1: &Designator,
    s2: &Designator,
    depth: usize,
    sess: &ProofSession,
) -> Result<(), ProofError> {
    proof_check(&transcribe(validations, p)?, s1, s2, depth, sess)
}

#[cfg(test)]
mod tests {
    use super::*;
    use corec_kernel::{Elem, UnaryOp};
    use corec_stream::StreamProg as P;

    fn env() -> DefEnv {
        let mut env = DefEnv::new();
        env.define("rep", P::cons(7, P::reference("rep")));
        env.define("nats", P::cons(0, P::map(UnaryOp::Suc, P::reference("nats"))));
        env.define("c", P::cons(0, P::cons(1, P::reference("c"))));
        env
    }

    fn repeat_refl() -> HypProof {
        HypProof::cons(7, HypProof::Hyp(0))
    }

    #[test]
    fn repeat_is_reflexive() {
        let rep = Designator::def("rep");
        hyp_check(&[], &repeat_refl(), &rep, &rep, &env()).unwrap();
        hyp_sound(&[], &repeat_refl(), &rep, &rep, 50, &ProofSession::new(Rc::new(env()))).unwrap();
    }

    #[test]
    fn structural_errors() {
        let (rep, nats) = (Designator::def("rep"), Designator::def("nats"));
        assert_eq!(hyp_check(&[], &HypProof::Hyp(0), &rep, &rep, &env()), Err(ProofError::BadIndex(0)));
        let five = Designator::prog(P::cons(5, P::reference("rep")));
        let seven = Designator::prog(P::cons(7, P::reference("rep")));
        let err = hyp_check(&[], &HypProof::cons(5, HypProof::Hyp(0)), &five, &seven, &env()).unwrap_err();
        assert_eq!(err, ProofError::HeadMismatch { index: 0, expected: Elem::Int(7), found: Elem::Int(5) });
        let err = hyp_check(&[], &HypProof::trans(nats.clone(), HypProof::Hyp(0), HypProof::Hyp(0)), &rep, &rep, &env()).unwrap_err();
        assert_eq!(err, ProofError::MiddleMismatch { index: 0 });
    }

    #[test]
    fn circular_proof_of_a_false_equation() {
        let (c, nats) = (Designator::def("c"), Designator::def("nats"));
        let p = HypProof::cons(0, HypProof::cons(1, HypProof::Hyp(1)));
        assert_eq!(hyp_check(&[], &p, &c, &nats, &env()), Err(ProofError::NotAHypothesis { hyp: 1, index: 2 }));
        let err = hyp_sound(&[], &p, &c, &nats, 10, &ProofSession::new(Rc::new(env()))).unwrap_err();
        assert!(matches!(err, ProofError::HeadMismatch { index: 2, .. }));
    }
}
