//! Uniqueness of solutions of guarded stream equations `s = rhs(s)`.

use std::rc::Rc;

use corec_stream::{DefEnv, Delayed, Name, StreamProg};

use crate::designator::Designator;
use crate::error::ProofError;
use crate::proof::{proof_check, DelayedProof, EqProof, ProofSession};

/// The right-hand side `rhs(s) = body[param := s]`.
#[derive(Clone, Debug)]
pub struct Rhs {
    param: Name,
    body: StreamProg,
}

impl Rhs {
    pub fn new(param: &str, body: StreamProg) -> Self {
        Rhs { param: Name::new(param), body }
    }

    /// The equation a definition states about itself.
    pub fn of_definition(env: &DefEnv, name: &str) -> Option<Self> {
        let body = env.body(&Name::new(name))?;
        Some(Rhs::new(name, (**body).clone()))
    }

    pub fn apply(&self, s: &Designator) -> Designator {
        Designator::prog(self.body.substitute(&self.param, &s.to_prog()))
    }

    /// Relates `rhs(ms)` and `rhs(ns)` given `rec`, a proof of `ms = ns`.
    fn congruence(&self, p: &StreamProg, rec: &EqProof) -> Result<EqProof, ProofError> {
        if !p.references().contains(&self.param) {
            return Ok(EqProof::Refl(Designator::prog(p.clone())));
        }
        Ok(match p {
            StreamProg::Ref(_) => rec.clone(),
            StreamProg::Cons(h, Delayed(t)) => EqProof::Cons(*h, DelayedProof::ready(self.congruence(t, rec)?)),
            StreamProg::ZipWith(op, a, b) => EqProof::zip_with_cong(*op, self.congruence(a, rec)?, self.congruence(b, rec)?),
            StreamProg::Map(op, a) => EqProof::map_cong(*op, self.congruence(a, rec)?),
            StreamProg::UserFun(f, a) => EqProof::UfunCong(f.clone(), Rc::new(self.congruence(a, rec)?)),
            other => return Err(ProofError::NoCongruence(other.to_string())),
        })
    }
}

/// Checks `ms = rhs(ms)` and `ns = rhs(ns)` to `depth`, then checks the
/// corecursive proof `ms = rhs(ms) = rhs(ns) = ns` to `depth`.
pub fn verify_unique(rhs: &Rhs, ms: &Designator, ns: &Designator, depth: usize, sess: &ProofSession) -> Result<(), ProofError> {
    for s in [ms, ns] {
        let image = rhs.apply(s);
        proof_check(&EqProof::CompleteEmbed(s.clone(), image.clone()), s, &image, depth, sess).map_err(|e| match e {
            ProofError::HeadMismatch { index, .. } => ProofError::NotASolution { which: s.to_string(), index },
            other => other,
        })?;
    }
    let (rm, rn) = (rhs.apply(ms), rhs.apply(ns));
    let mut cong = Ok(());
    let proof = EqProof::knot(|me| match rhs.congruence(&rhs.body, &me) {
        Ok(middle) => EqProof::trans(
            rm.clone(),
            EqProof::CompleteEmbed(ms.clone(), rm.clone()),
            EqProof::trans(rn.clone(), middle, EqProof::CompleteEmbed(rn.clone(), ns.clone())),
        ),
        Err(e) => {
            cong = Err(e);
            EqProof::Refl(ms.clone())
        }
    });
    cong?;
    proof_check(&proof, ms, ns, depth, sess)
}

#[cfg(test)]
mod tests {
    use super::*;
    use corec_kernel::{BinaryOp, UnaryOp};
    use corec_stream::StreamProg as P;

    fn fib_rhs(s: &str) -> P {
        P::cons(0, P::zip_with(BinaryOp::Add, P::reference(s), P::cons(1, P::reference(s))))
    }

    fn env() -> Rc<DefEnv> {
        let mut env = DefEnv::new();
        env.define("fib", fib_rhs("fib"));
        env.define("nats", P::cons(0, P::map(UnaryOp::Suc, P::reference("nats"))));
        Rc::new(env)
    }

    #[test]
    fn fib_is_the_unique_solution() {
        let sess = ProofSession::new(env());
        let rhs = Rhs::new("s", fib_rhs("s"));
        verify_unique(&rhs, &Designator::def("fib"), &Designator::def("fib"), 50, &sess).unwrap();
    }

    #[test]
    fn naturals_are_not_a_solution() {
        let sess = ProofSession::new(env());
        let rhs = Rhs::of_definition(sess.env(), "fib").unwrap();
        let err = verify_unique(&rhs, &Designator::def("fib"), &Designator::def("nats"), 50, &sess).unwrap_err();
        assert_eq!(err, ProofError::NotASolution { which: "nats".into(), index: 2 });
    }

    #[test]
    fn merge_has_no_congruence() {
        let sess = ProofSession::new(env());
        let rhs = Rhs::new("s", P::cons(0, P::merge(P::reference("s"), P::reference("s"))));
        let zeros = Designator::prog(P::cons(0, P::cons(0, P::reference("nats"))));
        let err = verify_unique(&rhs, &zeros, &zeros, 1, &sess).unwrap_err();
        assert!(matches!(err, ProofError::NoCongruence(_)));
    }
}
