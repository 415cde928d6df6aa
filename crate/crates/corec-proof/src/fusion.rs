//! The iterate fusion law: `map h (iterate f1 x) = iterate f2 (h x)`
//! whenever `h . f1 = f2 . h`.

use corec_kernel::{Elem, Stream, UnaryOp};

use crate::designator::Designator;
use crate::error::ProofError;
use crate::proof::EqProof;

pub fn iterate_designator(f: UnaryOp, seed: Elem) -> Designator {
    Designator::host(&format!("iterate {f} {seed}"), Stream::iterate(seed, move |v| f.apply(*v)))
}

/// The two sides of the law, `map h (iterate f1 x)` and `iterate f2 (h x)`.
pub fn fusion_sides(h: UnaryOp, f1: UnaryOp, f2: UnaryOp, x: Elem) -> Result<(Designator, Designator), ProofError> {
    let lhs = Stream::iterate(x, move |v| f1.apply(*v)).map(move |v| h.apply(*v))?;
    let lhs = Designator::host(&format!("map {h} (iterate {f1} {x})"), lhs);
    Ok((lhs, iterate_designator(f2, h.apply(x)?)))
}

fn commutes(h: UnaryOp, f1: UnaryOp, f2: UnaryOp, v: Elem) -> Result<(Elem, Elem), ProofError> {
    let (a, b) = (h.apply(f1.apply(v)?)?, f2.apply(h.apply(v)?)?);
    if a == b {
        Ok((a, b))
    } else {
        Err(ProofError::HypothesisViolated(v))
    }
}

/// The guarded fusion proof at seed `x`. The hypothesis is checked at
/// `x` now and at every later seed when the proof is unfolded that far.
pub fn build_fusion_proof(h: UnaryOp, f1: UnaryOp, f2: UnaryOp, x: Elem) -> Result<EqProof, ProofError> {
    let (a, b) = commutes(h, f1, f2, x)?;
    let hx = h.apply(x)?;
    let next = f1.apply(x)?;
    Ok(EqProof::cons(hx, move || {
        // map h (iterate f1 (f1 x))
        //   = iterate f2 (h (f1 x))    by fusion at f1 x
        //   = iterate f2 (f2 (h x))    by the hypothesis
        //   = tail (iterate f2 (h x))  by definition
        let (mid1, mid2) = (iterate_designator(f2, a), iterate_designator(f2, b));
        let step = EqProof::trans(mid2.clone(), iterate_cong(f2, a, b, x)?, EqProof::Refl(mid2));
        Ok(EqProof::trans(mid1, build_fusion_proof(h, f1, f2, next)?, step))
    }))
}

/// `iterate f a = iterate f b`, given `a = b` by the hypothesis at `v`.
fn iterate_cong(f: UnaryOp, a: Elem, b: Elem, v: Elem) -> Result<EqProof, ProofError> {
    if a != b {
        return Err(ProofError::HypothesisViolated(v));
    }
    Ok(EqProof::cons(a, move || iterate_cong(f, f.apply(a)?, f.apply(b)?, v)))
}
