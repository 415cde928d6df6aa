use std::rc::Rc;

use corec_kernel::{bisimilar_to_depth, first_difference, take_prefix, BinaryOp, Elem, Stream, UnaryOp};
use corec_proof::{
    build_fusion_proof, fusion_sides, hyp_check, hyp_sound, proof_check, proof_whnf, transcribe, verify_unique, Designator, EqProof,
    HypProof, ProofError, ProofSession, Rhs,
};
use corec_stream::{interpret, DefEnv, EvalSession, Mode, StreamProg as P};
use proptest::prelude::*;

fn fib_body(s: &str) -> P {
    P::cons(0, P::zip_with(BinaryOp::Add, P::reference(s), P::cons(1, P::reference(s))))
}

fn env() -> Rc<DefEnv> {
    let mut env = DefEnv::new();
    env.define("fib", fib_body("fib"));
    env.define("nats", P::cons(0, P::map(UnaryOp::Suc, P::reference("nats"))));
    env.define("rep", P::cons(3, P::reference("rep")));
    env.define("c", P::cons(0, P::cons(1, P::reference("c"))));
    Rc::new(env)
}

fn fib_oracle(n: usize) -> Vec<Elem> {
    let (mut a, mut b) = (0i128, 1i128);
    (0..n)
        .map(|_| {
            let x = a;
            (a, b) = (b, a + b);
            Elem::Int(x)
        })
        .collect()
}

/// Fibonacci computed from pairs, independent of the stream language.
fn fib_by_pairs() -> Designator {
    let pairs =
        Stream::iterate((0i128, 1i128), |&(a, b)| a.checked_add(b).map(|c| (b, c)).ok_or(corec_kernel::EvalError::Overflow { op: "add" }));
    Designator::host("fib-pairs", pairs.map(|&(a, _)| Ok(Elem::Int(a))).unwrap())
}

fn stream_of(d: &Designator, sess: &ProofSession) -> Stream<Elem> {
    interpret(&d.to_prog(), sess.env(), &EvalSession::new(Mode::Memoized)).unwrap()
}

fn bump_at(s: Stream<Elem>, k: usize) -> Stream<Elem> {
    let items = take_prefix(&s, k + 1).unwrap();
    let mut bumped = items.clone();
    bumped[k] = UnaryOp::Suc.apply(bumped[k]).unwrap();
    Stream::prepend(&bumped, s.drop(k + 1).unwrap())
}

#[test]
fn perturbed_fib_is_refuted_where_it_differs() {
    let sess = ProofSession::new(env());
    let fib = Designator::def("fib");
    let bumped = Designator::host("fib-bumped", bump_at(stream_of(&fib, &sess), 5));
    for p in [EqProof::CompleteEmbed(fib.clone(), bumped.clone()), EqProof::Refl(fib.clone())] {
        let err = proof_check(&p, &fib, &bumped, 20, &sess).unwrap_err();
        assert!(matches!(err, ProofError::HeadMismatch { index: 5, .. }), "{err}");
    }
    proof_check(&EqProof::Refl(fib.clone()), &fib, &fib, 50, &sess).unwrap();
}

#[test]
fn fusion_law() {
    let sess = ProofSession::new(env());
    let (h, f1, f2) = (UnaryOp::Scale(2), UnaryOp::Offset(1), UnaryOp::Offset(2));
    let p = build_fusion_proof(h, f1, f2, Elem::Int(0)).unwrap();
    let (l, r) = fusion_sides(h, f1, f2, Elem::Int(0)).unwrap();
    proof_check(&p, &l, &r, 100, &sess).unwrap();
    let closed: Vec<Elem> = (0..100).map(|k| Elem::Int(2 * k)).collect();
    assert_eq!(take_prefix(&stream_of(&l, &sess), 100).unwrap(), closed);

    let id = build_fusion_proof(UnaryOp::Id, UnaryOp::Suc, UnaryOp::Suc, Elem::Int(4)).unwrap();
    let (l, r) = fusion_sides(UnaryOp::Id, UnaryOp::Suc, UnaryOp::Suc, Elem::Int(4)).unwrap();
    proof_check(&id, &l, &r, 100, &sess).unwrap();
    proof_check(&EqProof::Refl(l.clone()), &l, &r, 100, &sess).unwrap();

    let broken = build_fusion_proof(h, f1, UnaryOp::Offset(3), Elem::Int(0));
    assert_eq!(broken.unwrap_err(), ProofError::HypothesisViolated(Elem::Int(0)));
}

#[test]
fn hypothesis_failing_later_is_caught_when_reached() {
    // times2 . suc and times2 . times2 agree at 1 only
    let sess = ProofSession::new(env());
    let (h, f1, f2) = (UnaryOp::Scale(2), UnaryOp::Suc, UnaryOp::Scale(2));
    let p = build_fusion_proof(h, f1, f2, Elem::Int(1)).unwrap();
    let (l, r) = fusion_sides(h, f1, f2, Elem::Int(1)).unwrap();
    assert_eq!(proof_check(&p, &l, &r, 10, &sess).unwrap_err(), ProofError::HypothesisViolated(Elem::Int(2)));
    assert!(!bisimilar_to_depth(&stream_of(&l, &sess), &stream_of(&r, &sess), 10).unwrap());

    let p = build_fusion_proof(UnaryOp::Scale(0), UnaryOp::Suc, UnaryOp::Id, Elem::Int(0)).unwrap();
    let (l, r) = fusion_sides(UnaryOp::Scale(0), UnaryOp::Suc, UnaryOp::Id, Elem::Int(0)).unwrap();
    proof_check(&p, &l, &r, 50, &sess).unwrap();
}

#[test]
fn fib_equation_has_a_unique_solution() {
    let sess = ProofSession::new(env());
    let rhs = Rhs::new("s", fib_body("s"));
    let (fib, pairs) = (Designator::def("fib"), fib_by_pairs());
    verify_unique(&rhs, &fib, &pairs, 100, &sess).unwrap();
    verify_unique(&rhs, &pairs, &pairs, 100, &sess).unwrap();
    for d in [&fib, &pairs] {
        assert_eq!(take_prefix(&stream_of(d, &sess), 100).unwrap(), fib_oracle(100));
    }
}

#[test]
fn naturals_fail_the_fib_equation_at_two() {
    let sess = ProofSession::new(env());
    let rhs = Rhs::of_definition(sess.env(), "fib").unwrap();
    let nats = Designator::def("nats");
    let image = stream_of(&rhs.apply(&nats), &sess);
    let direct = first_difference(&stream_of(&nats, &sess), &image, 50).unwrap();
    assert_eq!(direct, Some(2));
    let err = verify_unique(&rhs, &Designator::def("fib"), &nats, 50, &sess).unwrap_err();
    assert_eq!(err, ProofError::NotASolution { which: "nats".into(), index: 2 });
}

#[test]
fn repeat_refl() {
    let rep = Designator::def("rep");
    let p = HypProof::cons(3, HypProof::Hyp(0));
    hyp_check(&[], &p, &rep, &rep, &env()).unwrap();
    hyp_sound(&[], &p, &rep, &rep, 50, &ProofSession::new(env())).unwrap();
}

#[test]
fn circular_proofs_over_unequal_streams() {
    let sess = ProofSession::new(env());
    let (c, nats) = (Designator::def("c"), Designator::def("nats"));
    let p = HypProof::cons(0, HypProof::cons(1, HypProof::Hyp(1)));
    let at = first_difference(&stream_of(&c, &sess), &stream_of(&nats, &sess), 10).unwrap();
    assert_eq!(at, Some(2));
    assert!(hyp_check(&[], &p, &c, &nats, &env()).is_err());
    let err = hyp_sound(&[], &p, &c, &nats, 10, &sess).unwrap_err();
    assert!(matches!(err, ProofError::HeadMismatch { index: 2, .. }), "{err}");

    let nines = Designator::prog(P::cons(0, P::cons(1, P::cons(2, P::cons(9, P::reference("nats"))))));
    let p = HypProof::cons(0, HypProof::cons(1, HypProof::cons(2, HypProof::cons(3, HypProof::Hyp(0)))));
    assert!(matches!(hyp_check(&[], &p, &nines, &nats, &env()), Err(ProofError::HeadMismatch { index: 3, .. })));
    let err = hyp_sound(&[], &p, &nines, &nats, 10, &sess).unwrap_err();
    assert!(matches!(err, ProofError::HeadMismatch { index: 3, .. }), "{err}");
}

#[test]
fn hypothesis_free_proofs_reduce_to_plain_checking() {
    let sess = ProofSession::new(env());
    let nats = Designator::def("nats");
    let p = HypProof::trans(nats.clone(), HypProof::cons(0, HypProof::Hyp(0)), HypProof::Hyp(0));
    let refl = EqProof::Refl(nats.clone());
    hyp_sound(std::slice::from_ref(&refl), &HypProof::Hyp(0), &nats, &nats, 30, &sess).unwrap();
    let transcribed = transcribe(&[refl], &p).unwrap();
    assert_eq!(transcribed.trans_nodes(), 1);
}

#[test]
fn trans_steps_are_bounded_by_trans_nodes() {
    let sess = ProofSession::new(env());
    let fib = Designator::def("fib");
    let mut p = EqProof::Refl(fib.clone());
    for _ in 0..7 {
        p = EqProof::trans(fib.clone(), p, EqProof::CompleteEmbed(fib.clone(), fib.clone()));
    }
    let mut rest = p.clone();
    for index in 0..20 {
        let before = sess.trans_steps();
        let w = proof_whnf(&rest, &sess, index).unwrap();
        assert_eq!(sess.trans_steps() - before, rest.trans_nodes() as u64);
        assert_eq!(rest.trans_nodes(), 7);
        rest = w.rest;
    }
    assert_eq!(proof_whnf(&p.clone(), &sess, 0).unwrap().head, Elem::Int(0));
}

#[test]
fn refl_is_a_unit_for_trans() {
    let sess = ProofSession::new(env());
    let (fib, pairs) = (Designator::def("fib"), fib_by_pairs());
    let p = EqProof::CompleteEmbed(fib.clone(), pairs.clone());
    let chained = EqProof::trans(pairs.clone(), p.clone(), EqProof::Refl(pairs.clone()));
    let (mut a, mut b) = (p, chained);
    for index in 0..50 {
        let (wa, wb) = (proof_whnf(&a, &sess, index).unwrap(), proof_whnf(&b, &sess, index).unwrap());
        assert_eq!(wa.head, wb.head);
        (a, b) = (wa.rest, wb.rest);
    }
}

fn stream_pair() -> impl Strategy<Value = (Vec<i128>, Option<usize>)> {
    (prop::collection::vec(-5i128..5, 1..6), prop::option::of(0usize..60))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn complete_embedding_checks_exactly_prefix_equality((items, bump) in stream_pair(), depth in 0usize..=50) {
        let sess = ProofSession::new(env());
        let base = Stream::cycle(items.into_iter().map(Elem::Int).collect());
        let other = match bump {
            Some(k) => bump_at(base.clone(), k),
            None => base.clone(),
        };
        let (s1, s2) = (Designator::host("a", base.clone()), Designator::host("b", other.clone()));
        let ok = proof_check(&EqProof::CompleteEmbed(s1.clone(), s2.clone()), &s1, &s2, depth, &sess).is_ok();
        prop_assert_eq!(ok, bisimilar_to_depth(&base, &other, depth).unwrap());
        // any other proof shape is sound as well
        let trans = EqProof::trans(s1.clone(), EqProof::Refl(s1.clone()), EqProof::CompleteEmbed(s1.clone(), s2.clone()));
        for p in [EqProof::Refl(s1.clone()), EqProof::Refl(s2.clone()), trans] {
            if proof_check(&p, &s1, &s2, depth, &sess).is_ok() {
                prop_assert!(bisimilar_to_depth(&base, &other, depth).unwrap());
            }
        }
    }

    #[test]
    fn corpus_proofs_are_sound(depth in 0usize..=100, x in -20i128..20) {
        let sess = ProofSession::new(env());
        let (h, f1, f2) = (UnaryOp::Scale(2), UnaryOp::Offset(1), UnaryOp::Offset(2));
        let p = build_fusion_proof(h, f1, f2, Elem::Int(x)).unwrap();
        let (l, r) = fusion_sides(h, f1, f2, Elem::Int(x)).unwrap();
        prop_assert!(proof_check(&p, &l, &r, depth, &sess).is_ok());
        prop_assert!(bisimilar_to_depth(&stream_of(&l, &sess), &stream_of(&r, &sess), depth).unwrap());

        let rhs = Rhs::new("s", fib_body("s"));
        if verify_unique(&rhs, &Designator::def("fib"), &fib_by_pairs(), depth, &sess).is_ok() {
            prop_assert!(bisimilar_to_depth(&stream_of(&Designator::def("fib"), &sess), &stream_of(&fib_by_pairs(), &sess), depth).unwrap());
        }
    }
}
