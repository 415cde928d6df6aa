use std::rc::Rc;

use corec_kernel::{
    bfs_labels, bisimilar_to_depth, sp_run, take_prefix, BinaryOp, Elem, Emit, FinTree, Next, Sp, SpProgram, Step, Stream, Susp, UnaryOp,
};
use proptest::prelude::*;

fn int_stream(items: Vec<i64>) -> Stream<Elem> {
    Stream::cycle(items.into_iter().map(Elem::from).collect())
}

/// One processor state: `gets` reads, a write, an optional second write,
/// then a jump.
#[derive(Clone, Debug)]
struct StateShape {
    gets: usize,
    emit_kind: u8,
    constant: i64,
    second_put: bool,
    target: usize,
}

fn state_shape() -> impl Strategy<Value = StateShape> {
    (0usize..=5, 0u8..4, -5i64..5, any::<bool>(), 0usize..4).prop_map(|(gets, emit_kind, constant, second_put, target)| StateShape {
        gets,
        emit_kind,
        constant,
        second_put,
        target,
    })
}

fn build_state(shape: &StateShape, n_states: usize) -> Step {
    let emit = match (shape.emit_kind, shape.gets) {
        (_, 0) | (0, _) => Emit::Const(Elem::from(shape.constant)),
        (1, _) => Emit::Input(0),
        (2, g) => (1..g).fold(Emit::Input(0), |acc, i| Emit::Binary(BinaryOp::Add, Box::new(acc), Box::new(Emit::Input(i)))),
        (_, g) => Emit::Unary(UnaryOp::Scale(shape.constant), Box::new(Emit::Input(g - 1))),
    };
    let jump = Next::Jump(shape.target % n_states);
    let next = if shape.second_put { Next::Continue(Box::new(Step::Put(Emit::Const(Elem::from(shape.constant)), jump))) } else { jump };
    (0..shape.gets).fold(Step::Put(emit, next), |acc, _| Step::Get(Box::new(acc)))
}

fn program() -> impl Strategy<Value = Rc<SpProgram>> {
    prop::collection::vec(state_shape(), 1..4).prop_map(|shapes| {
        let n = shapes.len();
        Rc::new(SpProgram::new(shapes.iter().map(|s| build_state(s, n)).collect()).unwrap())
    })
}

/// Level-by-level breadth-first order, computed without a queue.
fn levels_oracle<T: Clone>(t: &FinTree<T>) -> Vec<T> {
    let mut out = Vec::new();
    let mut level = vec![t];
    while !level.is_empty() {
        let mut next = Vec::new();
        for node in level {
            if let FinTree::Node(l, x, r) = node {
                out.push(x.clone());
                next.push(&**l);
                next.push(&**r);
            }
        }
        level = next;
    }
    out
}

fn fin_tree(depth: u32) -> impl Strategy<Value = FinTree<i64>> {
    let leaf = Just(FinTree::Leaf);
    leaf.prop_recursive(depth, 64, 2, |inner| {
        prop_oneof![
            1 => Just(FinTree::Leaf),
            3 => (inner.clone(), -100i64..100, inner).prop_map(|(l, x, r)| FinTree::node(l, x, r)),
        ]
    })
}

proptest! {
    #[test]
    fn prefix_monotonicity(items in prop::collection::vec(-50i64..50, 1..6), m in 0usize..30, extra in 0usize..30) {
        let s = int_stream(items);
        let short = take_prefix(&s, m).unwrap();
        let long = take_prefix(&s, m + extra).unwrap();
        prop_assert_eq!(&long[..m], &short[..]);
    }

    #[test]
    fn put_clause_emits_its_element(p in program(), b in -20i64..20, items in prop::collection::vec(0i64..10, 1..5)) {
        prop_assert!(p.max_get_chain() <= 5);
        let sp = Sp::Put(Elem::from(b), Susp::ready(p.start(0).unwrap()));
        let out = sp_run(&sp, &int_stream(items)).unwrap();
        prop_assert_eq!(*out.head(), Elem::from(b));
    }

    #[test]
    fn get_clause_consumes_one_element(p in program(), state in 0usize..4, items in prop::collection::vec(0i64..10, 1..5)) {
        let sp = p.start(state % p.states().len()).unwrap();
        let input = int_stream(items);
        if let Sp::Get(k) = &sp {
            let lhs = sp_run(&sp, &input).unwrap();
            let rhs = sp_run(&k.feed(*input.head()).unwrap(), &input.tail().unwrap()).unwrap();
            prop_assert!(bisimilar_to_depth(&lhs, &rhs, 20).unwrap());
        }
    }

    #[test]
    fn bfs_matches_level_oracle(t in fin_tree(6)) {
        let expected = levels_oracle(&t);
        let got = bfs_labels(&t.to_inf()).to_vec_bounded(200).unwrap().unwrap();
        prop_assert_eq!(got, expected);
    }
}

#[test]
fn processors_on_naturals() {
    let naturals = Stream::tabulate(|i| Elem::Int(i as i128));
    let doubled = sp_run(&Sp::doubler(), &naturals).unwrap();
    let expected: Vec<Elem> = (0..50).map(|n| Elem::Int(2 * n)).collect();
    assert_eq!(take_prefix(&doubled, 50).unwrap(), expected);
    let sums = sp_run(&Sp::pairwise_sum(), &naturals).unwrap();
    let expected: Vec<Elem> = (0..50).map(|k| Elem::Int(2 * k + (2 * k + 1))).collect();
    assert_eq!(take_prefix(&sums, 50).unwrap(), expected);
}
