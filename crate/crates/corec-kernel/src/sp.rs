//! Stream processors.
//!
//! A processor is a machine that alternately reads (`get`) elements from an
//! input stream and writes (`put`) elements to its output. Continuations of
//! `get` are not arbitrary host closures but finite recipes ([`Step`]
//! trees), and a recipe may jump back to a named state only right after a
//! `put`. Every run of consecutive `get`s therefore ends after finitely many
//! reads, so a processor that only ever reads cannot be written.

use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::elem::{BinaryOp, Elem, EvalError, UnaryOp};
use crate::stream::Stream;
use crate::susp::Susp;

/// An output expression over the elements read since the last jump.
#[derive(Clone, Debug, PartialEq)]
pub enum Emit {
    /// The `k`-th element read in the current state, counting from 0.
    Input(usize),
    Const(Elem),
    Unary(UnaryOp, Box<Emit>),
    Binary(BinaryOp, Box<Emit>, Box<Emit>),
}

/// One node of a processor recipe.
#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Get(Box<Step>),
    Put(Emit, Next),
    /// Branch on an element read earlier in the current state.
    Case {
        on: usize,
        arms: Vec<(Elem, Step)>,
        otherwise: Box<Step>,
    },
}

/// What follows a `put`.
#[derive(Clone, Debug, PartialEq)]
pub enum Next {
    /// Restart at a state; the read elements are discarded.
    Jump(usize),
    Continue(Box<Step>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SpError {
    #[error("processor has no states")]
    Empty,
    #[error("state {state} refers to input {index}, but only {available} elements are read at that point")]
    UnboundInput { state: usize, index: usize, available: usize },
    #[error("state {state} jumps to unknown state {target}")]
    UnknownState { state: usize, target: usize },
}

/// A validated set of processor states.
#[derive(Clone, Debug, PartialEq)]
pub struct SpProgram {
    states: Vec<Step>,
}

impl SpProgram {
    pub fn new(states: Vec<Step>) -> Result<Self, SpError> {
        if states.is_empty() {
            return Err(SpError::Empty);
        }
        for (i, s) in states.iter().enumerate() {
            validate(s, i, 0, states.len())?;
        }
        Ok(SpProgram { states })
    }

    pub fn states(&self) -> &[Step] {
        &self.states
    }

    /// Longest run of reads between two writes, over all paths.
    pub fn max_get_chain(&self) -> usize {
        self.states.iter().map(chain).max().unwrap_or(0)
    }

    /// The processor at state `state`.
    pub fn start(self: &Rc<Self>, state: usize) -> Result<Sp, EvalError> {
        eval_step(self, &self.states[state], Rc::new(Vec::new()))
    }
}

fn validate(step: &Step, state: usize, bound: usize, n_states: usize) -> Result<(), SpError> {
    match step {
        Step::Get(next) => validate(next, state, bound + 1, n_states),
        Step::Put(e, next) => {
            validate_emit(e, state, bound)?;
            match next {
                Next::Jump(target) if *target >= n_states => Err(SpError::UnknownState { state, target: *target }),
                Next::Jump(_) => Ok(()),
                Next::Continue(s) => validate(s, state, bound, n_states),
            }
        }
        Step::Case { on, arms, otherwise } => {
            if *on >= bound {
                return Err(SpError::UnboundInput { state, index: *on, available: bound });
            }
            for (_, arm) in arms {
                validate(arm, state, bound, n_states)?;
            }
            validate(otherwise, state, bound, n_states)
        }
    }
}

fn validate_emit(e: &Emit, state: usize, bound: usize) -> Result<(), SpError> {
    match e {
        Emit::Input(index) if *index >= bound => Err(SpError::UnboundInput { state, index: *index, available: bound }),
        Emit::Input(_) | Emit::Const(_) => Ok(()),
        Emit::Unary(_, a) => validate_emit(a, state, bound),
        Emit::Binary(_, a, b) => {
            validate_emit(a, state, bound)?;
            validate_emit(b, state, bound)
        }
    }
}

fn chain(step: &Step) -> usize {
    match step {
        Step::Get(next) => 1 + chain(next),
        Step::Put(_, Next::Jump(_)) => 0,
        Step::Put(_, Next::Continue(s)) => chain(s),
        Step::Case { arms, otherwise, .. } => arms.iter().map(|(_, s)| chain(s)).chain([chain(otherwise)]).max().unwrap_or(0),
    }
}

fn emit(e: &Emit, read: &[Elem]) -> Result<Elem, EvalError> {
    match e {
        Emit::Input(i) => Ok(read[*i]),
        Emit::Const(v) => Ok(*v),
        Emit::Unary(op, a) => op.apply(emit(a, read)?),
        Emit::Binary(op, a, b) => op.apply(emit(a, read)?, emit(b, read)?),
    }
}

fn eval_step(program: &Rc<SpProgram>, step: &Step, read: Rc<Vec<Elem>>) -> Result<Sp, EvalError> {
    match step {
        Step::Get(next) => Ok(Sp::Get(GetCont { program: Rc::clone(program), read, next: Rc::new((**next).clone()) })),
        Step::Put(e, next) => {
            let out = emit(e, &read)?;
            let program = Rc::clone(program);
            let next = next.clone();
            let rest = Susp::memo(move || match &next {
                Next::Jump(target) => program.start(*target),
                Next::Continue(s) => eval_step(&program, s, Rc::clone(&read)),
            });
            Ok(Sp::Put(out, rest))
        }
        Step::Case { on, arms, otherwise } => {
            let v = read[*on];
            let chosen = arms.iter().find(|(k, _)| *k == v).map(|(_, s)| s).unwrap_or(otherwise);
            eval_step(program, chosen, read)
        }
    }
}

/// A running stream processor.
#[derive(Clone)]
pub enum Sp {
    Put(Elem, Susp<Sp>),
    Get(GetCont),
}

/// The continuation of a `get`: a total function from the element read to
/// the next processor.
#[derive(Clone)]
pub struct GetCont {
    program: Rc<SpProgram>,
    read: Rc<Vec<Elem>>,
    next: Rc<Step>,
}

impl GetCont {
    pub fn feed(&self, x: Elem) -> Result<Sp, EvalError> {
        let mut read = (*self.read).clone();
        read.push(x);
        eval_step(&self.program, &self.next, Rc::new(read))
    }
}

impl fmt::Debug for Sp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sp::Put(x, _) => write!(f, "put {x} <susp>"),
            Sp::Get(_) => f.write_str("get <recipe>"),
        }
    }
}

impl Sp {
    /// Reads one element and writes it doubled, forever.
    pub fn doubler() -> Sp {
        let double = Step::Get(Box::new(Step::Put(Emit::Unary(UnaryOp::Scale(2), Box::new(Emit::Input(0))), Next::Jump(0))));
        Self::single_state(double)
    }

    /// Reads two elements and writes their sum, forever.
    pub fn pairwise_sum() -> Sp {
        let sum = Emit::Binary(BinaryOp::Add, Box::new(Emit::Input(0)), Box::new(Emit::Input(1)));
        Self::single_state(Step::Get(Box::new(Step::Get(Box::new(Step::Put(sum, Next::Jump(0)))))))
    }

    /// Writes `x` forever without reading.
    pub fn constant(x: Elem) -> Sp {
        Self::single_state(Step::Put(Emit::Const(x), Next::Jump(0)))
    }

    fn single_state(step: Step) -> Sp {
        let program = Rc::new(SpProgram::new(vec![step]).expect("built-in processor is valid"));
        program.start(0).expect("built-in processor starts without arithmetic")
    }
}

/// Runs a processor on an input stream.
pub fn sp_run(sp: &Sp, input: &Stream<Elem>) -> Result<Stream<Elem>, EvalError> {
    let mut sp = sp.clone();
    let mut input = input.clone();
    loop {
        match sp {
            Sp::Put(out, rest) => {
                let tail = Susp::memo(move || sp_run(&rest.force()?, &input));
                return Ok(Stream::new(out, tail));
            }
            Sp::Get(k) => {
                sp = k.feed(*input.head())?;
                input = input.tail()?;
            }
        }
    }
}
