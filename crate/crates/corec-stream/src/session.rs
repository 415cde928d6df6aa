use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use corec_kernel::{Elem, EvalError};

use crate::name::Name;
use crate::prog::StreamProg;

/// Default budget of unfolding steps per demanded element.
pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Deepest nesting of weak head normalisation before evaluation gives up.
/// Deeper nesting only arises from definitions that escaped checking.
pub const MAX_DEPTH: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Nothing is shared: every reference is unfolded afresh.
    Naive,
    /// The `k`-th tail of each definition is computed once per session.
    Memoized,
}

/// Work counters. A step is one unfolding of a definition or one
/// application of a function rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub adds: u64,
    pub ops: u64,
    pub steps: u64,
}

#[derive(Clone, Debug)]
pub(crate) struct MemoCell {
    pub head: Elem,
    pub raw_tail: Rc<StreamProg>,
}

#[derive(Debug)]
struct State {
    mode: Mode,
    fuel: u64,
    counters: Counters,
    element_steps: u64,
    depth: usize,
    memo: HashMap<(Name, usize), MemoCell>,
    in_progress: HashSet<(Name, usize)>,
}

/// Evaluation state shared by a program and the streams produced from it.
/// Cloning yields another handle on the same session.
#[derive(Clone, Debug)]
pub struct EvalSession(Rc<RefCell<State>>);

impl EvalSession {
    pub fn new(mode: Mode) -> Self {
        Self::with_fuel(mode, DEFAULT_FUEL)
    }

    pub fn with_fuel(mode: Mode, fuel: u64) -> Self {
        EvalSession(Rc::new(RefCell::new(State {
            mode,
            fuel,
            counters: Counters::default(),
            element_steps: 0,
            depth: 0,
            memo: HashMap::new(),
            in_progress: HashSet::new(),
        })))
    }

    pub fn mode(&self) -> Mode {
        self.0.borrow().mode
    }

    pub fn fuel(&self) -> u64 {
        self.0.borrow().fuel
    }

    pub fn counters(&self) -> Counters {
        self.0.borrow().counters
    }

    pub(crate) fn begin_element(&self) {
        self.0.borrow_mut().element_steps = 0;
    }

    pub(crate) fn step(&self) -> Result<(), EvalError> {
        let mut s = self.0.borrow_mut();
        s.counters.steps += 1;
        s.element_steps += 1;
        if s.element_steps > s.fuel {
            return Err(EvalError::FuelExhausted { steps: s.element_steps });
        }
        Ok(())
    }

    pub(crate) fn count_op(&self, is_add: bool) {
        let mut s = self.0.borrow_mut();
        s.counters.ops += 1;
        s.counters.adds += u64::from(is_add);
    }

    pub(crate) fn count_ops(&self, ops: u64, adds: u64) {
        let mut s = self.0.borrow_mut();
        s.counters.ops += ops;
        s.counters.adds += adds;
    }

    pub(crate) fn enter(&self) -> Result<(), EvalError> {
        let mut s = self.0.borrow_mut();
        s.depth += 1;
        if s.depth > MAX_DEPTH {
            s.depth -= 1;
            return Err(EvalError::FuelExhausted { steps: s.element_steps });
        }
        Ok(())
    }

    pub(crate) fn leave(&self) {
        self.0.borrow_mut().depth -= 1;
    }

    pub(crate) fn memo_get(&self, name: &Name, index: usize) -> Option<MemoCell> {
        self.0.borrow().memo.get(&(name.clone(), index)).cloned()
    }

    pub(crate) fn memo_begin(&self, name: &Name, index: usize) -> Result<(), EvalError> {
        let mut s = self.0.borrow_mut();
        if !s.in_progress.insert((name.clone(), index)) {
            return Err(EvalError::FuelExhausted { steps: s.element_steps });
        }
        Ok(())
    }

    pub(crate) fn memo_end(&self, name: &Name, index: usize, cell: Option<MemoCell>) {
        let mut s = self.0.borrow_mut();
        s.in_progress.remove(&(name.clone(), index));
        if let Some(cell) = cell {
            s.memo.insert((name.clone(), index), cell);
        }
    }
}
