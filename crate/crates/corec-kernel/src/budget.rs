use std::cell::Cell;

use crate::elem::EvalError;

/// Step and nesting limits for one evaluation, with a fresh step allowance
/// for every demanded element.
#[derive(Debug)]
pub struct Budget {
    fuel: u64,
    max_depth: usize,
    element_steps: Cell<u64>,
    total_steps: Cell<u64>,
    depth: Cell<usize>,
}

impl Budget {
    pub fn new(fuel: u64, max_depth: usize) -> Self {
        Budget { fuel, max_depth, element_steps: Cell::new(0), total_steps: Cell::new(0), depth: Cell::new(0) }
    }

    pub fn fuel(&self) -> u64 {
        self.fuel
    }

    pub fn total_steps(&self) -> u64 {
        self.total_steps.get()
    }

    /// Starts the allowance for a new element.
    pub fn begin_element(&self) {
        self.element_steps.set(0);
    }

    pub fn step(&self) -> Result<(), EvalError> {
        let n = self.element_steps.get() + 1;
        self.element_steps.set(n);
        self.total_steps.set(self.total_steps.get() + 1);
        if n > self.fuel {
            return Err(EvalError::FuelExhausted { steps: n });
        }
        Ok(())
    }

    /// Runs `f` one nesting level deeper.
    pub fn nested<R>(&self, f: impl FnOnce() -> Result<R, EvalError>) -> Result<R, EvalError> {
        let d = self.depth.get();
        if d >= self.max_depth {
            return Err(EvalError::FuelExhausted { steps: self.element_steps.get() });
        }
        self.depth.set(d + 1);
        let r = f();
        self.depth.set(d);
        r
    }
}
