//! Suspended computations.

use std::cell::RefCell;
use std::fmt;
use std::rc::Rc;

use crate::elem::EvalError;

type Compute<A> = Box<dyn Fn() -> Result<A, EvalError>>;

struct Inner<A> {
    compute: Compute<A>,
    cache: Option<RefCell<Option<Result<A, EvalError>>>>,
}

/// A deferred computation. Cloning shares the same suspension.
///
/// A memoizing suspension runs its computation at most once; a plain one
/// reruns it on every `force`.
pub struct Susp<A>(Rc<Inner<A>>);

impl<A> Clone for Susp<A> {
    fn clone(&self) -> Self {
        Susp(Rc::clone(&self.0))
    }
}

impl<A: Clone + 'static> Susp<A> {
    /// A memoizing suspension.
    pub fn memo(f: impl Fn() -> Result<A, EvalError> + 'static) -> Self {
        Susp(Rc::new(Inner { compute: Box::new(f), cache: Some(RefCell::new(None)) }))
    }

    /// A suspension that recomputes its value whenever it is forced.
    pub fn rerun(f: impl Fn() -> Result<A, EvalError> + 'static) -> Self {
        Susp(Rc::new(Inner { compute: Box::new(f), cache: None }))
    }

    /// Either a memoizing or a recomputing suspension.
    pub fn new(memoize: bool, f: impl Fn() -> Result<A, EvalError> + 'static) -> Self {
        if memoize {
            Self::memo(f)
        } else {
            Self::rerun(f)
        }
    }

    /// An already evaluated value.
    pub fn ready(value: A) -> Self {
        Susp(Rc::new(Inner {
            compute: Box::new(|| Err(EvalError::Stuck("ready suspension recomputed".into()))),
            cache: Some(RefCell::new(Some(Ok(value)))),
        }))
    }

    pub fn force(&self) -> Result<A, EvalError> {
        let Some(cell) = &self.0.cache else {
            return (self.0.compute)();
        };
        if let Some(done) = cell.borrow().as_ref() {
            return done.clone();
        }
        let result = (self.0.compute)();
        *cell.borrow_mut() = Some(result.clone());
        result
    }

    /// Whether both handles share one suspension.
    pub fn ptr_eq(a: &Self, b: &Self) -> bool {
        Rc::ptr_eq(&a.0, &b.0)
    }

    pub fn is_memoizing(&self) -> bool {
        self.0.cache.is_some()
    }
}

impl<A> fmt::Debug for Susp<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<susp>")
    }
}
