//! Infinite streams and potentially finite colists.

use std::fmt;
use std::rc::Rc;

use crate::elem::EvalError;
use crate::susp::Susp;

/// An infinite stream: an available head and a suspended tail.
#[derive(Clone)]
pub struct Stream<T> {
    head: T,
    tail: Susp<Stream<T>>,
}

impl<T: Clone + 'static> Stream<T> {
    pub fn new(head: T, tail: Susp<Stream<T>>) -> Self {
        Stream { head, tail }
    }

    pub fn head(&self) -> &T {
        &self.head
    }

    pub fn tail(&self) -> Result<Stream<T>, EvalError> {
        self.tail.force()
    }

    pub fn tail_susp(&self) -> &Susp<Stream<T>> {
        &self.tail
    }

    /// Whether both values are the same stream cell.
    pub fn same_cell(a: &Self, b: &Self) -> bool {
        Susp::ptr_eq(&a.tail, &b.tail)
    }

    pub fn constant(value: T) -> Self {
        Self::iterate(value, |v| Ok(v.clone()))
    }

    /// `seed, f(seed), f(f(seed)), ...`
    pub fn iterate(seed: T, f: impl Fn(&T) -> Result<T, EvalError> + 'static) -> Self {
        Self::iterate_rc(seed, Rc::new(f))
    }

    fn iterate_rc(seed: T, f: StepFn<T, T>) -> Self {
        let next = seed.clone();
        let tail = Susp::memo(move || Ok(Self::iterate_rc(f(&next)?, Rc::clone(&f))));
        Stream::new(seed, tail)
    }

    /// The stream whose element at index `i` is `f(i)`.
    pub fn tabulate(f: impl Fn(u64) -> T + 'static) -> Self {
        Self::tabulate_from(0, Rc::new(f))
    }

    fn tabulate_from(i: u64, f: Rc<dyn Fn(u64) -> T>) -> Self {
        let head = f(i);
        Stream::new(head, Susp::memo(move || Ok(Self::tabulate_from(i + 1, Rc::clone(&f)))))
    }

    /// Repeats a nonempty list forever.
    pub fn cycle(items: Vec<T>) -> Self {
        assert!(!items.is_empty(), "cycle needs at least one element");
        let items = Rc::new(items);
        Self::tabulate(move |i| items[(i % items.len() as u64) as usize].clone())
    }

    pub fn map<U: Clone + 'static>(&self, f: impl Fn(&T) -> Result<U, EvalError> + 'static) -> Result<Stream<U>, EvalError> {
        map_rc(self.clone(), Rc::new(f))
    }

    pub fn zip_with<U: Clone + 'static, V: Clone + 'static>(
        &self,
        other: &Stream<U>,
        f: impl Fn(&T, &U) -> Result<V, EvalError> + 'static,
    ) -> Result<Stream<V>, EvalError> {
        zip_rc(self.clone(), other.clone(), Rc::new(f))
    }

    /// Prepends a finite list of elements.
    pub fn prepend(items: &[T], rest: Stream<T>) -> Self {
        items.iter().rev().fold(rest, |acc, x| Stream::new(x.clone(), Susp::ready(acc)))
    }

    /// Forces `n` tails.
    pub fn drop(&self, n: usize) -> Result<Stream<T>, EvalError> {
        let mut s = self.clone();
        for _ in 0..n {
            s = s.tail()?;
        }
        Ok(s)
    }

    pub fn prefix(&self, n: usize) -> Result<Vec<T>, EvalError> {
        take_prefix(self, n)
    }
}

type StepFn<T, U> = Rc<dyn Fn(&T) -> Result<U, EvalError>>;

fn map_rc<T: Clone + 'static, U: Clone + 'static>(s: Stream<T>, f: StepFn<T, U>) -> Result<Stream<U>, EvalError> {
    let head = f(s.head())?;
    let tail = Susp::memo(move || map_rc(s.tail()?, Rc::clone(&f)));
    Ok(Stream::new(head, tail))
}

type Zipper<T, U, V> = Rc<dyn Fn(&T, &U) -> Result<V, EvalError>>;

fn zip_rc<T: Clone + 'static, U: Clone + 'static, V: Clone + 'static>(
    a: Stream<T>,
    b: Stream<U>,
    f: Zipper<T, U, V>,
) -> Result<Stream<V>, EvalError> {
    let head = f(a.head(), b.head())?;
    let tail = Susp::memo(move || zip_rc(a.tail()?, b.tail()?, Rc::clone(&f)));
    Ok(Stream::new(head, tail))
}

impl<T: fmt::Debug> fmt::Debug for Stream<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} :: <susp>", self.head)
    }
}

/// The first `n` elements of `s`. Forces exactly `n` heads, that is
/// `n - 1` tails.
pub fn take_prefix<T: Clone + 'static>(s: &Stream<T>, n: usize) -> Result<Vec<T>, EvalError> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Ok(out);
    }
    let mut cur = s.clone();
    out.push(cur.head().clone());
    while out.len() < n {
        cur = cur.tail()?;
        out.push(cur.head().clone());
    }
    Ok(out)
}

/// Agreement of the first `n` elements; the observable part of bisimilarity.
pub fn bisimilar_to_depth<T: Clone + PartialEq + 'static>(a: &Stream<T>, b: &Stream<T>, n: usize) -> Result<bool, EvalError> {
    Ok(first_difference(a, b, n)?.is_none())
}

/// Index of the first disagreement within the first `n` elements.
pub fn first_difference<T: Clone + PartialEq + 'static>(a: &Stream<T>, b: &Stream<T>, n: usize) -> Result<Option<usize>, EvalError> {
    let (mut x, mut y) = (a.clone(), b.clone());
    for i in 0..n {
        if x.head() != y.head() {
            return Ok(Some(i));
        }
        if i + 1 < n {
            x = x.tail()?;
            y = y.tail()?;
        }
    }
    Ok(None)
}

/// A potentially finite list.
#[derive(Clone)]
pub enum Colist<T> {
    Nil,
    Cons(T, Susp<Colist<T>>),
}

impl<T: Clone + 'static> Colist<T> {
    pub fn from_vec(items: Vec<T>) -> Self {
        items.into_iter().rev().fold(Colist::Nil, |acc, x| Colist::Cons(x, Susp::ready(acc)))
    }

    /// At most `n` elements; forces at most `n` cells.
    pub fn prefix(&self, n: usize) -> Result<Vec<T>, EvalError> {
        let mut out = Vec::new();
        let mut cur = self.clone();
        while out.len() < n {
            match cur {
                Colist::Nil => break,
                Colist::Cons(x, rest) => {
                    out.push(x);
                    if out.len() == n {
                        break;
                    }
                    cur = rest.force()?;
                }
            }
        }
        Ok(out)
    }

    /// All elements of a colist known to be finite, giving up after `limit`.
    pub fn to_vec_bounded(&self, limit: usize) -> Result<Option<Vec<T>>, EvalError> {
        let items = self.prefix(limit + 1)?;
        Ok((items.len() <= limit).then_some(items))
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Colist::Nil)
    }
}

impl<T: fmt::Debug> fmt::Debug for Colist<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Colist::Nil => f.write_str("[]"),
            Colist::Cons(x, _) => write!(f, "{x:?} :: <susp>"),
        }
    }
}
