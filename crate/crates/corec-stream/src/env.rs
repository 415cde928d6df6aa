use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use corec_kernel::{BinaryOp, Elem, EvalError, UnaryOp};
use thiserror::Error;

use crate::name::Name;
use crate::prog::{Delayed, StreamProg};

/// The head of a function's result, computed from the head of its argument.
#[derive(Clone, Debug, PartialEq)]
pub enum HeadExpr {
    Input,
    Const(Elem),
    Unary(UnaryOp, Box<HeadExpr>),
    Binary(BinaryOp, Box<HeadExpr>, Box<HeadExpr>),
}

impl HeadExpr {
    pub fn eval(&self, input: Elem) -> Result<Elem, EvalError> {
        match self {
            HeadExpr::Input => Ok(input),
            HeadExpr::Const(v) => Ok(*v),
            HeadExpr::Unary(op, a) => op.apply(a.eval(input)?),
            HeadExpr::Binary(op, a, b) => op.apply(a.eval(input)?, b.eval(input)?),
        }
    }

    /// Number of operator applications performed by `eval`.
    pub fn op_count(&self) -> u64 {
        match self {
            HeadExpr::Input | HeadExpr::Const(_) => 0,
            HeadExpr::Unary(_, a) => 1 + a.op_count(),
            HeadExpr::Binary(_, a, b) => 1 + a.op_count() + b.op_count(),
        }
    }

    pub fn add_count(&self) -> u64 {
        match self {
            HeadExpr::Input | HeadExpr::Const(_) => 0,
            HeadExpr::Unary(_, a) => a.add_count(),
            HeadExpr::Binary(op, a, b) => u64::from(*op == BinaryOp::Add) + a.add_count() + b.add_count(),
        }
    }
}

/// The tail of a function's result: a program over the argument's tail.
#[derive(Clone, Debug, PartialEq)]
pub enum Template {
    InputTail,
    Cons(HeadExpr, Box<Template>),
    ZipWith(BinaryOp, Box<Template>, Box<Template>),
    Map(UnaryOp, Box<Template>),
    Merge(Box<Template>, Box<Template>),
    UserFun(Name, Box<Template>),
    Ref(Name),
}

impl Template {
    pub fn instantiate(&self, head: Elem, tail: &Rc<StreamProg>) -> Result<StreamProg, EvalError> {
        let inst = |t: &Template| t.instantiate(head, tail).map(Rc::new);
        Ok(match self {
            Template::InputTail => (**tail).clone(),
            Template::Cons(h, t) => StreamProg::Cons(h.eval(head)?, Delayed(inst(t)?)),
            Template::ZipWith(op, a, b) => StreamProg::ZipWith(*op, inst(a)?, inst(b)?),
            Template::Map(op, a) => StreamProg::Map(*op, inst(a)?),
            Template::Merge(a, b) => StreamProg::Merge(inst(a)?, inst(b)?),
            Template::UserFun(f, a) => StreamProg::UserFun(f.clone(), inst(a)?),
            Template::Ref(n) => StreamProg::Ref(n.clone()),
        })
    }

    fn visit_names(&self, funs: &mut Vec<Name>, refs: &mut Vec<Name>) {
        match self {
            Template::InputTail => {}
            Template::Cons(_, t) | Template::Map(_, t) => t.visit_names(funs, refs),
            Template::ZipWith(_, a, b) | Template::Merge(a, b) => {
                a.visit_names(funs, refs);
                b.visit_names(funs, refs);
            }
            Template::UserFun(f, t) => {
                funs.push(f.clone());
                t.visit_names(funs, refs);
            }
            Template::Ref(n) => refs.push(n.clone()),
        }
    }
}

/// How a user function acts on a weak head normal form: `f (x :: xs)` is
/// `head(x) :: tail(xs)`. Rules never evaluate anything themselves, they
/// only build programs.
#[derive(Clone, Debug, PartialEq)]
pub struct FunRule {
    pub head: HeadExpr,
    pub tail: Template,
}

impl FunRule {
    /// `f (x :: xs) = x :: f (f xs)`
    pub fn nested(name: &str) -> Self {
        let f = Name::new(name);
        FunRule { head: HeadExpr::Input, tail: Template::UserFun(f.clone(), Box::new(Template::UserFun(f, Box::new(Template::InputTail)))) }
    }
}

/// Named stream definitions and user-function rules.
#[derive(Clone, Debug, Default)]
pub struct DefEnv {
    defs: BTreeMap<Name, Rc<StreamProg>>,
    funs: BTreeMap<Name, Rc<FunRule>>,
}

impl DefEnv {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces a definition.
    pub fn define(&mut self, name: &str, body: StreamProg) -> &mut Self {
        self.defs.insert(Name::new(name), Rc::new(body));
        self
    }

    /// Registers a function rule. Functions mentioned by the rule must be
    /// registered already or be the function itself.
    pub fn register_fun(&mut self, name: &str, rule: FunRule) -> Result<&mut Self, GuardError> {
        let (mut funs, mut refs) = (Vec::new(), Vec::new());
        rule.tail.visit_names(&mut funs, &mut refs);
        if let Some(f) = funs.into_iter().find(|f| f.as_str() != name && !self.funs.contains_key(f)) {
            return Err(GuardError::UnknownFunction(f));
        }
        self.funs.insert(Name::new(name), Rc::new(rule));
        Ok(self)
    }

    pub fn body(&self, name: &Name) -> Option<&Rc<StreamProg>> {
        self.defs.get(name)
    }

    pub fn rule(&self, name: &Name) -> Option<&Rc<FunRule>> {
        self.funs.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.defs.keys()
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.defs.contains_key(name)
    }

    pub fn total_size(&self) -> usize {
        self.defs.values().map(|b| b.size()).sum()
    }
}

/// An unguarded reference found by [`check_guarded`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub def: Name,
    pub reference: Name,
    /// Constructor path from the definition root to the reference.
    pub path: Vec<&'static str>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() { "<root>".to_string() } else { self.path.join("/") };
        write!(f, "{}: reference to `{}` is not under delay (at {path})", self.def, self.reference)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GuardError {
    #[error("unresolved reference `{0}`")]
    UnresolvedRef(Name),
    #[error("unknown function `{0}`")]
    UnknownFunction(Name),
    #[error("{}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Unguarded(Vec<Violation>),
}

/// Accepts iff every reference in every definition lies under at least one
/// `delay`, and all names resolve.
pub fn check_guarded(env: &DefEnv) -> Result<(), GuardError> {
    let mut violations = Vec::new();
    for (name, body) in &env.defs {
        let mut path = Vec::new();
        walk(env, name, body, false, &mut path, &mut violations)?;
    }
    for rule in env.funs.values() {
        let (mut funs, mut refs) = (Vec::new(), Vec::new());
        rule.tail.visit_names(&mut funs, &mut refs);
        if let Some(f) = funs.into_iter().find(|f| !env.funs.contains_key(f)) {
            return Err(GuardError::UnknownFunction(f));
        }
        if let Some(r) = refs.into_iter().find(|r| !env.defs.contains_key(r)) {
            return Err(GuardError::UnresolvedRef(r));
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(GuardError::Unguarded(violations))
    }
}

fn walk(
    env: &DefEnv,
    def: &Name,
    p: &StreamProg,
    guarded: bool,
    path: &mut Vec<&'static str>,
    out: &mut Vec<Violation>,
) -> Result<(), GuardError> {
    let mut step = |label: &'static str, q: &StreamProg, guarded: bool, out: &mut Vec<Violation>| {
        path.push(label);
        let r = walk(env, def, q, guarded, path, out);
        path.pop();
        r
    };
    match p {
        StreamProg::Cons(_, Delayed(t)) => step("cons.delay", t, true, out),
        StreamProg::ZipWith(_, a, b) => {
            step("zipWith.left", a, guarded, out)?;
            step("zipWith.right", b, guarded, out)
        }
        StreamProg::Merge(a, b) => {
            step("merge.left", a, guarded, out)?;
            step("merge.right", b, guarded, out)
        }
        StreamProg::Map(_, a) => step("map", a, guarded, out),
        StreamProg::UserFun(f, a) => {
            if !env.funs.contains_key(f) {
                return Err(GuardError::UnknownFunction(f.clone()));
            }
            step("apply", a, guarded, out)
        }
        StreamProg::Embed(_) => Ok(()),
        StreamProg::Ref(n) | StreamProg::Unfolded(n, _) => {
            if !env.defs.contains_key(n) {
                return Err(GuardError::UnresolvedRef(n.clone()));
            }
            if !guarded {
                out.push(Violation { def: def.clone(), reference: n.clone(), path: path.clone() });
            }
            Ok(())
        }
    }
}
