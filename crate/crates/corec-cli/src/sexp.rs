//! S-expressions for hypothesis proofs and tree literals.
//!
//! ```text
//! proof file := "(" "prove" NAME NAME proof ")"
//! proof      := "(" "cons" ELEM proof ")" | "(" "hyp" NAT ")" | "(" "trans" NAME proof proof ")"
//! tree       := "leaf" | "(" tree ELEM tree ")"
//! ```

use std::fmt;

use corec_kernel::{Elem, FinTree};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(xs) => {
                let parts: Vec<String> = xs.iter().map(Sexp::to_string).collect();
                write!(f, "({})", parts.join(" "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SexpError {
    #[error("unbalanced parentheses")]
    Unbalanced,
    #[error("expected one form, found {0}")]
    FormCount(usize),
    #[error("malformed {what}: `{form}`")]
    Malformed { what: &'static str, form: String },
}

pub fn read(text: &str) -> Result<Sexp, SexpError> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    for line in text.lines() {
        let line = line.split("--").next().unwrap_or("");
        let spaced = line.replace('(', " ( ").replace(')', " ) ");
        for tok in spaced.split_whitespace() {
            match tok {
                "(" => stack.push(Vec::new()),
                ")" => {
                    let done = stack.pop().ok_or(SexpError::Unbalanced)?;
                    stack.last_mut().ok_or(SexpError::Unbalanced)?.push(Sexp::List(done));
                }
                atom => stack.last_mut().expect("outer level is never popped").push(Sexp::Atom(atom.to_string())),
            }
        }
    }
    let mut top = match (stack.pop(), stack.is_empty()) {
        (Some(top), true) => top,
        _ => return Err(SexpError::Unbalanced),
    };
    if top.len() != 1 {
        return Err(SexpError::FormCount(top.len()));
    }
    Ok(top.remove(0))
}

pub fn elem(s: &Sexp) -> Result<Elem, SexpError> {
    match s {
        Sexp::Atom(a) if a == "true" => Ok(Elem::Bool(true)),
        Sexp::Atom(a) if a == "false" => Ok(Elem::Bool(false)),
        Sexp::Atom(a) => a.parse().map(Elem::Int).map_err(|_| malformed("element", s)),
        Sexp::List(_) => Err(malformed("element", s)),
    }
}

fn malformed(what: &'static str, form: &Sexp) -> SexpError {
    SexpError::Malformed { what, form: form.to_string() }
}

pub fn tree(s: &Sexp) -> Result<FinTree<Elem>, SexpError> {
    match s {
        Sexp::Atom(a) if a == "leaf" => Ok(FinTree::Leaf),
        Sexp::List(xs) if xs.len() == 3 => Ok(FinTree::node(tree(&xs[0])?, elem(&xs[1])?, tree(&xs[2])?)),
        _ => Err(malformed("tree", s)),
    }
}

/// A hypothesis proof with stream names still unresolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofTerm {
    Cons(Elem, Box<ProofTerm>),
    Hyp(usize),
    Trans(String, Box<ProofTerm>, Box<ProofTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofFile {
    pub lhs: String,
    pub rhs: String,
    pub proof: ProofTerm,
}

fn atom(s: &Sexp) -> Option<&str> {
    match s {
        Sexp::Atom(a) => Some(a),
        Sexp::List(_) => None,
    }
}

pub fn proof_term(s: &Sexp) -> Result<ProofTerm, SexpError> {
    let bad = || malformed("proof", s);
    let Sexp::List(xs) = s else { return Err(bad()) };
    match (xs.first().and_then(atom), xs.len()) {
        (Some("cons"), 3) => Ok(ProofTerm::Cons(elem(&xs[1])?, Box::new(proof_term(&xs[2])?))),
        (Some("hyp"), 2) => atom(&xs[1]).and_then(|i| i.parse().ok()).map(ProofTerm::Hyp).ok_or_else(bad),
        (Some("trans"), 4) => {
            let mid = atom(&xs[1]).ok_or_else(bad)?.to_string();
            Ok(ProofTerm::Trans(mid, Box::new(proof_term(&xs[2])?), Box::new(proof_term(&xs[3])?)))
        }
        _ => Err(bad()),
    }
}

pub fn proof_file(text: &str) -> Result<ProofFile, SexpError> {
    let s = read(text)?;
    let bad = || malformed("proof file", &s);
    let Sexp::List(xs) = &s else { return Err(bad()) };
    match xs.as_slice() {
        [head, l, r, p] if atom(head) == Some("prove") => {
            Ok(ProofFile { lhs: atom(l).ok_or_else(bad)?.to_string(), rhs: atom(r).ok_or_else(bad)?.to_string(), proof: proof_term(p)? })
        }
        _ => Err(bad()),
    }
}
