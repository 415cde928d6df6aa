use std::collections::BTreeMap;
use std::rc::Rc;

use corec_stream::Name;
use thiserror::Error;

use crate::prog::{ChunkProg, Delayed};
use crate::schedule::{ChunkSignature, Schedule};

#[derive(Clone, Debug, PartialEq)]
pub struct ChunkDef {
    pub signature: ChunkSignature,
    pub body: Rc<ChunkProg>,
}

/// Chunked definitions, each with its declared signature.
#[derive(Clone, Debug, Default)]
pub struct ChunkEnv {
    defs: BTreeMap<Name, ChunkDef>,
}

impl ChunkEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn define(&mut self, name: &str, signature: ChunkSignature, body: ChunkProg) -> &mut Self {
        self.defs.insert(Name::new(name), ChunkDef { signature, body: Rc::new(body) });
        self
    }

    pub fn get(&self, name: &Name) -> Option<&ChunkDef> {
        self.defs.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.defs.keys()
    }

    pub fn defs(&self) -> impl Iterator<Item = (&Name, &ChunkDef)> {
        self.defs.iter()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ChunkTypeError {
    #[error("index mismatch at {location}: expected {expected}, found {found}")]
    IndexMismatch { location: String, expected: String, found: String },
    #[error("tail of an empty chunk at {location}")]
    EmptyChunk { location: String },
    #[error("{def}: reference to `{reference}` is not under end delay (at {path})")]
    Unguarded { def: Name, reference: Name, path: String },
    #[error("unresolved reference `{0}`")]
    UnresolvedRef(Name),
}

/// Checks every definition against its declared signature, taking the
/// declared signatures of referenced definitions on trust. References
/// must sit under at least one `end delay`.
pub fn check_chunk_typing(env: &ChunkEnv) -> Result<(), ChunkTypeError> {
    for name in env.names() {
        check_def(env, name)?;
    }
    Ok(())
}

/// Checks one definition.
pub fn check_def(env: &ChunkEnv, name: &Name) -> Result<(), ChunkTypeError> {
    let def = env.get(name).ok_or_else(|| ChunkTypeError::UnresolvedRef(name.clone()))?;
    let mut cx = Cx { env, def: name, sig: &def.signature, path: Vec::new() };
    let found = cx.synth(&def.body, false)?;
    let declared = def.signature.schedule();
    match found.first_shortfall(&declared) {
        None => Ok(()),
        Some(k) => Err(ChunkTypeError::IndexMismatch {
            location: format!("{name}, chunk {k}"),
            expected: def.signature.to_string(),
            found: def.signature.describe(&found),
        }),
    }
}

/// The schedule a program is guaranteed to meet, given the declared
/// signatures in `env`.
pub fn synthesize(env: &ChunkEnv, p: &ChunkProg) -> Result<Schedule, ChunkTypeError> {
    let top = Name::new("<expr>");
    let sig = ChunkSignature::Bool(true);
    Cx { env, def: &top, sig: &sig, path: Vec::new() }.synth(p, true)
}

struct Cx<'a> {
    env: &'a ChunkEnv,
    def: &'a Name,
    sig: &'a ChunkSignature,
    path: Vec<&'static str>,
}

impl Cx<'_> {
    fn location(&self) -> String {
        if self.path.is_empty() {
            format!("{} <root>", self.def)
        } else {
            format!("{} {}", self.def, self.path.join("/"))
        }
    }

    fn under(&mut self, label: &'static str, p: &ChunkProg, guarded: bool) -> Result<Schedule, ChunkTypeError> {
        self.path.push(label);
        let r = self.synth(p, guarded);
        self.path.pop();
        r
    }

    fn synth(&mut self, p: &ChunkProg, guarded: bool) -> Result<Schedule, ChunkTypeError> {
        Ok(match p {
            ChunkProg::EndChunk(Delayed(q)) => Schedule::with_first(0, &self.under("end.delay", q, true)?),
            ChunkProg::Cons(_, q) => self.under("cons", q, guarded)?.map_first(|c| c + 1),
            ChunkProg::Tail(q) => {
                let s = self.under("tail", q, guarded)?;
                if s.chunk(0) == 0 {
                    return Err(ChunkTypeError::EmptyChunk { location: self.location() });
                }
                s.map_first(|c| c - 1)
            }
            ChunkProg::Forget(q) => self.under("forget", q, guarded)?.map_first(|_| 0),
            ChunkProg::Map(_, q) => self.under("map", q, guarded)?,
            ChunkProg::ZipWith(_, a, b) => {
                let sa = self.under("zipWith.left", a, guarded)?;
                let sb = self.under("zipWith.right", b, guarded)?;
                if !sa.same_as(&sb) {
                    return Err(ChunkTypeError::IndexMismatch {
                        location: format!("{} zipWith", self.location()),
                        expected: self.sig.describe(&sa),
                        found: self.sig.describe(&sb),
                    });
                }
                sa
            }
            ChunkProg::Evens(q) => self.under("evens", q, guarded)?.halve(true),
            ChunkProg::Odds(q) => self.under("odds", q, guarded)?.halve(false),
            ChunkProg::Interleave(a, b) => {
                let sa = self.under("interleave.left", a, guarded)?;
                let sb = self.under("interleave.right", b, guarded)?;
                sa.interleave(&sb)
            }
            ChunkProg::Ref(n) | ChunkProg::Unfolded(n, _) => {
                let def = self.env.get(n).ok_or_else(|| ChunkTypeError::UnresolvedRef(n.clone()))?;
                if !guarded {
                    let path = if self.path.is_empty() { "<root>".to_string() } else { self.path.join("/") };
                    return Err(ChunkTypeError::Unguarded { def: self.def.clone(), reference: n.clone(), path });
                }
                def.signature.schedule()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use corec_kernel::{BinaryOp, UnaryOp};
    use ChunkProg as C;

    fn fixed(m: u64, n: u64) -> ChunkSignature {
        ChunkSignature::fixed(m, n).unwrap()
    }

    fn single(name: &str, sig: ChunkSignature, body: ChunkProg) -> ChunkEnv {
        let mut env = ChunkEnv::new();
        env.define(name, sig, body);
        env
    }

    fn suc_loop(name: &str) -> C {
        C::cons(0, C::end(C::map(UnaryOp::Suc, C::reference(name))))
    }

    #[test]
    fn fixed_discipline() {
        let err = check_chunk_typing(&single("nats2", fixed(2, 1), suc_loop("nats2"))).unwrap_err();
        assert_eq!(
            err,
            ChunkTypeError::IndexMismatch { location: "nats2, chunk 1".into(), expected: "(2,1)".into(), found: "pattern[1,1;2]".into() }
        );
        assert_eq!(check_chunk_typing(&single("nats", fixed(1, 1), suc_loop("nats"))), Ok(()));
        let nats2p = C::cons(0, C::cons(1, C::end(C::map(UnaryOp::Suc, C::reference("n")))));
        assert_eq!(check_chunk_typing(&single("n", fixed(2, 2), nats2p)), Ok(()));
    }

    #[test]
    fn bool_discipline() {
        let bad = C::tail(C::cons(0, C::end(C::reference("bad"))));
        let err = check_chunk_typing(&single("bad", ChunkSignature::Bool(true), bad)).unwrap_err();
        assert_eq!(
            err,
            ChunkTypeError::IndexMismatch { location: "bad, chunk 0".into(), expected: "bool(true)".into(), found: "bool(false)".into() }
        );
        let fib = C::cons(0, C::end(C::cons(1, C::zip_with(BinaryOp::Add, C::forget(C::reference("fib")), C::tail(C::reference("fib"))))));
        assert_eq!(check_chunk_typing(&single("fib", ChunkSignature::Bool(true), fib)), Ok(()));
        let twice = C::tail(C::tail(C::cons(0, C::end(C::reference("t")))));
        assert_eq!(
            check_chunk_typing(&single("t", ChunkSignature::Bool(true), twice)),
            Err(ChunkTypeError::EmptyChunk { location: "t <root>".into() })
        );
    }

    #[test]
    fn zip_with_needs_equal_indices() {
        let p = C::cons(0, C::end(C::zip_with(BinaryOp::Add, C::reference("p"), C::tail(C::reference("p")))));
        let err = check_chunk_typing(&single("p", ChunkSignature::Bool(true), p)).unwrap_err();
        assert!(matches!(err, ChunkTypeError::IndexMismatch { ref location, .. } if location == "p cons/end.delay zipWith"), "{err}");
    }

    #[test]
    fn thue_morse_patterns() {
        let tm = || C::cons(false, C::end(C::interleave(C::map(UnaryOp::Not, C::evens(C::reference("tm"))), C::tail(C::reference("tm")))));
        for sig in [ChunkSignature::pattern(vec![1, 1, 1], vec![2]).unwrap(), ChunkSignature::Bool(true)] {
            assert_eq!(check_chunk_typing(&single("tm", sig, tm())), Ok(()));
        }
        let greedy = ChunkSignature::pattern(vec![], vec![2]).unwrap();
        assert!(check_chunk_typing(&single("tm", greedy, tm())).is_err());
    }

    #[test]
    fn references_must_be_delayed() {
        let err = check_chunk_typing(&single("x", ChunkSignature::Bool(true), C::reference("x"))).unwrap_err();
        assert_eq!(err.to_string(), "x: reference to `x` is not under end delay (at <root>)");
        let err = check_chunk_typing(&single("y", ChunkSignature::Bool(true), C::cons(1, C::end(C::reference("z"))))).unwrap_err();
        assert_eq!(err, ChunkTypeError::UnresolvedRef("z".into()));
    }
}
