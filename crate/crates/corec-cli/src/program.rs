//! Turns a parsed module into checked plain and chunked environments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::rc::Rc;

use corec_chunk::{check_def, interpret_chunk, ChunkEnv, ChunkProg, ChunkSession, ChunkSignature, ChunkTypeError};
use corec_kernel::{Elem, Stream};
use corec_proof::Designator;
use corec_stream::{check_guarded, interpret, DefEnv, EvalSession, FunRule, GuardError, Mode, Name, StreamProg};

use crate::error::CliError;
use crate::syntax::{Annotation, Def, Expr, Location, SourceModule};

/// Stream functions every module can `apply`.
pub const FUNCTIONS: &[&str] = &["phi"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Language {
    Plain,
    Chunked,
}

impl Language {
    fn of(def: &Def) -> Self {
        let annotated = def.signature.as_ref().is_some_and(|s| s.annotation.is_some());
        if annotated || def.body.uses_chunk_constructs() {
            Language::Chunked
        } else {
            Language::Plain
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefVerdict {
    pub name: String,
    pub location: Location,
    pub language: Language,
    pub rejection: Option<String>,
}

impl fmt::Display for DefVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rejection {
            None => write!(f, "{}: ok", self.name),
            Some(reason) => write!(f, "{}: rejected {reason}", self.name),
        }
    }
}

/// A module after lowering and checking. Definitions that could not be
/// lowered are absent from both environments.
pub struct Program {
    pub plain: Rc<DefEnv>,
    pub chunked: Rc<ChunkEnv>,
    pub verdicts: Vec<DefVerdict>,
    refs: BTreeMap<String, BTreeSet<String>>,
}

/// Work done by one evaluation.
pub enum Run {
    Plain(EvalSession),
    Chunked(ChunkSession),
}

impl Run {
    pub fn adds(&self) -> u64 {
        match self {
            Run::Plain(s) => s.counters().adds,
            Run::Chunked(s) => s.adds(),
        }
    }

    pub fn steps(&self) -> u64 {
        match self {
            Run::Plain(s) => s.counters().steps,
            Run::Chunked(s) => s.steps(),
        }
    }
}

enum Lowered {
    Plain(StreamProg),
    Chunked(ChunkSignature, ChunkProg),
}

impl Program {
    pub fn new(module: &SourceModule) -> Program {
        let languages: BTreeMap<&str, Language> = module.defs.iter().map(|d| (d.name.as_str(), Language::of(d))).collect();
        let mut lowered = BTreeMap::new();
        let mut rejections: BTreeMap<String, String> = BTreeMap::new();
        let mut refs = BTreeMap::new();
        for def in &module.defs {
            let mut names = BTreeSet::new();
            collect_refs(&def.body, &mut names);
            let result = match languages[def.name.as_str()] {
                Language::Plain => lower_plain(&def.body).map(Lowered::Plain),
                Language::Chunked => lower_signature(def).and_then(|sig| Ok(Lowered::Chunked(sig, lower_chunk(&def.body)?))),
            };
            match result {
                Ok(l) => {
                    lowered.insert(def.name.clone(), l);
                }
                Err(reason) => {
                    rejections.insert(def.name.clone(), reason);
                }
            }
            refs.insert(def.name.clone(), names);
        }
        // references must reach a lowered definition of the same language
        loop {
            let broken = lowered.keys().find_map(|name| {
                let lang = languages[name.as_str()];
                refs[name].iter().find_map(|r| {
                    let reason = match languages.get(r.as_str()) {
                        None => format!("UnresolvedRef: `{r}` is not defined"),
                        Some(&l) if l != lang => format!("UnresolvedRef: `{r}` is a {} definition", describe(l)),
                        Some(_) if !lowered.contains_key(r) => format!("UnresolvedRef: `{r}` is rejected"),
                        Some(_) => return None,
                    };
                    Some((name.clone(), reason))
                })
            });
            let Some((name, reason)) = broken else { break };
            lowered.remove(&name);
            rejections.insert(name, reason);
        }

        let mut plain = DefEnv::new();
        for f in FUNCTIONS {
            plain.register_fun(f, FunRule::nested(f)).expect("builtin rules are well formed");
        }
        let mut chunked = ChunkEnv::new();
        for (name, l) in lowered {
            match l {
                Lowered::Plain(p) => {
                    plain.define(&name, p);
                }
                Lowered::Chunked(sig, p) => {
                    chunked.define(&name, sig, p);
                }
            }
        }
        match check_guarded(&plain) {
            Ok(()) => {}
            Err(GuardError::Unguarded(violations)) => {
                for v in violations {
                    rejections.entry(v.def.as_str().to_string()).or_insert_with(|| format!("Unguarded: {v}"));
                }
            }
            Err(other) => unreachable!("references were resolved before checking: {other}"),
        }
        for name in chunked.names() {
            if let Err(e) = check_def(&chunked, name) {
                rejections.insert(name.as_str().to_string(), format!("{}: {e}", chunk_error_kind(&e)));
            }
        }

        let verdicts = module
            .defs
            .iter()
            .zip(&module.locations)
            .map(|(d, &location)| DefVerdict {
                name: d.name.clone(),
                location,
                language: languages[d.name.as_str()],
                rejection: rejections.get(&d.name).cloned(),
            })
            .collect();
        Program { plain: Rc::new(plain), chunked: Rc::new(chunked), verdicts, refs }
    }

    pub fn verdict(&self, name: &str) -> Option<&DefVerdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    /// Fails unless `name` and everything it reaches was accepted.
    pub fn require_accepted(&self, name: &str) -> Result<(), CliError> {
        let mut seen = BTreeSet::new();
        let mut todo = vec![name.to_string()];
        while let Some(n) = todo.pop() {
            if !seen.insert(n.clone()) {
                continue;
            }
            let v = self.verdict(&n).ok_or_else(|| CliError::UnknownName(n.clone()))?;
            if let Some(reason) = &v.rejection {
                return Err(CliError::Rejected(if n == name {
                    format!("{n}: {reason}")
                } else {
                    format!("{name} depends on `{n}`, which is rejected: {reason}")
                }));
            }
            todo.extend(self.refs[&n].iter().cloned());
        }
        Ok(())
    }

    fn lowered_language(&self, name: &str) -> Result<Language, CliError> {
        let v = self.verdict(name).ok_or_else(|| CliError::UnknownName(name.to_string()))?;
        let present = match v.language {
            Language::Plain => self.plain.contains(&Name::new(name)),
            Language::Chunked => self.chunked.get(&Name::new(name)).is_some(),
        };
        if present {
            Ok(v.language)
        } else {
            Err(CliError::Rejected(format!("{name}: {}", v.rejection.clone().unwrap_or_default())))
        }
    }

    /// The stream a definition denotes. With `checked`, the definition
    /// and its dependencies must have been accepted.
    pub fn stream(&self, name: &str, mode: Mode, fuel: u64, checked: bool) -> Result<(Stream<Elem>, Run), CliError> {
        if checked {
            self.require_accepted(name)?;
        }
        match self.lowered_language(name)? {
            Language::Plain => {
                let sess = EvalSession::with_fuel(mode, fuel);
                let s = interpret(&StreamProg::reference(name), &self.plain, &sess)?;
                Ok((s, Run::Plain(sess)))
            }
            Language::Chunked => {
                let sess = ChunkSession::with_fuel(fuel);
                let s = interpret_chunk(&ChunkProg::reference(name), &self.chunked, &sess)?;
                Ok((s, Run::Chunked(sess)))
            }
        }
    }

    /// A checked definition as a proof designator. Plain definitions are
    /// named; chunked ones are wrapped as host streams.
    pub fn designator(&self, name: &str, fuel: u64) -> Result<Designator, CliError> {
        self.require_accepted(name)?;
        match self.lowered_language(name)? {
            Language::Plain => Ok(Designator::def(name)),
            Language::Chunked => Ok(Designator::host(name, self.stream(name, Mode::Memoized, fuel, true)?.0)),
        }
    }

    pub fn language(&self, name: &str) -> Result<Language, CliError> {
        self.lowered_language(name)
    }
}

fn describe(l: Language) -> &'static str {
    match l {
        Language::Plain => "plain",
        Language::Chunked => "chunked",
    }
}

fn chunk_error_kind(e: &ChunkTypeError) -> &'static str {
    match e {
        ChunkTypeError::IndexMismatch { .. } => "IndexMismatch",
        ChunkTypeError::EmptyChunk { .. } => "EmptyChunk",
        ChunkTypeError::Unguarded { .. } => "Unguarded",
        ChunkTypeError::UnresolvedRef(_) => "UnresolvedRef",
    }
}

fn collect_refs(e: &Expr, out: &mut BTreeSet<String>) {
    match e {
        Expr::Var(x) => {
            out.insert(x.clone());
        }
        Expr::Nat(_) | Expr::Bool(_) => {}
        Expr::Delay(a) | Expr::End(a) | Expr::Tail(a) | Expr::Forget(a) | Expr::Evens(a) | Expr::Map(_, a) | Expr::Apply(_, a) => {
            collect_refs(a, out)
        }
        Expr::Cons(a, b) | Expr::ZipWith(_, a, b) | Expr::Interleave(a, b) | Expr::Merge(a, b) => {
            collect_refs(a, out);
            collect_refs(b, out);
        }
    }
}

fn element(e: &Expr) -> Result<Elem, String> {
    match e {
        Expr::Nat(n) => Ok(Elem::Int((*n).into())),
        Expr::Bool(b) => Ok(Elem::Bool(*b)),
        other => Err(format!("Malformed: the head of `::` must be a literal, found `{other}`")),
    }
}

fn lower_plain(e: &Expr) -> Result<StreamProg, String> {
    Ok(match e {
        Expr::Var(x) => StreamProg::reference(x),
        Expr::Cons(h, t) => match &**t {
            Expr::Delay(t) => StreamProg::cons(element(h)?, lower_plain(t)?),
            other => return Err(format!("Malformed: the tail of `::` must be delayed, found `{other}`")),
        },
        Expr::ZipWith(op, a, b) => StreamProg::zip_with(*op, lower_plain(a)?, lower_plain(b)?),
        Expr::Map(op, a) => StreamProg::map(*op, lower_plain(a)?),
        Expr::Merge(a, b) => StreamProg::merge(lower_plain(a)?, lower_plain(b)?),
        Expr::Apply(f, a) if FUNCTIONS.contains(&f.as_str()) => StreamProg::user_fun(f, lower_plain(a)?),
        Expr::Apply(f, _) => return Err(format!("UnknownFunction: `{f}`")),
        Expr::Delay(_) => return Err("Malformed: `delay` may only mark the tail of `::`".into()),
        Expr::Nat(_) | Expr::Bool(_) => return Err(format!("Malformed: `{e}` is an element, not a stream")),
        Expr::End(_) | Expr::Tail(_) | Expr::Forget(_) | Expr::Evens(_) | Expr::Interleave(..) => {
            unreachable!("chunk constructs select the chunked language")
        }
    })
}

fn lower_signature(def: &Def) -> Result<ChunkSignature, String> {
    let Some(annotation) = def.signature.as_ref().and_then(|s| s.annotation.as_ref()) else {
        return Err("MissingSignature: chunked constructs need a chunk annotation such as @bool(true)".into());
    };
    match annotation {
        Annotation::Bool(b) => Ok(ChunkSignature::Bool(*b)),
        Annotation::Fixed(m, n) => ChunkSignature::fixed(*m, *n),
        Annotation::Pattern(p, q) => ChunkSignature::pattern(p.clone(), q.clone()),
    }
    .map_err(|e| format!("BadSignature: {e}"))
}

fn lower_chunk(e: &Expr) -> Result<ChunkProg, String> {
    let go = |a: &Expr| lower_chunk(a);
    Ok(match e {
        Expr::Var(x) => ChunkProg::reference(x),
        Expr::Cons(h, t) => ChunkProg::cons(element(h)?, go(t)?),
        Expr::End(t) => match &**t {
            Expr::Delay(t) => ChunkProg::end(go(t)?),
            other => return Err(format!("Malformed: `end` must be followed by `delay`, found `{other}`")),
        },
        Expr::Tail(a) => ChunkProg::tail(go(a)?),
        Expr::Forget(a) => ChunkProg::forget(go(a)?),
        Expr::Evens(a) => ChunkProg::evens(go(a)?),
        Expr::ZipWith(op, a, b) => ChunkProg::zip_with(*op, go(a)?, go(b)?),
        Expr::Map(op, a) => ChunkProg::map(*op, go(a)?),
        Expr::Interleave(a, b) => ChunkProg::interleave(go(a)?, go(b)?),
        Expr::Merge(..) | Expr::Apply(..) => return Err(format!("Malformed: `{e}` is not available in chunked definitions")),
        Expr::Delay(_) => return Err("Malformed: `delay` may only follow `end` in chunked definitions".into()),
        Expr::Nat(_) | Expr::Bool(_) => return Err(format!("Malformed: `{e}` is an element, not a stream")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_module;
    use corec_kernel::take_prefix;

    fn program(text: &str) -> Program {
        Program::new(&parse_module(text).unwrap())
    }

    fn rejection(p: &Program, name: &str) -> Option<String> {
        p.verdict(name).unwrap().rejection.clone()
    }

    #[test]
    fn languages_are_inferred() {
        let p = program(
            "def nats = 0 :: delay (map suc nats)\n\
             def nats1 : Stream Nat @(1,1) = 0 :: end delay (map suc nats1)\n\
             def bad = 0 :: delay (tail bad)",
        );
        assert_eq!(p.verdict("nats").unwrap().language, Language::Plain);
        assert_eq!(p.verdict("nats1").unwrap().language, Language::Chunked);
        assert_eq!(rejection(&p, "nats"), None);
        assert_eq!(rejection(&p, "nats1"), None);
        assert!(rejection(&p, "bad").unwrap().starts_with("MissingSignature"));
    }

    #[test]
    fn rejections_name_their_cause() {
        let p = program(
            "def loop = map suc loop\n\
             def strict = 1 :: loop\n\
             def nats2 : Stream Nat @(2,1) = 0 :: end delay (map suc nats2)\n\
             def lost = 0 :: delay missing\n\
             def mixed = 0 :: delay nats2\n\
             def uses = 0 :: delay loop",
        );
        assert!(rejection(&p, "loop").unwrap().starts_with("Unguarded"));
        assert!(rejection(&p, "strict").unwrap().contains("must be delayed"));
        assert!(rejection(&p, "nats2").unwrap().starts_with("IndexMismatch"));
        assert!(rejection(&p, "lost").unwrap().contains("not defined"));
        assert!(rejection(&p, "mixed").unwrap().contains("chunked definition"));
        assert_eq!(rejection(&p, "uses"), None);
        assert!(matches!(p.require_accepted("uses"), Err(CliError::Rejected(m)) if m.contains("depends on `loop`")));
    }

    #[test]
    fn streams_of_both_languages() {
        let p = program(
            "def fib = 0 :: delay (zipWith add fib (1 :: delay fib))\n\
             def fib2 : Stream Nat @bool(true) = 0 :: end delay (1 :: zipWith add (forget fib2) (tail fib2))",
        );
        for name in ["fib", "fib2"] {
            let (s, _) = p.stream(name, Mode::Memoized, 1000, true).unwrap();
            assert_eq!(take_prefix(&s, 6).unwrap(), [0, 1, 1, 2, 3, 5].map(Elem::from).to_vec());
        }
        let (s, run) = p.stream("fib", Mode::Naive, 1000, true).unwrap();
        take_prefix(&s, 10).unwrap();
        assert!(run.adds() > 0 && run.steps() > 0);
    }
}
