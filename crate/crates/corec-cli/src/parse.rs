//! Lexer and recursive-descent parser for definition modules.
//!
//! ```text
//! module := def*
//! def    := "def" NAME [":" sig] "=" expr
//! sig    := "Stream" TYPE [anno]
//! anno   := "@bool(" BOOL ")" | "@(" NAT "," NAT ")" | "@pattern[" NATS ";" NATS "]"
//! expr   := app ["::" expr]
//! app    := ("delay" | "end" | "tail" | "forget" | "evens") app
//!         | "zipWith" OP atom atom | "map" OP atom
//!         | ("interleave" | "merge") atom atom | "apply" NAME atom | atom
//! atom   := NAT | "true" | "false" | NAME | "(" expr ")"
//! ```

use std::collections::HashSet;

use thiserror::Error;

use crate::syntax::{Annotation, Def, Expr, Location, Signature, SourceModule};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{location}: {message}")]
pub struct ParseError {
    pub location: Location,
    pub message: String,
}

const KEYWORDS: &[&str] =
    &["def", "delay", "end", "tail", "forget", "evens", "zipWith", "map", "interleave", "merge", "apply", "true", "false"];

const SYMBOLS: [&str; 10] = ["::", ":", "=", "(", ")", "[", "]", ",", ";", "@"];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Nat(u64),
    Sym(&'static str),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
        }
    }
}

fn lex(text: &str) -> Result<(Vec<(Tok, Location)>, Location), ParseError> {
    let mut toks = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let at = Location { line, column };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
        } else if c == '-' && text_follows(&chars, "--") {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while chars.peek().is_some_and(char::is_ascii_digit) {
                s.extend(bump(&mut chars));
            }
            let n = s.parse().map_err(|_| ParseError { location: at, message: format!("number `{s}` is too large") })?;
            toks.push((Tok::Nat(n), at));
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            loop {
                let next = chars.peek().copied();
                match next {
                    Some(c) if c.is_alphanumeric() || c == '_' || c == '\'' => s.extend(bump(&mut chars)),
                    Some('-') if !text_follows(&chars, "--") && next_is_alnum(&chars) => s.extend(bump(&mut chars)),
                    _ => break,
                }
            }
            toks.push((Tok::Word(s), at));
        } else {
            let sym = SYMBOLS
                .into_iter()
                .find(|s| text_follows(&chars, s))
                .ok_or_else(|| ParseError { location: at, message: format!("unexpected character `{c}`") })?;
            for _ in 0..sym.len() {
                bump(&mut chars);
            }
            toks.push((Tok::Sym(sym), at));
        }
    }
    Ok((toks, Location { line, column }))
}

fn text_follows(chars: &std::iter::Peekable<std::str::Chars>, s: &str) -> bool {
    chars.clone().take(s.len()).eq(s.chars())
}

fn next_is_alnum(chars: &std::iter::Peekable<std::str::Chars>) -> bool {
    chars.clone().nth(1).is_some_and(char::is_alphanumeric)
}

struct Parser {
    toks: Vec<(Tok, Location)>,
    pos: usize,
    eof: Location,
}

type Parsed<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> Location {
        self.toks.get(self.pos).map_or(self.eof, |(_, l)| *l)
    }

    fn error<T>(&self, expected: &str) -> Parsed<T> {
        let found = self.peek().map_or("end of input".to_string(), Tok::describe);
        Err(ParseError { location: self.here(), message: format!("expected {expected}, found {found}") })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.peek().cloned();
        self.pos += 1;
        t
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(x)) if x == w)
    }

    fn at_sym(&self, s: &'static str) -> bool {
        self.peek() == Some(&Tok::Sym(s))
    }

    fn expect_sym(&mut self, s: &'static str) -> Parsed<()> {
        if self.at_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(&format!("`{s}`"))
        }
    }

    fn expect_word(&mut self, w: &str) -> Parsed<()> {
        if self.at_word(w) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(&format!("`{w}`"))
        }
    }

    fn name(&mut self, what: &str) -> Parsed<String> {
        match self.peek() {
            Some(Tok::Word(w)) if !KEYWORDS.contains(&w.as_str()) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => self.error(what),
        }
    }

    fn nat(&mut self) -> Parsed<u64> {
        match self.peek() {
            Some(&Tok::Nat(n)) => {
                self.pos += 1;
                Ok(n)
            }
            _ => self.error("a number"),
        }
    }

    fn module(&mut self) -> Parsed<SourceModule> {
        let (mut defs, mut locations) = (Vec::new(), Vec::new());
        let mut seen = HashSet::new();
        while self.peek().is_some() {
            let at = self.here();
            self.expect_word("def")?;
            let name_at = self.here();
            let name = self.name("a definition name")?;
            if !seen.insert(name.clone()) {
                return Err(ParseError { location: name_at, message: format!("`{name}` is defined twice") });
            }
            let signature = if self.at_sym(":") {
                self.pos += 1;
                Some(self.signature()?)
            } else {
                None
            };
            self.expect_sym("=")?;
            let body = self.expr()?;
            defs.push(Def { name, signature, body });
            locations.push(at);
        }
        Ok(SourceModule { defs, locations })
    }

    fn signature(&mut self) -> Parsed<Signature> {
        self.expect_word("Stream")?;
        let elem_type = self.name("an element type")?;
        let annotation = if self.at_sym("@") {
            self.pos += 1;
            Some(self.annotation()?)
        } else {
            None
        };
        Ok(Signature { elem_type, annotation })
    }

    fn annotation(&mut self) -> Parsed<Annotation> {
        if self.at_word("bool") {
            self.pos += 1;
            self.expect_sym("(")?;
            let b = match self.next() {
                Some(Tok::Word(w)) if w == "true" => true,
                Some(Tok::Word(w)) if w == "false" => false,
                _ => {
                    self.pos -= 1;
                    return self.error("`true` or `false`");
                }
            };
            self.expect_sym(")")?;
            Ok(Annotation::Bool(b))
        } else if self.at_word("pattern") {
            self.pos += 1;
            self.expect_sym("[")?;
            let prefix = self.nats()?;
            self.expect_sym(";")?;
            let period = self.nats()?;
            self.expect_sym("]")?;
            Ok(Annotation::Pattern(prefix, period))
        } else if self.at_sym("(") {
            self.pos += 1;
            let m = self.nat()?;
            self.expect_sym(",")?;
            let n = self.nat()?;
            self.expect_sym(")")?;
            Ok(Annotation::Fixed(m, n))
        } else {
            self.error("`bool(`, `(` or `pattern[` after `@`")
        }
    }

    fn nats(&mut self) -> Parsed<Vec<u64>> {
        let mut out = vec![self.nat()?];
        while self.at_sym(",") {
            self.pos += 1;
            out.push(self.nat()?);
        }
        Ok(out)
    }

    fn expr(&mut self) -> Parsed<Expr> {
        let head = self.app()?;
        if self.at_sym("::") {
            self.pos += 1;
            Ok(Expr::Cons(Box::new(head), Box::new(self.expr()?)))
        } else {
            Ok(head)
        }
    }

    fn app(&mut self) -> Parsed<Expr> {
        let Some(Tok::Word(w)) = self.peek() else { return self.atom() };
        let prefix: Option<fn(Box<Expr>) -> Expr> = match w.as_str() {
            "delay" => Some(Expr::Delay),
            "end" => Some(Expr::End),
            "tail" => Some(Expr::Tail),
            "forget" => Some(Expr::Forget),
            "evens" => Some(Expr::Evens),
            _ => None,
        };
        if let Some(make) = prefix {
            self.pos += 1;
            return Ok(make(Box::new(self.app()?)));
        }
        match w.as_str() {
            "zipWith" => {
                self.pos += 1;
                let op_at = self.here();
                let op = self.name("an operator name")?;
                let op = op.parse().map_err(|_| ParseError { location: op_at, message: format!("unknown binary operator `{op}`") })?;
                Ok(Expr::ZipWith(op, Box::new(self.atom()?), Box::new(self.atom()?)))
            }
            "map" => {
                self.pos += 1;
                let op_at = self.here();
                let op = self.name("an operator name")?;
                let op = op.parse().map_err(|_| ParseError { location: op_at, message: format!("unknown unary operator `{op}`") })?;
                Ok(Expr::Map(op, Box::new(self.atom()?)))
            }
            "interleave" => {
                self.pos += 1;
                Ok(Expr::Interleave(Box::new(self.atom()?), Box::new(self.atom()?)))
            }
            "merge" => {
                self.pos += 1;
                Ok(Expr::Merge(Box::new(self.atom()?), Box::new(self.atom()?)))
            }
            "apply" => {
                self.pos += 1;
                let f = self.name("a function name")?;
                Ok(Expr::Apply(f, Box::new(self.atom()?)))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Parsed<Expr> {
        match self.peek().cloned() {
            Some(Tok::Nat(n)) => {
                self.pos += 1;
                Ok(Expr::Nat(n))
            }
            Some(Tok::Word(w)) if w == "true" || w == "false" => {
                self.pos += 1;
                Ok(Expr::Bool(w == "true"))
            }
            Some(Tok::Word(w)) if !KEYWORDS.contains(&w.as_str()) => {
                self.pos += 1;
                Ok(Expr::Var(w))
            }
            Some(Tok::Sym("(")) => {
                let open = self.here();
                self.pos += 1;
                let e = self.expr().map_err(|e| self.unclosed(e, open))?;
                if self.peek().is_none() {
                    return Err(ParseError { location: open, message: "unclosed `(`".into() });
                }
                self.expect_sym(")")?;
                Ok(e)
            }
            _ => self.error("an expression"),
        }
    }

    /// Running out of input inside parentheses is blamed on the parenthesis.
    fn unclosed(&self, e: ParseError, open: Location) -> ParseError {
        if e.location == self.eof {
            ParseError { location: open, message: "unclosed `(`".into() }
        } else {
            e
        }
    }
}

pub fn parse_module(text: &str) -> Result<SourceModule, ParseError> {
    let (toks, eof) = lex(text)?;
    Parser { toks, pos: 0, eof }.module()
}

/// A single expression, for command-line arguments.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let (toks, eof) = lex(text)?;
    let mut p = Parser { toks, pos: 0, eof };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.error("end of input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use corec_kernel::{BinaryOp, UnaryOp};

    fn var(x: &str) -> Box<Expr> {
        Box::new(Expr::Var(x.into()))
    }

    #[test]
    fn fib() {
        let m = parse_module("def fib = 0 :: delay (zipWith add fib (1 :: delay fib))").unwrap();
        let inner = Expr::Cons(Box::new(Expr::Nat(1)), Box::new(Expr::Delay(var("fib"))));
        let body =
            Expr::Cons(Box::new(Expr::Nat(0)), Box::new(Expr::Delay(Box::new(Expr::ZipWith(BinaryOp::Add, var("fib"), Box::new(inner))))));
        assert_eq!(m.defs, vec![Def { name: "fib".into(), signature: None, body }]);
    }

    #[test]
    fn signatures() {
        let m = parse_module("def nats2 : Stream Nat @(2,1) = 0 :: end delay (map suc nats2)").unwrap();
        let sig = m.defs[0].signature.clone().unwrap();
        assert_eq!(sig.annotation, Some(Annotation::Fixed(2, 1)));
        assert_eq!(
            m.defs[0].body,
            Expr::Cons(Box::new(Expr::Nat(0)), Box::new(Expr::End(Box::new(Expr::Delay(Box::new(Expr::Map(UnaryOp::Suc, var("nats2"))))))))
        );
        let m =
            parse_module("-- thue-morse\ndef thue-morse : Stream Bool @pattern[1,1,1;2] = false :: end delay (tail thue-morse)").unwrap();
        assert_eq!(m.defs[0].name, "thue-morse");
        assert_eq!(m.locations[0], Location { line: 2, column: 1 });
        assert_eq!(m.defs[0].signature.clone().unwrap().annotation, Some(Annotation::Pattern(vec![1, 1, 1], vec![2])));
        let m = parse_module("def b : Stream Nat @bool(false) = x").unwrap();
        assert_eq!(m.defs[0].signature.clone().unwrap().annotation, Some(Annotation::Bool(false)));
    }

    #[test]
    fn cons_is_right_associative() {
        let e = parse_expr("1 :: 2 :: x").unwrap();
        assert_eq!(e, Expr::Cons(Box::new(Expr::Nat(1)), Box::new(Expr::Cons(Box::new(Expr::Nat(2)), var("x")))));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_module("def x = (").unwrap_err();
        assert_eq!(err.location, Location { line: 1, column: 9 });
        let err = parse_module("def x = 1 ::\n  zipWith frob x x").unwrap_err();
        assert_eq!(err.location, Location { line: 2, column: 11 });
        let err = parse_module("def x = x\ndef x = x").unwrap_err();
        assert_eq!(err.location, Location { line: 2, column: 5 });
        assert!(parse_module("def delay = x").is_err());
        assert!(parse_module("def x = ?").is_err());
        assert!(parse_module("def x : Stream Nat @ = x").is_err());
    }
}
