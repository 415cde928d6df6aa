//! The `corec` command line: definition modules, checking, evaluation,
//! equality proofs and breadth-first labelling.

pub mod commands;
pub mod error;
pub mod parse;
pub mod program;
pub mod sexp;
pub mod syntax;

pub use commands::{main_with, run, Cli};
pub use error::CliError;
pub use parse::{parse_expr, parse_module, ParseError};
pub use program::{DefVerdict, Language, Program, Run};
pub use syntax::{Annotation, Def, Expr, Location, Signature, SourceModule};
