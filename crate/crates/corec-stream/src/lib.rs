//! A small language of stream programs.
//!
//! Programs name their recursive occurrences through a [`DefEnv`]. A
//! definition is accepted when every reference sits under a `delay`; such
//! programs have weak head normal forms computable by structural recursion,
//! and [`interpret`] turns them into lazy host streams.

mod env;
mod eval;
mod name;
mod prog;
mod session;

pub use env::{check_guarded, DefEnv, FunRule, GuardError, HeadExpr, Template, Violation};
pub use eval::{embed_stream, interpret, map_whnf, merge_whnf, whnf, zipwith_whnf, StreamError};
pub use name::Name;
pub use prog::{Delayed, StreamProg, StreamWhnf};
pub use session::{Counters, EvalSession, Mode, DEFAULT_FUEL, MAX_DEPTH};
