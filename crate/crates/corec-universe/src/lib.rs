//! A small program language indexed by type codes for trees, streams and
//! products, and the circular breadth-first labelling written in it.

pub mod code;
pub mod eval;
pub mod label;
pub mod prog;

pub use code::{Atom, AtomKind, UCode, UValue};
pub use eval::{fst_whnf, interpret_u, lab_whnf, snd_whnf, whnf_u, UEnv, UError, USession};
pub use label::{check_label_correct, label, label_prime};
pub use prog::{CodeMismatch, Delayed, UProg, UWhnf, WhnfNode};
