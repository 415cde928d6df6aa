//! Host-level codata: lazily produced streams, colists, infinite binary
//! trees and stream processors, plus bounded observations over them.

pub mod budget;
pub mod elem;
pub mod sp;
pub mod stream;
pub mod susp;
pub mod tree;

pub use budget::Budget;
pub use elem::{BinaryOp, Elem, EvalError, Int, UnaryOp};
pub use sp::{sp_run, Emit, GetCont, Next, Sp, SpError, SpProgram, Step};
pub use stream::{bisimilar_to_depth, first_difference, take_prefix, Colist, Stream};
pub use susp::Susp;
pub use tree::{bfs_labels, tree_truncate, FinTree, InfTree};
