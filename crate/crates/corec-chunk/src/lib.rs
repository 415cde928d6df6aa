//! Stream programs produced in chunks. Every definition declares a chunk
//! signature; the checker verifies it, and interpretation walks the
//! output chunk by chunk.

pub mod check;
pub mod eval;
pub mod prog;
pub mod schedule;

pub use check::{check_chunk_typing, check_def, synthesize, ChunkDef, ChunkEnv, ChunkTypeError};
pub use eval::{chunk_profile, interpret_chunk, map2_reference, whnf_chunk, ChunkError, ChunkSession};
pub use prog::{ChunkProg, ChunkWhnf, Delayed};
pub use schedule::{ChunkSignature, Schedule, ScheduleError};
