//! Proofs that two streams are equal, checked by unfolding them against
//! the streams they relate.

pub mod designator;
pub mod error;
pub mod fusion;
pub mod hyp;
pub mod proof;
pub mod unique;

pub use designator::Designator;
pub use error::ProofError;
pub use fusion::{build_fusion_proof, fusion_sides, iterate_designator};
pub use hyp::{hyp_check, hyp_sound, transcribe, HypContext, HypProof};
pub use proof::{proof_check, proof_whnf, DelayedProof, EqProof, EqWhnf, ProofSession, SharedProof};
pub use unique::{verify_unique, Rhs};
