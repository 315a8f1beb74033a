//! Construction and verification of unextendible product bases.
//!
//! The crate builds nonorthogonal UPBs of maximum cardinality, the Tiles UPB,
//! bound entangled states, a 5x5 UPB whose span is PPT uncompletable and a
//! three-qubit ensemble, then checks their properties: spans,
//! unextendibility, PPT-ness, PPT-POVM (in)distinguishability and many-copy
//! LOCC indistinguishability.
//!
//! Basis labels are zero-based internally; `|0>` here is `|1>` in the usual
//! one-based notation. Reports produced by the CLI show both.

pub mod cli;
pub mod constructions;
pub mod discrimination;
pub mod error;
pub mod feasibility;
pub mod linalg;
pub mod random;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
