//! Exact Casson-Gordon slice-genus obstructions for infected Levine knots.
//!
//! The pipeline builds `K # -K^r` from a Levine knot infected by step-function
//! signature knots, computes the mod-q homology of its p-fold branched cover
//! with the covering action, and checks Gilmer's signature bound against every
//! invariant subspace of the critical rank, recording a witness character for
//! each in a certificate that can be re-checked independently.

pub mod branched_cover;
pub mod cg_engine;
pub mod cli;
pub mod error;
pub mod ff_algebra;
pub mod gilmer;
pub mod knot_model;
pub mod linalg;
pub mod registry;
pub mod tl_signature;

pub use error::{Error, Result};
