//! Deterministic ethical-risk scoring engine.
//!
//! Each risk type gets an Ethical Risk Score `ERS = ERM * CF * WoI`:
//!
//! - **ERM** (risk magnitude, percent) from Mamdani fuzzy inference over
//!   triangular membership functions ([`fuzzy`]),
//! - **CF** (certainty factor) from confidence-weighted rule propagation
//!   ([`certainty`]),
//! - **WoI** (weight of importance) from fuzzy-AHP pairwise comparisons
//!   ([`fahp`]).
//!
//! Assessment problems are declared in a JSON scenario file ([`scenario`])
//! and the model's behavior is validated by local and global sensitivity
//! analyses plus a five-axiom suite ([`sensitivity`]).
//!
//! The `parallel` feature (on by default) runs Monte-Carlo and Sobol
//! sample loops on rayon; disabling it falls back to sequential evaluation
//! with bit-identical results.

pub mod certainty;
pub mod error;
pub mod exec;
pub mod fahp;
pub mod fuzzy;
pub mod reports;
pub mod scenario;
pub mod scoring;
pub mod sensitivity;

pub use error::{Error, Result};
