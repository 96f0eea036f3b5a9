//! Simulation of quantum circuits with closed timelike curves.
//!
//! A standard-form circuit acts with one unitary `U` on `n` chronology-respecting (CR)
//! qubits and `m` chronology-violating (CV) qubits. The three theories implemented here
//! give different prescriptions for the CR output:
//!
//! * [`dctc`]: Deutsch's self-consistency, `τ = Tr_CR[U(ρ ⊗ τ)U†]`, with several rules for
//!   choosing among the fixed points and a weighted average over all of them;
//! * [`pctc`]: postselected teleportation, `ρ_f ∝ PρP†` with `P = Tr_CV U`;
//! * [`tctc`]: transition-probability CTCs, evaluated in closed form, by Monte Carlo over
//!   Haar-random CV states, or with a partial-trace variant.

pub mod acceptance;
pub mod analysis;
pub mod circuit;
pub mod cli;
pub mod dctc;
pub mod encoding;
pub mod error;
pub mod haar;
pub mod montecarlo;
pub mod outcome;
pub mod pctc;
pub mod qstate;
pub mod tctc;

pub use error::{Error, Result};
pub use outcome::TheoryOutcome;
