//! Dichotomy proofs over ℕ driven by the parity of quotients under powers of two.
//!
//! The engine repeatedly splits an infinite set of unsolved numbers — always an
//! exact residue class `{r + 2^k·a : a ∈ ℕ}` — on the parity of `n / 2^k`, asks
//! a pluggable step prover which half it can prove, and records the run as a
//! [`engine::ProofTrace`]. From a trace it reconstructs the unique candidate
//! counter-example (one bit per step), the exact unsolved density `1/2^s`, and a
//! tail classification of the run.
//!
//! - [`residue`] — the residue-class algebra the whole engine works on.
//! - [`engine`] — the step loop, traces, candidate construction, classification.
//! - [`props`] — propositions with exact class-level deciders, and the exact prover.
//! - [`collatz`] — the bundled worked example: trajectories, a range verifier,
//!   and modular descent certificates.
//! - [`oracle`] — brute-force cross-checking of traces against plain enumeration.
//! - [`propspec`] — the textual proposition syntax used by the CLI.

pub mod collatz;
pub mod engine;
pub mod oracle;
pub mod props;
pub mod propspec;
pub mod residue;

pub(crate) mod serde_support;

pub use engine::{run_dichotomy, run_finite, ProofTrace};
pub use props::Proposition;
pub use residue::ResidueClass;
