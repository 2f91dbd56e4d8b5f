//! Noisy continuous-variable teleportation in a truncated Fock space.
//!
//! The crate models imperfect teleportation of a single optical mode as the
//! Gaussian displacement-noise channel
//!
//! ```text
//! E_σ(ρ) = ∫ d²z/(πσ) exp(−|z|²/σ) D(z) ρ D†(z)
//! ```
//!
//! and evaluates standard and entanglement fidelities for coherent states and
//! entangled coherent states (ECS) three ways: closed forms ([`analytics`]),
//! truncation-free coherent-overlap quadrature and Fock-space brute force
//! ([`entfid`]). A direct simulation of the measure-and-displace protocol
//! ([`channels::teleport`]) checks that finite squeezing is equivalent to the
//! noise channel.
//!
//! Noise variances use the convention where vacuum noise is `1/2`, so that
//! `⟨|z|²⟩ = σ` under the channel's weight.

pub mod analytics;
pub mod channels;
pub mod entfid;
pub mod error;
pub mod fock;
pub mod quadrature;
mod reduce;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
