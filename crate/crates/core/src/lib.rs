//! Qudit-mediated continuous-variable teleportation.
//!
//! An input mode is split evenly over `N` modes, each mode is teleported
//! through a maximally entangled qudit that keeps at most `d` photons, and
//! the modes are recombined with vacuum post-selection on the auxiliary
//! outputs. Every Fock state `|k⟩` then picks up a real gain
//! `{N brace k}_d · k! / N^k`, where `{N brace k}_d` sums `Π 1/r_j!` over
//! compositions of `k` into `N` parts no larger than `d`.
//!
//! - [`combinatorics`]: exact restricted-composition weights.
//! - [`teleport`]: closed-form gains, teleported states, EPR fidelities.
//! - [`multimode`]: brute-force truncated-Fock simulation used as an oracle.
//! - [`qudit`]: finite-dimensional teleportation with generalized Bell measurements.
//! - [`noise`]: detector POVMs and scheme-efficiency comparisons.

pub mod combinatorics;
pub mod error;
pub mod multimode;
pub mod noise;
pub mod qudit;
pub mod teleport;

pub use error::{Error, Result};
pub use teleport::{FockVector, SchemeParams, SqueezingParams, TeleportOutcome};
