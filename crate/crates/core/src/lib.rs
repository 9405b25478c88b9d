//! Exact simulation of open dynamical systems with competing shrinking holes.
//!
//! The crate covers
//! - mixed-radix arithmetic on `Δ_α` ([`radix`]),
//! - the adding machine `x ↦ x + 1` with exact eventually periodic points,
//!   closed-form first-hit times and orbit decisions ([`odometer`]),
//! - the prime-count conjugacy invariant ([`classify`]),
//! - hole competitions, winner traces and constructive indecisive points
//!   ([`escape`]),
//! - exact rational interval dynamics: piecewise affine maps, the tent map
//!   and a substitution model of solenoidal sets ([`interval`]).

pub mod classify;
pub mod escape;
pub mod interval;
pub mod odometer;
pub mod radix;
pub mod rational;

pub use classify::{compute_m, conjugacy_witness, conjugate, is_infinity_adic, PrimeCountFunction};
pub use odometer::{AdicPoint, Cylinder, OrbitRelation, UltraDistance};
pub use radix::{DigitVector, RadixSpec};
