//! Polynomial sequences of the three-term recurrence
//! `P_n + B(z) P_{n-l} + A(z) P_{n-k} = 0` with `P_0 = 1` and
//! `P_{-1} = ... = P_{-k+1} = 0`, their complex roots, and the real algebraic
//! curve `Im(B^k / A^l) = 0` on which those roots lie.
//!
//! The crate is organised bottom-up:
//!
//! - [`poly`]: dense polynomials over big integers and complex doubles
//! - [`parse`]: infix polynomial expressions in `z`
//! - [`recurrence`]: the recurrence itself, its closed form and lattice sets
//! - [`gpoly`]: lattice-path generating polynomials and their negative roots
//! - [`isolate`]: exact real-root counting and isolation over the integers
//! - [`rootfind`]: Aberth-Ehrlich simultaneous root finding
//! - [`curve`]: curve membership, the `l = 1` region test and the
//!   Beraha-Kahane-Weiss discriminator
//! - [`contour`]: marching-squares tracing of level sets
//! - [`verify`]: the end-to-end root-on-curve check

pub mod config;
pub mod contour;
pub mod curve;
pub mod error;
pub mod gpoly;
pub mod isolate;
pub mod parse;
pub mod poly;
pub mod recurrence;
pub mod rootfind;
pub mod verify;

pub use config::ToleranceConfig;
pub use error::{Error, Result};
pub use poly::{ComplexPoly, DensePoly, IntPoly, Poly};
