//! Core algorithms for the level-15 "avatar" construction: an elliptic curve
//! attached to the Riemann zeta function is identified with the modular curve
//! of Γ¹(15), the 96 Γ(1)-translates of its coordinate function Z are indexed
//! by cosets, and the relation `Z₄₁(z) = ζ(s)` is continued along a path in
//! the tree of SL(2,Z)-images of an arc to walk between zeta zeros.
//!
//! The crate is `no_std` and needs only `alloc`. File IO, the command line
//! and the parallel experiment runner live in the companion `avatar` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod eta_engine;
pub mod exactquad;
pub mod sl2z;
pub mod tracer;
pub mod treepath;
pub mod zeta;
