//! Exact and certified computations for dynamical degrees, growth exponents
//! and canonical heights of endomorphisms in a few concrete families:
//! morphisms of the projective line, affine maps on Mordell-Weil lattices,
//! self-maps of products of an elliptic curve, Wehler (2,2,2) surfaces and
//! bare Picard actions.

pub mod error;
pub mod canonical;
pub mod dynsys;
pub mod heights;
pub mod numlin;
pub mod orbits;

pub use error::{Error, Result};
