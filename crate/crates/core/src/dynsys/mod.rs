//! The dynamical systems: morphisms of `P^1`, affine lattice maps, self-maps
//! of `E^r`, Wehler surface automorphisms, bare Picard actions and products.

pub mod abelian;
pub mod lattice;
pub mod p1;
pub mod picard;
pub mod system;
pub mod wehler;

pub use abelian::ConcreteAbelianSystem;
pub use lattice::LatticeSystem;
pub use p1::{p1_validate, P1Morphism};
pub use picard::PicardAction;
pub use system::{system_spectral, DegreeReport, DynSystem, GrowthKind, SystemPoint};
pub use wehler::{wehler_involution, wehler_picard, Axis, WehlerForm, WehlerPoint, WehlerSystem};

use crate::error::Result;
use crate::heights::projective::ProjectivePoint;
use crate::numlin::ball::BigRat;
use crate::numlin::matrix::RatVec;

pub fn p1_apply(f: &P1Morphism, p: &ProjectivePoint) -> ProjectivePoint {
    f.apply(p)
}

pub fn lattice_apply(s: &LatticeSystem, v: &[BigRat]) -> Result<RatVec> {
    s.apply(v)
}
