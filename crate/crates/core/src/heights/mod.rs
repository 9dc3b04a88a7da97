//! Weil heights, Neron-Tate heights on elliptic curves and Gram-form lattice heights.

pub mod binary_form;
pub mod elliptic;
pub mod gram;
pub mod local;
pub mod neron_tate;
pub mod projective;

pub use binary_form::{height_bound, resultant, BinaryForm, HeightBound};
pub use elliptic::{EPoint, EllipticCurve};
pub use gram::{gram_from_points, lattice_height, nt_pairing, GramForm, GramMatrix, LatticeHeight};
pub use local::{factor_with_hints, neron_tate_local};
pub use neron_tate::{neron_tate, neron_tate_with_depth, Duplication, MAX_DOUBLING_DEPTH};
pub use projective::{enumerate_p1_points, normalize, weil_height, HeightValue, ProjectivePoint};

/// `ec_add` in free-function form.
pub fn ec_add(curve: &EllipticCurve, p: &EPoint, q: &EPoint) -> EPoint {
    curve.add(p, q)
}

/// `ec_mul` in free-function form.
pub fn ec_mul(curve: &EllipticCurve, m: i64, p: &EPoint) -> EPoint {
    curve.mul(m, p)
}
