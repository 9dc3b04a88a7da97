//! Neron-Tate heights by telescoping along the doubling orbit.
//!
//! With `Phi(Q) = h(x(2Q)) - 4 h(x(Q))` bounded by `C_E` on all of `E(Q)`,
//! `|2 hhat(Q) - h(x(Q))| <= C_E / 3`, so `hhat(P) = h(x(2^K P)) / (2 4^K)`
//! up to `C_E / (6 4^K)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::heights::binary_form::{height_bound, primitive_image, BinaryForm, HeightBound};
use crate::heights::elliptic::{x_pair, EPoint, EllipticCurve};
use crate::heights::projective::HeightValue;
use crate::numlin::ball::{exp_rat, ln_bigint_abs, BallReal, BigRat};

pub const MAX_DOUBLING_DEPTH: u32 = 12;
pub const TORSION_STEPS: usize = 16;

/// Duplication data of an integral model of a curve.
#[derive(Clone, Debug)]
pub struct Duplication {
    pub model: EllipticCurve,
    pub scale: BigInt,
    pub phi: BinaryForm,
    pub psi2: BinaryForm,
    pub bound: HeightBound,
    /// Rational upper bound for `C_E`.
    pub c_e: BigRat,
    torsion_cap: BigInt,
}

impl Duplication {
    pub fn new(curve: &EllipticCurve) -> Self {
        let (model, scale) = curve.integral_model();
        let (phi, psi2) = model.duplication_forms();
        let bound = height_bound(&phi, &psi2).expect("nonsingular curve has coprime forms");
        let c_e = bound.constant_upper();
        let third = &c_e / BigRat::from_integer(3.into());
        let cap = exp_rat(&third, 64).upper();
        let torsion_cap = (cap.numer() + cap.denom() - BigInt::one()) / cap.denom();
        Duplication {
            model,
            scale,
            phi,
            psi2,
            bound,
            c_e,
            torsion_cap,
        }
    }

    /// Primitive x-coordinate pair of `p` on the integral model.
    pub fn model_pair(&self, p: &EPoint) -> (BigInt, BigInt) {
        x_pair(&EllipticCurve::scale_point(p, &self.scale))
    }

    /// `x(Q) -> x(2Q)` on primitive pairs.
    pub fn step(&self, a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
        primitive_image(&self.phi, &self.psi2, a, b, &self.bound.resultant)
    }

    /// Truncation error `C_E / (6 4^k)` of the depth-`k` estimate.
    pub fn tail(&self, k: u32) -> BigRat {
        &self.c_e / BigRat::from_integer(BigInt::from(6) << (2 * k as usize))
    }

    /// Smallest depth whose tail is at most `target`, capped at `cap`.
    pub fn depth_for(&self, target: &BigRat, cap: u32) -> u32 {
        (0..=cap).find(|&k| &self.tail(k) <= target).unwrap_or(cap)
    }

    /// Torsion test on the doubling orbit. Heights above `C_E / 3` certify a
    /// point of infinite order; a repeat or the identity certifies torsion.
    pub fn is_torsion(&self, p: &EPoint) -> bool {
        if p.is_infinity() {
            return true;
        }
        let (mut a, mut b) = self.model_pair(p);
        let mut seen: Vec<(BigInt, BigInt)> = Vec::new();
        for _ in 0..=TORSION_STEPS {
            if b.is_zero() {
                return true;
            }
            if a.abs().max(b.abs()) > self.torsion_cap {
                return false;
            }
            if seen.iter().any(|(sa, sb)| *sa == a && *sb == b) {
                return true;
            }
            seen.push((a.clone(), b.clone()));
            let next = self.step(&a, &b);
            a = next.0;
            b = next.1;
        }
        false
    }
}

pub(crate) fn tolerance_rat(tol: f64) -> Result<BigRat> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    Ok(BigRat::from_float(tol).unwrap())
}

pub(crate) fn precision_for(tol: f64, extra: u32) -> u32 {
    let bits = (-tol.log2()).ceil().max(0.0).to_u32().unwrap_or(0);
    96 + bits + extra
}

/// Neron-Tate height, quadratic normalization, doubling depth at most 12.
pub fn neron_tate(curve: &EllipticCurve, p: &EPoint, tol: f64) -> Result<HeightValue> {
    neron_tate_with_depth(curve, p, tol, MAX_DOUBLING_DEPTH)
}

/// As [`neron_tate`] with an explicit depth cap; when the cap is hit before
/// the tail bound reaches the tolerance the wider ball is returned.
pub fn neron_tate_with_depth(
    curve: &EllipticCurve,
    p: &EPoint,
    tol: f64,
    max_depth: u32,
) -> Result<HeightValue> {
    let tol_q = tolerance_rat(tol)?;
    let prec = precision_for(tol, 0);
    if !curve.contains(p) {
        return Err(Error::Invalid(format!("{p} is not on the curve")));
    }
    let dup = Duplication::new(curve);
    if dup.is_torsion(p) {
        return Ok(HeightValue::zero(prec));
    }
    let depth = dup.depth_for(&(&tol_q / BigRat::from_integer(2.into())), max_depth);
    let (mut a, mut b) = dup.model_pair(p);
    for _ in 0..depth {
        let next = dup.step(&a, &b);
        a = next.0;
        b = next.1;
    }
    let h = ln_bigint_abs(&a.abs().max(b.abs()), prec);
    let weight = BigRat::new(BigInt::one(), BigInt::from(2) << (2 * depth as usize));
    let value = h.scale(&weight).inflate(&dup.tail(depth));
    Ok(HeightValue::from_ball(value))
}

/// Naive height of the x-coordinate on the given curve's own model.
pub fn x_height(p: &EPoint, prec: u32) -> BallReal {
    let (a, b) = x_pair(p);
    ln_bigint_abs(&a.abs().max(b), prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e37() -> EllipticCurve {
        EllipticCurve::from_ints([0, 0, 1, -1, 0]).unwrap()
    }

    #[test]
    fn two_torsion_is_zero() {
        let e = EllipticCurve::from_ints([0, 0, 0, -1, 0]).unwrap();
        for x in [-1, 0, 1] {
            let h = neron_tate(&e, &EPoint::from_ints(x, 0), 1e-6).unwrap();
            assert!(h.is_exact_zero());
        }
        assert!(neron_tate(&e, &EPoint::Infinity, 1e-6).unwrap().is_exact_zero());
    }

    #[test]
    fn torsion_of_order_five() {
        // 11a3: y^2 + y = x^3 - x^2 has (0,0) of order 5.
        let e = EllipticCurve::from_ints([0, -1, 1, 0, 0]).unwrap();
        let p = EPoint::from_ints(0, 0);
        assert_eq!(e.mul(5, &p), EPoint::Infinity);
        assert!(neron_tate(&e, &p, 1e-6).unwrap().is_exact_zero());
    }

    #[test]
    fn generator_of_37a_positive_and_quadratic() {
        let e = e37();
        let p = EPoint::from_ints(0, 0);
        let tol = 1e-5;
        let h1 = neron_tate(&e, &p, tol).unwrap();
        assert!(h1.value.rad_f64() <= tol);
        assert!(h1.value.is_positive());
        let h2 = neron_tate(&e, &e.mul(2, &p), tol).unwrap();
        let four = h1.value.scale(&BigRat::from_integer(4.into()));
        assert!((h2.value.to_f64() - four.to_f64()).abs() <= 2.0 * tol);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(neron_tate(&e37(), &EPoint::from_ints(0, 0), 0.0).is_err());
    }
}
