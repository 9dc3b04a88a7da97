//! Points of projective space over Q and their Weil heights.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numlin::ball::{ln_bigint_abs, BallReal, BigRat};

/// Primitive integer coordinates with the first nonzero entry positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint {
    coords: Vec<BigInt>,
}

impl ProjectivePoint {
    /// Canonical representative of the point with integer coordinates `c`.
    pub fn from_integers(c: Vec<BigInt>) -> Result<Self> {
        let g = crate::numlin::intgcd::gcd_all(c.iter());
        if g.is_zero() {
            return Err(Error::AllZero);
        }
        let neg = c.iter().find(|x| !x.is_zero()).unwrap().is_negative();
        let g = if neg { -g } else { g };
        let coords = if g.is_one() {
            c
        } else {
            c.into_iter().map(|x| x / &g).collect()
        };
        Ok(ProjectivePoint { coords })
    }

    pub fn from_i64(c: &[i64]) -> Result<Self> {
        Self::from_integers(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// The point `x : 1` of the projective line.
    pub fn p1_from_rational(x: &BigRat) -> Self {
        Self::from_integers(vec![x.numer().clone(), x.denom().clone()]).unwrap()
    }

    pub fn p1_infinity() -> Self {
        ProjectivePoint {
            coords: vec![BigInt::one(), BigInt::zero()],
        }
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.coords
    }

    /// Dimension `n` of the ambient `P^n`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn max_abs(&self) -> BigInt {
        self.coords
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    /// Affine value `X/Y` of a point of the projective line, `None` at infinity.
    pub fn p1_value(&self) -> Option<BigRat> {
        assert_eq!(self.coords.len(), 2, "not a point of P^1");
        if self.coords[1].is_zero() {
            None
        } else {
            Some(BigRat::new(self.coords[0].clone(), self.coords[1].clone()))
        }
    }

    /// Bit length of the largest coordinate.
    pub fn size_bits(&self) -> u64 {
        self.coords.iter().map(|c| c.bits()).max().unwrap_or(0)
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(":"))
    }
}

/// Clears denominators, removes the gcd and fixes the sign.
pub fn normalize(raw: &[BigRat]) -> Result<ProjectivePoint> {
    if raw.iter().all(|x| x.is_zero()) {
        return Err(Error::AllZero);
    }
    let mut den = BigInt::one();
    for x in raw {
        den = den.lcm(x.denom());
    }
    let ints = raw
        .iter()
        .map(|x| (x * BigRat::from_integer(den.clone())).to_integer())
        .collect();
    ProjectivePoint::from_integers(ints)
}

/// A height: a ball in natural-log scale, with the integer whose logarithm
/// it is when that integer is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightValue {
    pub value: BallReal,
    pub exact_core: Option<BigInt>,
}

impl HeightValue {
    pub fn zero(prec: u32) -> Self {
        HeightValue {
            value: BallReal::zero(prec),
            exact_core: Some(BigInt::one()),
        }
    }

    pub fn from_ball(value: BallReal) -> Self {
        HeightValue {
            value,
            exact_core: None,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.value.is_exact() && self.value.mid().is_zero()
    }
}

impl fmt::Display for HeightValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// `log max |x_i|` of a normalized point.
pub fn weil_height(p: &ProjectivePoint, prec: u32) -> HeightValue {
    let m = p.max_abs();
    HeightValue {
        value: ln_bigint_abs(&m, prec),
        exact_core: Some(m),
    }
}

/// Height of a rational number as a point `x : 1`.
pub fn rational_height(x: &BigRat, prec: u32) -> HeightValue {
    weil_height(&ProjectivePoint::p1_from_rational(x), prec)
}

/// All points of `P^1(Q)` with `max(|p|, |q|) <= bound`, sorted by height.
pub fn enumerate_p1_points(bound: u64) -> Result<Vec<ProjectivePoint>> {
    if bound == 0 {
        return Err(Error::Invalid("height bound must be at least 1".into()));
    }
    let b = bound as i64;
    let mut out = vec![ProjectivePoint::p1_infinity()];
    for q in 1..=b {
        for p in -b..=b {
            if p.gcd(&q) == 1 || (p == 0 && q == 1) {
                out.push(ProjectivePoint::from_i64(&[p, q]).unwrap());
            }
        }
    }
    out.sort_by(|a, c| a.max_abs().cmp(&c.max_abs()).then_with(|| a.cmp(c)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::ball::rat;
    use num_traits::ToPrimitive;

    #[test]
    fn normalize_examples() {
        let p = normalize(&[rat(2, 3), rat(4, 1)]).unwrap();
        assert_eq!(p, ProjectivePoint::from_i64(&[1, 6]).unwrap());
        let p = normalize(&[rat(-1, 1), rat(-2, 1)]).unwrap();
        assert_eq!(p.coords(), &[BigInt::from(1), BigInt::from(2)]);
        let p = normalize(&[rat(0, 1), rat(5, 1)]).unwrap();
        assert_eq!(p.coords(), &[BigInt::from(0), BigInt::from(1)]);
        assert_eq!(normalize(&[rat(0, 1), rat(0, 1)]), Err(Error::AllZero));
    }

    #[test]
    fn weil_height_examples() {
        let h = weil_height(&ProjectivePoint::from_i64(&[1, 1]).unwrap(), 64);
        assert!(h.is_exact_zero());
        let h = weil_height(&ProjectivePoint::from_i64(&[3, 5]).unwrap(), 64);
        assert!((h.value.to_f64() - 5f64.ln()).abs() < 1e-15);
        let h = weil_height(&ProjectivePoint::from_i64(&[4, 6]).unwrap(), 64);
        assert_eq!(h.exact_core.unwrap().to_i64(), Some(3));
    }

    #[test]
    fn enumeration_counts() {
        let one = enumerate_p1_points(1).unwrap();
        assert_eq!(one.len(), 4);
        assert!(one.contains(&ProjectivePoint::from_i64(&[-1, 1]).unwrap()));
        assert_eq!(enumerate_p1_points(2).unwrap().len(), 8);
        assert!(enumerate_p1_points(0).is_err());
    }
}
